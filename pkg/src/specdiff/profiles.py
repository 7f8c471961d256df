"""Smoothed step profiles interpolating between +1/2 and -1/2.

A profile psi is a smooth function with psi(-inf) = +1/2 and psi(+inf) = -1/2.
Two flavours are distinguished: SOFT profiles approach the limits only
asymptotically, COMPACT_FLAT profiles equal them exactly outside [-R, R].
Scaling by eps compresses the transition region onto a width-eps scale, which
is the smoothing used throughout the projection-difference experiments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "CutoffProfile",
    "ProfileKind",
    "ScaledProfile",
    "builtin_profile",
    "builtin_profile_names",
    "scale",
    "zeta",
    "zeta_eps",
]


class ProfileKind(enum.Enum):
    SOFT = "soft"
    COMPACT_FLAT = "compact_flat"


@dataclass(frozen=True)
class CutoffProfile:
    """A smoothed step.  ``fn`` must accept and return numpy arrays."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    kind: ProfileKind
    flat_radius: float | None = None
    sup_bound: float = 0.5

    def __post_init__(self):
        if self.kind is ProfileKind.COMPACT_FLAT:
            if self.flat_radius is None or not (self.flat_radius > 0):
                raise ValueError("COMPACT_FLAT profiles need a positive flat_radius")
        elif self.flat_radius is not None:
            raise ValueError("flat_radius only applies to COMPACT_FLAT profiles")

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ScaledProfile:
    """psi_eps(x) = psi(x / eps)."""

    base: CutoffProfile
    epsilon: float

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon!r}")

    @property
    def flat_radius(self) -> float | None:
        r = self.base.flat_radius
        return None if r is None else r * self.epsilon

    def __call__(self, x):
        return self.base.fn(np.asarray(x, dtype=float) / self.epsilon)


def scale(profile: CutoffProfile, epsilon: float) -> ScaledProfile:
    """Squeeze a profile onto the scale ``epsilon``."""
    return ScaledProfile(profile, float(epsilon))


def zeta(x):
    """The model symbol -(2/pi) arctan(x), a step of height 1 at the origin."""
    return -(2.0 / np.pi) * np.arctan(np.asarray(x, dtype=float))


def zeta_eps(x, epsilon: float):
    """zeta at scale epsilon, zeta(x / epsilon)."""
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise ValueError(f"epsilon must be positive and finite, got {epsilon!r}")
    return zeta(np.asarray(x, dtype=float) / epsilon)


def _arctan_half(x: np.ndarray) -> np.ndarray:
    return -np.arctan(x) / np.pi


def _tanh_half(x: np.ndarray) -> np.ndarray:
    return -np.tanh(x) / 2.0


def _shifted_arctan(x: np.ndarray) -> np.ndarray:
    # Deliberately not odd: transition centred at x = 1.  Used to stress the
    # claim that the limiting statistics do not see the profile shape.
    return -np.arctan(x - 1.0) / np.pi


# The mollified step integrates the standard C-infinity bump exp(-1/(1-t^2)).
# One fixed 64-point Gauss-Legendre rule evaluates int_0^x bump; normalising
# by the same rule's value at x = 1 makes psi(+-1) = -+1/2 exact and keeps the
# profile odd to the last bit (the rule is applied to [0, x] for every x).
_GL64_NODES, _GL64_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _bump(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out


def _bump_integral_zero_to(x: np.ndarray) -> np.ndarray:
    # nodes mapped from [-1, 1] onto [0, x]; odd in x by construction
    t = 0.5 * np.multiply.outer(_GL64_NODES + 1.0, x)
    vals = _bump(t)
    return 0.5 * x * np.tensordot(_GL64_WEIGHTS, vals, axes=1)


_BUMP_HALF_MASS = float(_bump_integral_zero_to(np.array([1.0]))[0])


def _mollified_step(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    xv = np.atleast_1d(x)
    out = np.where(xv >= 1.0, -0.5, np.where(xv <= -1.0, 0.5, 0.0))
    inside = np.abs(xv) < 1.0
    if np.any(inside):
        out[inside] = -_bump_integral_zero_to(xv[inside]) / (2.0 * _BUMP_HALF_MASS)
    return float(out[0]) if x.ndim == 0 else out


_BUILTINS = {
    "ARCTAN_HALF": CutoffProfile("ARCTAN_HALF", _arctan_half, ProfileKind.SOFT),
    "TANH_HALF": CutoffProfile("TANH_HALF", _tanh_half, ProfileKind.SOFT),
    "MOLLIFIED_STEP": CutoffProfile(
        "MOLLIFIED_STEP", _mollified_step, ProfileKind.COMPACT_FLAT, flat_radius=1.0
    ),
    "SHIFTED_ARCTAN": CutoffProfile("SHIFTED_ARCTAN", _shifted_arctan, ProfileKind.SOFT),
}


def builtin_profile_names() -> tuple[str, ...]:
    return tuple(_BUILTINS)


def builtin_profile(name: str) -> CutoffProfile:
    """Look up a built-in profile by name (case-insensitive)."""
    key = str(name).strip().upper()
    try:
        return _BUILTINS[key]
    except KeyError:
        known = ", ".join(_BUILTINS)
        raise ValueError(f"unknown profile {name!r}; known profiles: {known}") from None
