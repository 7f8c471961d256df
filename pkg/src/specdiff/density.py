"""Limiting eigenvalue density on scattering bands and its moment laws.

The smoothed projection differences have eigenvalues filling bands
(-a_n, a_n) with a log-rate density

    mu(y) = (1/pi^2) sum_n 1_(-a_n, a_n)(y) / (|y| sqrt(1 - y^2/a_n^2)),

where the a_n in (0, 1] are the band edges.  The even moments and window
masses of mu are what the experiments compare their fitted slopes against.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

__all__ = [
    "BandSet",
    "band_count_slope",
    "delta_m",
    "mu",
    "rhs_integral",
    "sech_moment",
]

EDGE_FLOOR = 1e-6


class BandSet:
    """Band edges a_n, stored descending in (0, 1].

    Edges at or below ``floor`` are dropped: they carry no weight at the
    resolutions any experiment here reaches and would otherwise poison the
    arccosh terms with huge arguments.
    """

    __slots__ = ("edges",)

    def __init__(self, edges, floor: float = EDGE_FLOOR):
        arr = np.sort(np.asarray(list(edges), dtype=float))[::-1]
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("band edges must be finite")
        if arr.size and arr[0] > 1.0 + 1e-12:
            raise ValueError(f"band edges must lie in (0, 1], got {arr[0]!r}")
        arr = np.minimum(arr, 1.0)
        self.edges = tuple(float(a) for a in arr if a > floor)

    def __iter__(self):
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"BandSet({list(self.edges)!r})"


def mu(bands: BandSet, y: float) -> float:
    """Density of the limiting eigenvalue distribution at y.

    Defined on 0 < |y| < 1; the value is 0 outside every band, finite inside,
    and blows up (integrably) at band edges and at the origin.
    """
    y = float(y)
    if y == 0.0:
        raise ValueError("mu is singular at y = 0")
    if abs(y) >= 1.0:
        raise ValueError(f"mu is defined on |y| < 1, got y = {y!r}")
    ay = abs(y)
    total = 0.0
    for a in bands:
        if ay < a:
            total += 1.0 / (ay * np.sqrt(1.0 - (y / a) ** 2))
    return total / np.pi**2


def band_count_slope(bands: BandSet, b: float) -> float:
    """Mass of mu beyond b, (1/pi^2) sum over a_n > b of arccosh(a_n / b).

    This is the predicted log-rate of the eigenvalue count outside (-b, b).
    """
    b = float(b)
    if not (b > 0):
        raise ValueError(f"threshold must be positive, got {b!r}")
    total = 0.0
    for a in bands:
        if a > b:
            total += float(np.arccosh(a / b))
    return total / np.pi**2


def sech_moment(m: float, tol: float = 1e-12) -> float:
    """Integral over the line of sech(x)^m, by adaptive quadrature."""
    if not (m >= 1):
        raise ValueError(f"moment order must be >= 1, got {m!r}")

    def integrand(x: float) -> float:
        # sech(x)^m through exp(-x) so large x cannot overflow cosh
        u = math.exp(-x)
        return (2.0 * u / (1.0 + u * u)) ** float(m)

    val, err = integrate.quad(integrand, 0.0, np.inf, epsabs=tol, epsrel=tol)
    return 2.0 * val


def delta_m(bands: BandSet, m: int) -> float:
    """Moment of mu: Delta_m = integral of y^m mu(y) dy.

    Vanishes identically for odd m; for even m it equals
    (1/pi^2) (sum a_n^m) integral sech(x)^m dx.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"moment order must be a positive integer, got {m!r}")
    if m % 2 == 1:
        return 0.0
    edge_sum = sum(a ** float(m) for a in bands)
    return edge_sum * sech_moment(m) / np.pi**2


def rhs_integral(bands: BandSet, g, eta: float, tol: float = 1e-10) -> float:
    """Integral of g against mu, for g vanishing on (-eta, eta).

    Uses the substitution y = a_n / cosh(x), under which the band-n term
    becomes (1/(2 pi^2)) int_{-X}^{X} [g(a_n/cosh x) + g(-a_n/cosh x)] dx and
    the vanishing of g below eta truncates to X = arccosh(a_n / eta).
    """
    if not (eta > 0):
        raise ValueError(f"eta must be positive, got {eta!r}")
    total = 0.0
    for a in bands:
        if a <= eta:
            continue
        cap = float(np.arccosh(a / eta))

        def integrand(x, a=a):
            y = a / np.cosh(x)
            return g(y) + g(-y)

        val, err = integrate.quad(integrand, 0.0, cap, epsabs=tol, epsrel=tol, limit=400)
        total += val  # integrand is even in x, so (-X, X) is twice (0, X)
    return total / np.pi**2
