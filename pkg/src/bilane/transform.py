"""Log-radial coordinate mapping and the direct-space bilaplacian oracle.

A radial profile u(r) maps to w(t) = e^(4t/(p-1)) u(e^t) with t = ln r.
In these coordinates the blow-up family u_lambda(x) = lambda^(4/(p-1))
u(lambda x) acts by plain translation in t, which is what makes the
energy machinery tick.  ``radial_bilaplacian`` evaluates the bilaplacian
of a radial function straight from its derivatives, independently of the
coefficient algebra it is used to validate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .coeffs import Params


def _validate_samples(x: np.ndarray, y: np.ndarray, xname: str, yname: str):
    if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
        raise ValueError(f"{xname} and {yname} must be 1-d arrays of equal length")
    if x.size == 0:
        raise ValueError("profile must contain at least one sample")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise ValueError("samples must be finite")
    if np.any(np.diff(x) <= 0):
        raise ValueError(f"{xname} must be strictly increasing")
    if np.any(y < 0):
        raise ValueError(f"{yname} values must be nonnegative")


@dataclass(frozen=True)
class RadialProfile:
    """Sampled radial profile (r_i, u_i) with r strictly increasing > 0."""

    r: np.ndarray
    u: np.ndarray
    params: Params

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        u = np.asarray(self.u, dtype=float)
        _validate_samples(r, u, "r", "u")
        if r[0] <= 0:
            raise ValueError("radii must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "u", u)

    @property
    def domain(self) -> str:
        """'interior' (all r <= 1), 'exterior' (all r >= 1) or 'mixed'."""
        if self.r[-1] <= 1.0:
            return "interior"
        if self.r[0] >= 1.0:
            return "exterior"
        return "mixed"

    def __len__(self) -> int:
        return self.r.size


@dataclass(frozen=True)
class EFProfile:
    """Transformed profile (t_i, w_i); t = ln r is the primary coordinate."""

    t: np.ndarray
    w: np.ndarray
    params: Params

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        w = np.asarray(self.w, dtype=float)
        _validate_samples(t, w, "t", "w")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "w", w)

    def __len__(self) -> int:
        return self.t.size


def to_ef(profile: RadialProfile) -> EFProfile:
    """Map (r, u) samples to (t, w) = (ln r, r^(4/(p-1)) u)."""
    a = float(profile.params.growth_exponent)
    t = np.log(profile.r)
    w = profile.r**a * profile.u
    return EFProfile(t=t, w=w, params=profile.params)


def from_ef(profile: EFProfile) -> RadialProfile:
    """Inverse map; round-trips with to_ef to ~1e-14 relative."""
    a = float(profile.params.growth_exponent)
    r = np.exp(profile.t)
    u = profile.w * r**(-a)
    return RadialProfile(r=r, u=u, params=profile.params)


def scale(profile: RadialProfile, lam: float) -> RadialProfile:
    """The blow-up family: samples of u_lam(x) = lam^(4/(p-1)) u(lam x).

    Sampling u_lam at r_i/lam reuses the original values, so the result
    is (r_i/lam, lam^(4/(p-1)) u_i); in EF variables this is the
    translation t -> t - ln lam with w unchanged.
    """
    if not lam > 0:
        raise ValueError("scaling factor must be positive")
    a = float(profile.params.growth_exponent)
    return RadialProfile(r=profile.r / lam, u=lam**a * profile.u,
                         params=profile.params)


@dataclass(frozen=True)
class RadialFunction:
    """Analytic radial function with optional derivatives up to order 3.

    Used where sampled profiles are too coarse: energy probes and the
    scaling-invariance check accept this in place of a RadialProfile.
    """

    u: Callable[[float], float]
    du: Optional[Callable[[float], float]] = None
    d2u: Optional[Callable[[float], float]] = None
    d3u: Optional[Callable[[float], float]] = None

    @property
    def has_derivatives(self) -> bool:
        return None not in (self.du, self.d2u, self.d3u)


def scale_function(fn: RadialFunction, lam: float, params: Params) -> RadialFunction:
    """Analytic counterpart of ``scale``: u_lam(r) = lam^a u(lam r)."""
    if not lam > 0:
        raise ValueError("scaling factor must be positive")
    a = float(params.growth_exponent)
    c = lam**a

    def wrap(g, k):
        if g is None:
            return None
        return lambda r, g=g, k=k: c * lam**k * g(lam * r)

    return RadialFunction(u=wrap(fn.u, 0), du=wrap(fn.du, 1),
                          d2u=wrap(fn.d2u, 2), d3u=wrap(fn.d3u, 3))


def ef_state_from_radial(params: Params, fn: RadialFunction, t: float
                         ) -> Tuple[float, float, float, float]:
    """(w, w', w'', w''') at log-radius t from analytic radial derivatives.

    Chain rule for w(t) = e^(at) u(e^t) with a = 4/(p-1):
      w'   = e^(at) (a u + r u')
      w''  = e^(at) (a^2 u + (2a+1) r u' + r^2 u'')
      w''' = e^(at) (a^3 u + (3a^2+3a+1) r u' + 3(a+1) r^2 u'' + r^3 u''')
    """
    if not fn.has_derivatives:
        raise ValueError("analytic EF state needs u', u'', u'''")
    a = float(params.growth_exponent)
    r = math.exp(t)
    e = math.exp(a * t)
    u0 = fn.u(r)
    v1 = r * fn.du(r)
    v2 = r * r * fn.d2u(r)
    v3 = r**3 * fn.d3u(r)
    w = e * u0
    w1 = e * (a * u0 + v1)
    w2 = e * (a * a * u0 + (2 * a + 1) * v1 + v2)
    w3 = e * (a**3 * u0 + (3 * a * a + 3 * a + 1) * v1 + 3 * (a + 1) * v2 + v3)
    return (w, w1, w2, w3)


def ef_state_from_samples(profile: EFProfile, t0: float, points: int = 7
                          ) -> Tuple[float, float, float, float]:
    """(w, w', w'', w''') at t0 by a local polynomial fit on the samples.

    Fits a degree-5 polynomial in (t - t0) through the ``points`` samples
    nearest t0; needs dense, smooth sampling to be accurate.  Probes
    outside the sampled range are rejected.
    """
    t, w = profile.t, profile.w
    if not (t[0] <= t0 <= t[-1]):
        raise ValueError(f"probe t={t0} outside sampled range [{t[0]}, {t[-1]}]")
    if t.size < points:
        raise ValueError(f"need at least {points} samples for the local fit")
    # contiguous window of `points` samples centered on t0
    idx = int(np.searchsorted(t, t0))
    lo = max(0, min(idx - points // 2, t.size - points))
    sl = slice(lo, lo + points)
    deg = min(5, points - 1)
    coef = np.polyfit(t[sl] - t0, w[sl], deg)
    c = coef[::-1]  # ascending order
    return (float(c[0]), float(c[1]), float(2 * c[2]), float(6 * c[3]))


# 5-point central stencils on {r-2h, r-h, r, r+h, r+2h}: first and second
# derivatives are 4th order, third and fourth 2nd order, so the composed
# bilaplacian error is O(h^2).
def _fd_derivatives(phi, r, h):
    f_2 = phi(r - 2 * h)
    f_1 = phi(r - h)
    f0 = phi(r)
    f1 = phi(r + h)
    f2 = phi(r + 2 * h)
    d1 = (f_2 - 8 * f_1 + 8 * f1 - f2) / (12 * h)
    d2 = (-f_2 + 16 * f_1 - 30 * f0 + 16 * f1 - f2) / (12 * h * h)
    d3 = (-f_2 + 2 * f_1 - 2 * f1 + f2) / (2 * h**3)
    d4 = (f_2 - 4 * f_1 + 6 * f0 - 4 * f1 + f2) / h**4
    return d1, d2, d3, d4


def radial_bilaplacian(phi: Callable[[float], float], r: float, n: int,
                       h: float = 1e-3,
                       derivatives: Optional[Sequence[Callable[[float], float]]] = None
                       ) -> float:
    """Bilaplacian of a radial function at radius r in dimension n.

    Uses the radial formula
      phi'''' + 2(n-1)/r phi''' + (n-1)(n-3)/r^2 phi'' - (n-1)(n-3)/r^3 phi'.
    With ``derivatives`` = (phi', phi'', phi''', phi'''') the formula is
    evaluated exactly; otherwise 5-point central differences of step h
    are used (error O(h^2)), which requires r > 2h.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    if derivatives is not None:
        if len(derivatives) != 4:
            raise ValueError("derivatives must be (phi', phi'', phi''', phi'''')")
        d1, d2, d3, d4 = (g(r) for g in derivatives)
    else:
        if not h > 0:
            raise ValueError("step h must be positive")
        if r <= 2 * h:
            raise ValueError(f"finite differences need r > 2h (r={r}, h={h})")
        d1, d2, d3, d4 = _fd_derivatives(phi, r, h)
    c = (n - 1) * (n - 3)
    return d4 + 2 * (n - 1) / r * d3 + c / r**2 * d2 - c / r**3 * d1


def power_function(gamma: float) -> Tuple[Callable, Tuple[Callable, Callable, Callable, Callable]]:
    """r^gamma with its first four analytic derivatives, for oracle use."""
    def phi(r, g=float(gamma)):
        return r**g

    def deriv(k):
        coef = 1.0
        for i in range(k):
            coef *= gamma - i
        return lambda r, c=coef, g=float(gamma) - k: c * r**g

    return phi, (deriv(1), deriv(2), deriv(3), deriv(4))
