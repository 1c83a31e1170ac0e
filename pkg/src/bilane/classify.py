"""Singularity classification of sampled radial profiles.

A profile approaching the origin either stays bounded after rescaling by
r^(4/(p-1)) with limit 0 (removable) or converges to the universal
constant C_pn = K0^(1/(p-1)) at the exact blow-up rate.  Sampled data can
do anything, so Undetermined is a first-class verdict and every report
carries the fit window, rate and residuals it was based on.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .coeffs import Params, compute_coefficients
from .ode import Trajectory
from .transform import RadialProfile


class Verdict(str, enum.Enum):
    REMOVABLE = "Removable"
    SINGULAR = "Singular"
    UNDETERMINED = "Undetermined"


class Side(str, enum.Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class ClassifyOptions:
    """Window and tolerance policy; the dichotomy itself fixes no rates."""

    window_fraction: float = 1.0 / 3.0   # innermost fraction of sampled decades
    tol_limit: float = 0.05              # |fitted_limit - C_pn| <= tol_limit * C_pn
    tol_zero: float = 0.01               # fitted_limit <= tol_zero * C_pn
    tol_rate: float = 0.05               # absolute slack on the log-log slope

    def __post_init__(self):
        if not 0 < self.window_fraction <= 1:
            raise ValueError("window_fraction must lie in (0, 1]")
        if min(self.tol_limit, self.tol_zero, self.tol_rate) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class ClassificationReport:
    verdict: Verdict
    fitted_limit: float       # median of r^(4/(p-1)) u on the window
    fitted_rate: float        # least-squares slope of ln u vs ln r there
    C_pn: float
    window: Tuple[float, float]
    residual_rms: float
    bound_sup: float          # sup over all samples of r^(4/(p-1)) u

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "fitted_limit": self.fitted_limit,
            "fitted_rate": self.fitted_rate,
            "C_pn": self.C_pn,
            "window": [self.window[0], self.window[1]],
            "residual_rms": self.residual_rms,
            "bound_sup": self.bound_sup,
        }


def _require_open_window(params: Params, what: str) -> None:
    if params.n < 5:
        raise ValueError(f"{what} requires n >= 5")
    lo, hi = params.window()
    if not (lo < params.p < hi):
        raise ValueError(
            f"{what} requires p strictly inside ({lo}, {hi}); got p={params.p}")


def classify_profile(params: Params, profile: RadialProfile,
                     options: Optional[ClassifyOptions] = None) -> ClassificationReport:
    """Decide Removable / Singular / Undetermined for a sampled profile.

    Needs >= 20 samples spanning >= 3 decades of r with r < 1.  The
    rescaled values w = r^(4/(p-1)) u are summarized by their median over
    the innermost ``window_fraction`` of sampled decades; the blow-up
    rate is the least-squares slope of ln u against ln r there.
    """
    _require_open_window(params, "classify_profile")
    opts = options or ClassifyOptions()
    r, u = profile.r, profile.u
    if r.size < 20:
        raise ValueError("need at least 20 samples")
    decades = math.log10(r[-1] / r[0])
    if decades < 3:
        raise ValueError(f"need >= 3 decades of r, got {decades:.2f}")
    if r[-1] >= 1:
        raise ValueError("profile must approach the origin (all r < 1)")

    a = float(params.growth_exponent)
    c_pn = float(compute_coefficients(params).C_pn)
    w_all = r**a * u
    bound_sup = float(np.max(w_all))

    r_win_hi = r[0] * (r[-1] / r[0]) ** opts.window_fraction
    mask = r <= r_win_hi
    if int(mask.sum()) < 5:
        mask = np.zeros_like(mask)
        mask[:5] = True
    rw, uw, ww = r[mask], u[mask], w_all[mask]
    fitted_limit = float(np.median(ww))

    pos = uw > 0
    if int(pos.sum()) >= 2:
        slope, intercept = np.polyfit(np.log(rw[pos]), np.log(uw[pos]), 1)
        resid = np.log(uw[pos]) - (slope * np.log(rw[pos]) + intercept)
        fitted_rate = float(slope)
        residual_rms = float(np.sqrt(np.mean(resid**2)))
    else:
        fitted_rate = 0.0
        residual_rms = 0.0

    if (abs(fitted_limit - c_pn) <= opts.tol_limit * c_pn
            and abs(fitted_rate + a) <= opts.tol_rate):
        verdict = Verdict.SINGULAR
    elif fitted_limit <= opts.tol_zero * c_pn and fitted_rate >= -opts.tol_rate:
        verdict = Verdict.REMOVABLE
    else:
        verdict = Verdict.UNDETERMINED

    return ClassificationReport(verdict=verdict, fitted_limit=fitted_limit,
                                fitted_rate=fitted_rate, C_pn=c_pn,
                                window=(float(rw[0]), float(rw[-1])),
                                residual_rms=residual_rms, bound_sup=bound_sup)


@dataclass(frozen=True)
class BoundReport:
    """Empirical constant in the pointwise bound u <= C r^(-4/(p-1)).

    The theory guarantees some finite C without quantifying it, so this
    never declares a violation; it just reports the observed constant.
    """

    side: Side
    empirical_constant: float
    r_at_sup: float
    attained_at_edge: bool

    def to_dict(self) -> dict:
        return {
            "side": self.side.value,
            "empirical_constant": self.empirical_constant,
            "r_at_sup": self.r_at_sup,
            "attained_at_edge": self.attained_at_edge,
        }


def audit_bounds(params: Params, profile: RadialProfile, side: Side) -> BoundReport:
    """sup of r^(4/(p-1)) u over the samples, with its location.

    Interior profiles must be sampled in (0, 1/2], exterior ones in
    [2, inf).
    """
    r, u = profile.r, profile.u
    if side == Side.INTERIOR:
        if r[-1] > 0.5:
            raise ValueError("interior bound audit needs samples in (0, 1/2]")
    elif r[0] < 2.0:
        raise ValueError("exterior bound audit needs samples in [2, inf)")
    a = float(params.growth_exponent)
    w = r**a * u
    i = int(np.argmax(w))
    return BoundReport(side=side, empirical_constant=float(w[i]),
                       r_at_sup=float(r[i]),
                       attained_at_edge=(i == 0 or i == r.size - 1))


@dataclass(frozen=True)
class DerivativeBoundReport:
    """sup of |w|, |w'|, |w''|, |w'''| along a trajectory.

    ``growing`` flags components whose magnitude increases monotonically
    across the final tenth of the t-span (a heuristic unboundedness
    signal, purely informational).
    """

    sup_w: float
    sup_w1: float
    sup_w2: float
    sup_w3: float
    growing: Tuple[bool, bool, bool, bool]

    @property
    def sups(self) -> Tuple[float, float, float, float]:
        return (self.sup_w, self.sup_w1, self.sup_w2, self.sup_w3)

    def to_dict(self) -> dict:
        return {
            "sup_w": self.sup_w, "sup_w1": self.sup_w1,
            "sup_w2": self.sup_w2, "sup_w3": self.sup_w3,
            "growing": list(self.growing),
        }


def audit_derivative_bounds(params: Params, traj: Trajectory) -> DerivativeBoundReport:
    """Componentwise sups over a trajectory plus a tail-growth flag."""
    if len(traj) < 5:
        raise ValueError("audit needs at least 5 trajectory states")
    y = np.abs(traj.y_array())
    t = traj.t_array()
    sups = np.max(y, axis=0)

    # final tenth of the span, in integration order; at least 5 samples
    span = abs(t[-1] - t[0])
    cut = abs(t - t[0]) >= 0.9 * span
    if int(cut.sum()) < 5:
        cut = np.zeros_like(cut)
        cut[-5:] = True
    tail = y[cut]
    growing = tuple(bool(np.all(np.diff(tail[:, c]) > 0)) for c in range(4))

    return DerivativeBoundReport(sup_w=float(sups[0]), sup_w1=float(sups[1]),
                                 sup_w2=float(sups[2]), sup_w3=float(sups[3]),
                                 growing=growing)
