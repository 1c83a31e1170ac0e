"""The monotone energy along radial trajectories.

For radial w the functional reduces to

    E(t) = omega * [ w''' w' - (w'')^2 / 2 + K3 w'' w' + K2 (w')^2 / 2
                     + K0 w^2 / 2 - w^(p+1) / (p+1) ],

omega = |S^(n-1)|, and along solutions

    dE/dt = omega * [ K3 (w'')^2 - K1 (w')^2 ],

which is nonpositive because K3 < 0 and K1 > 0.  Its limits as
t -> -infinity can only be 0 or the value at the positive constant
state, and that dichotomy is what the classifier leans on.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

import numpy as np

from .coeffs import Params, compute_coefficients
from .ode import State, Trajectory
from .transform import (
    RadialFunction,
    RadialProfile,
    ef_state_from_radial,
    ef_state_from_samples,
    scale,
    scale_function,
    to_ef,
)


@functools.lru_cache(maxsize=64)
def sphere_measure(n: int) -> float:
    """|S^(n-1)| = 2 pi^(n/2) / Gamma(n/2) via half-integer closed forms.

    Gamma(k) = (k-1)! and Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!), so
    the measure is an exact rational multiple of pi^(n//2) in both
    parities.
    """
    if n < 2:
        raise ValueError("sphere measure needs n >= 2")
    k = n // 2
    if n % 2 == 0:
        coef = Fraction(2, math.factorial(k - 1))
    else:
        coef = Fraction(2 * 4**k * math.factorial(k), math.factorial(2 * k))
    return float(coef) * math.pi**k


def energy_at(params: Params, state: State) -> float:
    """Energy of a single radial state (w, w', w'', w''')."""
    params.require_monotonicity_window("energy_at")
    w, w1, w2, w3 = state.y
    if w < 0:
        raise ValueError("energy is defined for w >= 0")
    K0, K1, K2, K3, _ = compute_coefficients(params).floats()
    p = float(params.p)
    om = sphere_measure(params.n)
    return om * (w3 * w1 - 0.5 * w2 * w2 + K3 * w2 * w1 + 0.5 * K2 * w1 * w1
                 + 0.5 * K0 * w * w - w**(p + 1) / (p + 1))


def energy_rate(params: Params, state: State) -> float:
    """Right side of the derivative identity: omega (K3 w''^2 - K1 w'^2)."""
    params.require_monotonicity_window("energy_rate")
    _, K1, _, K3, _ = compute_coefficients(params).floats()
    _, w1, w2, _ = state.y
    return sphere_measure(params.n) * (K3 * w2 * w2 - K1 * w1 * w1)


@dataclass(frozen=True)
class EnergyLevels:
    """The two admissible limits of E as t -> -infinity."""

    params: Params
    level_zero: float
    level_singular: float


def energy_levels(params: Params) -> EnergyLevels:
    """level_zero = 0 and level_singular = (1/2 - 1/(p+1)) K0^((p+1)/(p-1)) omega."""
    params.require_monotonicity_window("energy_levels")
    cs = compute_coefficients(params)
    K0 = float(cs.K0)
    if isinstance(params.p, Fraction):
        factor = float(Fraction(1, 2) - Fraction(1, params.p + 1))
        expo = float(Fraction(params.p + 1, 1) / (params.p - 1))
    else:
        factor = 0.5 - 1.0 / (params.p + 1.0)
        expo = (params.p + 1.0) / (params.p - 1.0)
    level = factor * K0**expo * sphere_measure(params.n) if K0 > 0 else 0.0
    return EnergyLevels(params=params, level_zero=0.0, level_singular=level)


@dataclass(frozen=True)
class EnergyRecord:
    """One trajectory sample: E and the two dE/dt estimates.

    dE_numeric uses the 3-point nonuniform centered stencil at interior
    samples and a one-sided difference at the two endpoints (endpoints
    are excluded from the identity statistic).
    """

    t: float
    E: float
    dE_formula: float
    dE_numeric: float


@dataclass(frozen=True)
class MonotonicityAudit:
    """Verdict of the energy audit over one trajectory.

    ``monotone``: E never increases beyond slack * (1 + |E|) per unit t.
    ``max_violation``: largest signed per-unit-t increase of E relative
    to (1 + |E|); nonpositive when the energy is cleanly decreasing.
    ``median_identity_gap``: median |dE_formula - dE_numeric| over
    interior samples.
    """

    params: Params
    records: List[EnergyRecord]
    monotone: bool
    max_violation: float
    median_identity_gap: float
    identity_ok: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "monotone": self.monotone,
            "max_violation": self.max_violation,
            "median_identity_gap": self.median_identity_gap,
        }


def _centered_derivative(t: np.ndarray, e: np.ndarray) -> np.ndarray:
    """d e / d t on a nonuniform grid; one-sided at the endpoints."""
    n = t.size
    d = np.empty(n)
    d[0] = (e[1] - e[0]) / (t[1] - t[0])
    d[-1] = (e[-1] - e[-2]) / (t[-1] - t[-2])
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    d[1:-1] = (-h2 / (h1 * (h1 + h2)) * e[:-2]
               + (h2 - h1) / (h1 * h2) * e[1:-1]
               + h1 / (h2 * (h1 + h2)) * e[2:])
    return d


def audit_monotonicity(params: Params, traj: Trajectory,
                       slack: float = 1e-6,
                       identity_rtol: float = 1e-4) -> MonotonicityAudit:
    """Evaluate E along a trajectory and check the monotonicity formula.

    PASS requires (a) E non-increasing in t up to slack * (1 + |E|) per
    unit t and (b) the median gap between the formula and numeric dE/dt
    at interior samples below identity_rtol * (1 + median |dE_formula|).
    Trajectories with fewer than 5 states are rejected.
    """
    params.require_monotonicity_window("audit_monotonicity")
    if len(traj) < 5:
        raise ValueError("audit needs at least 5 trajectory states")

    states = sorted(traj.states, key=lambda s: s.t)
    t = np.array([s.t for s in states])
    if np.any(np.diff(t) <= 0):
        raise ValueError("trajectory samples must have distinct t")
    if any(s.y[0] < 0 for s in states):
        raise ValueError("audit requires w >= 0 along the trajectory")

    e = np.array([energy_at(params, s) for s in states])
    formula = np.array([energy_rate(params, s) for s in states])
    numeric = _centered_derivative(t, e)

    records = [EnergyRecord(t=float(tv), E=float(ev), dE_formula=float(fv),
                            dE_numeric=float(nv))
               for tv, ev, fv, nv in zip(t, e, formula, numeric)]

    dt = np.diff(t)
    rise = (e[1:] - e[:-1]) / (dt * (1.0 + np.abs(e[:-1])))
    max_violation = float(np.max(rise))
    monotone = max_violation <= slack

    gap = np.abs(formula[1:-1] - numeric[1:-1])
    median_gap = float(np.median(gap))
    identity_ok = median_gap <= identity_rtol * (1.0 + float(np.median(np.abs(formula[1:-1]))))

    return MonotonicityAudit(params=params, records=records, monotone=monotone,
                             max_violation=max_violation,
                             median_identity_gap=median_gap,
                             identity_ok=identity_ok,
                             passed=monotone and identity_ok)


@dataclass(frozen=True)
class ScalingCheck:
    """Both sides of the blow-up invariance E(r; u_lam) = E(lam r; u)."""

    value_scaled: float
    value_base: float
    rel_gap: float
    tol: float
    passed: bool


def scaling_invariance_check(params: Params,
                             source: Union[RadialProfile, RadialFunction],
                             lam: float, r_probe: float,
                             tol: Optional[float] = None) -> ScalingCheck:
    """Compare E(r_probe; u_lam) with E(lam r_probe; u).

    The scaled side is evaluated on the actually rescaled profile (or the
    rescaled analytic function), never by shortcutting through the
    translation identity being tested.  Default tolerance: 1e-6 with
    analytic derivatives, 1e-3 for sampled profiles (finite-difference
    state estimation).
    """
    params.require_monotonicity_window("scaling_invariance_check")
    if not (lam > 0 and r_probe > 0):
        raise ValueError("lambda and r_probe must be positive")
    t_scaled = math.log(r_probe)
    t_base = math.log(lam * r_probe)

    if isinstance(source, RadialFunction):
        if not source.has_derivatives:
            raise ValueError("analytic mode needs u', u'', u'''")
        tol = 1e-6 if tol is None else tol
        y_scaled = ef_state_from_radial(params, scale_function(source, lam, params), t_scaled)
        y_base = ef_state_from_radial(params, source, t_base)
    else:
        tol = 1e-3 if tol is None else tol
        ef_base = to_ef(source)
        ef_scaled = to_ef(scale(source, lam))
        y_scaled = ef_state_from_samples(ef_scaled, t_scaled)
        y_base = ef_state_from_samples(ef_base, t_base)

    e_scaled = energy_at(params, State(t=t_scaled, y=y_scaled))
    e_base = energy_at(params, State(t=t_base, y=y_base))
    denom = max(abs(e_scaled), abs(e_base))
    rel_gap = 0.0 if denom == 0 else abs(e_scaled - e_base) / denom
    return ScalingCheck(value_scaled=e_scaled, value_base=e_base,
                        rel_gap=rel_gap, tol=tol, passed=rel_gap <= tol)
