"""Radial dynamics in log-radial coordinates.

The transformed radial equation is the autonomous fourth-order ODE

    w'''' + K3 w''' + K2 w'' + K1 w' + K0 w = w^p,

integrated here as a first-order 4-vector system with an embedded
Dormand-Prince 5(4) pair and PI step-size control.  Constant states are
w = 0 and w = K0^(1/(p-1)); their linearizations are governed by the
characteristic quartic and its shift by p*K0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .coeffs import (
    Params,
    characteristic_polynomial,
    compute_coefficients,
    zero_state_roots,
)

Vec4 = Tuple[float, float, float, float]

_INF = float("inf")


class IntegrationError(RuntimeError):
    """Resource limits exhausted before any defined termination fired."""


class Termination(str, enum.Enum):
    REACHED_END = "reached_end"
    DIVERGED = "diverged"           # w exceeded W_max
    WENT_NEGATIVE = "went_negative"  # w sign change, bisected in t
    STEP_UNDERFLOW = "step_underflow"


class EquilibriumKind(str, enum.Enum):
    ZERO = "zero"
    CONSTANT = "constant"


@dataclass(frozen=True)
class State:
    """Point on a trajectory: log-radius t and y = (w, w', w'', w''')."""

    t: float
    y: Vec4

    def __post_init__(self):
        y = tuple(float(v) for v in self.y)
        if len(y) != 4:
            raise ValueError("state vector must have 4 components")
        if not all(math.isfinite(v) for v in y) or not math.isfinite(self.t):
            raise ValueError("state must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", float(self.t))

    @property
    def w(self) -> float:
        return self.y[0]


@dataclass(frozen=True)
class IntegrateOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    w_max: float = 1e6
    max_steps: int = 1_000_000
    h_max: float = _INF   # cap on the step size, mostly for grid studies

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("rtol and atol must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Accepted integration steps in integration order (monotone t)."""

    params: Params
    states: List[State]
    termination: Termination
    steps: int
    rejected_steps: int

    def __post_init__(self):
        if not self.states:
            raise ValueError("trajectory must contain at least one state")
        ts = [s.t for s in self.states]
        diffs = [b - a for a, b in zip(ts, ts[1:])]
        if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ValueError("trajectory t values must be strictly monotone")

    def t_array(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def y_array(self) -> np.ndarray:
        return np.array([s.y for s in self.states])

    def w_array(self) -> np.ndarray:
        return np.array([s.y[0] for s in self.states])

    def __len__(self) -> int:
        return len(self.states)


def _nonlinear_power(w: float, p: float) -> float:
    """w^p for w >= 0, inf on overflow; 0 for w < 0.

    The zero continuation below the axis keeps trial Runge-Kutta stages
    finite when a step pokes past a sign change of w; the driver then
    detects the negative endpoint and bisects the crossing, so the
    continuation never influences an accepted sample with w >= 0.
    """
    if w > 0.0:
        try:
            return w**p
        except OverflowError:
            return _INF
    return 0.0


def make_rhs(params: Params) -> Callable[[Vec4], Vec4]:
    """Autonomous right-hand side with coefficients baked in as floats."""
    K0, K1, K2, K3, _ = compute_coefficients(params).floats()
    p = float(params.p)

    def f(y: Vec4) -> Vec4:
        w, w1, w2, w3 = y
        wp = _nonlinear_power(w, p)
        return (w1, w2, w3, wp - K3 * w3 - K2 * w2 - K1 * w1 - K0 * w)

    return f


def rhs(params: Params, state: State) -> Vec4:
    """Derivative vector (w', w'', w''', w^p - K3 w''' - ... - K0 w).

    Rejects w < 0: the power nonlinearity is undefined there for
    non-integer p and the model only concerns nonnegative solutions.
    """
    if state.y[0] < 0:
        raise ValueError("rhs requires w >= 0")
    return make_rhs(params)(state.y)


# Dormand-Prince 5(4) tableau (A rows, 5th-order b row, b5-b4 error
# row).  The 5th-order solution propagates; FSAL.  Stage abscissae are
# not needed: the systems integrated here are autonomous.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _dp_step(f, y: Vec4, h: float, k1: Vec4):
    """One Dormand-Prince step: (y_new, error_vector, k7)."""
    ks = [k1]
    for i in range(1, 7):
        a = _A[i]
        yi = list(y)
        for j, aij in enumerate(a):
            if aij != 0.0:
                kj = ks[j]
                for c in range(4):
                    yi[c] += h * aij * kj[c]
        ks.append(f(tuple(yi)))
    y_new = tuple(y[c] + h * (_B[0] * ks[0][c] + _B[2] * ks[2][c] + _B[3] * ks[3][c]
                              + _B[4] * ks[4][c] + _B[5] * ks[5][c])
                  for c in range(4))
    err = tuple(h * (_E[0] * ks[0][c] + _E[2] * ks[2][c] + _E[3] * ks[3][c]
                     + _E[4] * ks[4][c] + _E[5] * ks[5][c] + _E[6] * ks[6][c])
                for c in range(4))
    return y_new, err, ks[6]


def _error_norm(err: Vec4, y0: Vec4, y1: Vec4, rtol: float, atol: float) -> float:
    acc = 0.0
    for c in range(4):
        sc = atol + rtol * max(abs(y0[c]), abs(y1[c]))
        e = err[c] / sc
        if not math.isfinite(e):
            return _INF
        acc += e * e
    return math.sqrt(acc / 4.0)


def _initial_step(f, y0: Vec4, span: float, rtol: float, atol: float) -> float:
    f0 = f(y0)
    d0 = math.sqrt(sum((y / (atol + rtol * abs(y))) ** 2 for y in y0) / 4.0)
    d1 = math.sqrt(sum((v / (atol + rtol * abs(y))) ** 2
                       for v, y in zip(f0, y0)) / 4.0)
    if d1 > 0 and math.isfinite(d1):
        h0 = 0.01 * max(d0, 1e-5) / d1
    else:
        h0 = span / 100.0
    return min(h0, span)


def _solve(f, y0: Vec4, span: float, opts: IntegrateOptions,
           stop_on_negative_w: bool):
    """Drive tau from 0 to span > 0.  Returns (taus, ys, termination, stats)."""
    rtol, atol = opts.rtol, opts.atol
    h_floor = 1e-14 * span
    taus = [0.0]
    ys = [y0]
    tau = 0.0
    y = y0
    k1 = f(y)
    h = max(min(_initial_step(f, y0, span, rtol, atol), opts.h_max), h_floor)
    err_old = 1e-4
    accepted = 0
    rejected = 0
    termination = None

    while True:
        if tau >= span:
            termination = Termination.REACHED_END
            break
        if accepted + rejected >= opts.max_steps:
            raise IntegrationError(
                f"exceeded max_steps={opts.max_steps} at t-offset {tau}")
        h = min(h, opts.h_max)
        is_last = h >= span - tau
        if is_last:
            h = span - tau
        elif h < h_floor:
            termination = Termination.STEP_UNDERFLOW
            break

        y_new, err_vec, k7 = _dp_step(f, y, h, k1)
        err = _error_norm(err_vec, y, y_new, rtol, atol)

        if err > 1.0:
            rejected += 1
            fac = max(0.2, 0.9 * err**-0.2) if math.isfinite(err) else 0.2
            h *= fac
            continue

        if stop_on_negative_w and y_new[0] < 0.0:
            # locate the sign change: bisect the step size from the last
            # accepted state down to 1e-10 in t, keep the w >= 0 side
            lo, hi = 0.0, h
            y_lo = y
            while hi - lo > 1e-10:
                mid = 0.5 * (lo + hi)
                y_mid, _, _ = _dp_step(f, y, mid, k1)
                if y_mid[0] >= 0.0 and math.isfinite(y_mid[0]):
                    lo, y_lo = mid, y_mid
                else:
                    hi = mid
            if lo > 0.0:
                tau += lo
                y = y_lo
                taus.append(tau)
                ys.append(y)
                accepted += 1
            termination = Termination.WENT_NEGATIVE
            break

        tau = span if is_last else tau + h
        y = y_new
        k1 = k7  # FSAL
        taus.append(tau)
        ys.append(y)
        accepted += 1

        if y[0] > opts.w_max:
            termination = Termination.DIVERGED
            break

        if err == 0.0:
            fac = 5.0
        else:
            fac = 0.9 * err**-0.17 * err_old**0.04
            fac = min(5.0, max(0.2, fac))
        h *= fac
        err_old = max(err, 1e-10)

    return taus, ys, termination, accepted, rejected


def integrate(params: Params, initial: State, t_end: float,
              options: Optional[IntegrateOptions] = None) -> Trajectory:
    """Integrate from ``initial`` to t_end (either direction).

    Backward runs substitute s = -t internally so a single forward code
    path serves both directions.  Terminations: ReachedEnd, Diverged
    (w > W_max), WentNegative (w sign change, crossing bisected to 1e-10
    in t), StepUnderflow (step below 1e-14 of the span).
    """
    params.require_monotonicity_window("integrate")
    opts = options or IntegrateOptions()
    if initial.y[0] < 0:
        raise ValueError("initial state must have w >= 0")
    if t_end == initial.t:
        raise ValueError("t_end must differ from the initial t")

    f = make_rhs(params)
    direction = 1.0 if t_end > initial.t else -1.0
    if direction < 0:
        base = f
        f = lambda y: tuple(-v for v in base(y))
    span = abs(t_end - initial.t)

    taus, ys, termination, accepted, rejected = _solve(
        f, initial.y, span, opts, stop_on_negative_w=True)

    states = [State(t=initial.t + direction * tau, y=y) for tau, y in zip(taus, ys)]
    return Trajectory(params=params, states=states, termination=termination,
                      steps=accepted, rejected_steps=rejected)


def solve_rk45(f: Callable[[Vec4], Vec4], y0: Vec4, span: float,
               rtol: float = 1e-10, atol: float = 1e-12,
               max_steps: int = 1_000_000, h_max: float = _INF):
    """Generic driver over the same engine, for external right-hand sides.

    Integrates an autonomous 4-vector system over [0, span] and returns
    (offsets, states, termination, accepted, rejected).  No w-sign or
    divergence events.
    """
    if span <= 0:
        raise ValueError("span must be positive")
    opts = IntegrateOptions(rtol=rtol, atol=atol, w_max=_INF,
                            max_steps=max_steps, h_max=h_max)
    taus, ys, termination, accepted, rejected = _solve(
        f, tuple(float(v) for v in y0), span, opts, stop_on_negative_w=False)
    return np.array(taus), np.array(ys), termination, accepted, rejected


@dataclass(frozen=True)
class EquilibriumSpectrum:
    """Four linearization roots at a constant state.

    ``roots_exact`` carries the closed-form rational roots for the zero
    state when p is rational; the float ``roots`` are always present.
    """

    params: Params
    kind: EquilibriumKind
    w_eq: float
    roots: Tuple[complex, complex, complex, complex]
    roots_exact: Optional[Tuple[Fraction, ...]] = None


def _newton_polish(coeffs_desc: Sequence[float], z: complex) -> complex:
    val = 0j
    for c in coeffs_desc:
        val = val * z + c
    der = 0j
    k = len(coeffs_desc) - 1
    for i, c in enumerate(coeffs_desc[:-1]):
        der = der * z + (k - i) * c
    if der != 0:
        z = z - val / der
    return z


def equilibrium_spectrum(params: Params, which: EquilibriumKind) -> EquilibriumSpectrum:
    """Linearization roots at w = 0 or w = K0^(1/(p-1)).

    Zero state: the characteristic quartic factors in closed form with
    roots {a, a+2, a+2-n, a+4-n}, a = 4/(p-1); returned exactly for
    rational p after an exact verification against the quartic.
    Constant state: roots of P(m) - p*K0 via companion-matrix
    eigenvalues plus one Newton polish per root; each root's residual is
    checked against 1e-8 * max(1, |K0|).
    """
    params.require_monotonicity_window("equilibrium_spectrum")
    cs = compute_coefficients(params)
    P = characteristic_polynomial(cs)

    if which == EquilibriumKind.ZERO:
        roots = zero_state_roots(params)
        exact = None
        if isinstance(params.p, Fraction):
            for r in roots:
                if P(r) != 0:
                    raise ArithmeticError(
                        f"closed-form root {r} fails the quartic at {params}")
            exact = tuple(roots)
        croots = tuple(complex(float(r)) for r in roots)
        return EquilibriumSpectrum(params=params, kind=which, w_eq=0.0,
                                   roots=croots, roots_exact=exact)

    w_eq = float(cs.C_pn) if cs.C_pn is not None else 0.0
    shift = float(params.p) * float(cs.K0)
    coeffs_desc = list(P.float_coefficients())
    coeffs_desc[4] -= shift
    raw = np.roots(coeffs_desc)
    polished = tuple(sorted((_newton_polish(coeffs_desc, complex(z)) for z in raw),
                            key=lambda z: (z.real, z.imag)))
    tol = 1e-8 * max(1.0, abs(float(cs.K0)))
    for z in polished:
        residual = abs(complex(P(z)) - shift)
        if residual > tol:
            raise ArithmeticError(
                f"spectrum root {z} residual {residual} exceeds {tol}")
    return EquilibriumSpectrum(params=params, kind=which, w_eq=w_eq,
                               roots=polished, roots_exact=None)


def _ulp_shift(x: float, k: int) -> float:
    for _ in range(abs(k)):
        x = math.nextafter(x, _INF if k > 0 else -_INF)
    return x


def equilibrium_state(params: Params, which: EquilibriumKind = EquilibriumKind.CONSTANT,
                      t: float = 0.0) -> State:
    """The constant state as a float fixed point of the discrete map.

    Both constant states are saddles, so any nonzero float residual in
    the right-hand side gets amplified exponentially along a long
    integration.  The w value is therefore polished within +-64 ulps of
    K0^(1/(p-1)) to the candidate minimizing the evaluated residual,
    which is exactly zero when such a float exists (it does at many
    parameter pairs, (5, 7) included; elsewhere the minimum is ~1 ulp).
    """
    params.require_monotonicity_window("equilibrium_state")
    if which == EquilibriumKind.ZERO:
        return State(t=t, y=(0.0, 0.0, 0.0, 0.0))
    cs = compute_coefficients(params)
    if cs.C_pn is None:
        return State(t=t, y=(0.0, 0.0, 0.0, 0.0))
    f = make_rhs(params)
    w0 = float(cs.C_pn)
    best_w, best_res = w0, abs(f((w0, 0.0, 0.0, 0.0))[3])
    if best_res != 0.0:
        for k in range(1, 65):
            for cand in (_ulp_shift(w0, k), _ulp_shift(w0, -k)):
                res = abs(f((cand, 0.0, 0.0, 0.0))[3])
                if res < best_res:
                    best_w, best_res = cand, res
            if best_res == 0.0:
                break
    return State(t=t, y=(best_w, 0.0, 0.0, 0.0))


def shoot_regular(params: Params, u0: float, t_start: float, t_end: float,
                  options: Optional[IntegrateOptions] = None) -> Trajectory:
    """Shoot from the slow manifold of a solution bounded at the origin.

    A solution with u(0) = u0 has w ~ u0 e^(a t) as t -> -infinity with
    a = 4/(p-1), so the integration starts on that exponential ray (all
    four components).  Requires u0 e^(a t_start) < 1e-4 so the start is
    genuinely in the linear regime.
    """
    params.require_monotonicity_window("shoot_regular")
    if u0 < 0:
        raise ValueError("u0 must be nonnegative")
    a = float(params.growth_exponent)
    w0 = u0 * math.exp(a * t_start)
    if not w0 < 1e-4:
        raise ValueError(
            f"slow-manifold start needs u0*e^(a*t_start) < 1e-4, got {w0}")
    initial = State(t=t_start, y=(w0, a * w0, a * a * w0, a**3 * w0))
    return integrate(params, initial, t_end, options)


def fitted_growth_rate(traj: Trajectory, t_lo: float, t_hi: float) -> float:
    """Least-squares slope of ln w versus t over [t_lo, t_hi]."""
    t = traj.t_array()
    w = traj.w_array()
    mask = (t >= t_lo) & (t <= t_hi) & (w > 0)
    if int(mask.sum()) < 5:
        raise ValueError("need at least 5 positive samples in the fit window")
    slope, _ = np.polyfit(t[mask], np.log(w[mask]), 1)
    return float(slope)
