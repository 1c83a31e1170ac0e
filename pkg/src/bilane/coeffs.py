"""Transform coefficients for the biharmonic Lane-Emden equation.

The radial equation (Laplacian squared of u equals u^p) rewritten in
log-radial coordinates t = ln r, w = r^(4/(p-1)) u carries five constant
coefficients K0, K1, K2, K3, J1 depending only on (n, p).  This module
evaluates them exactly (arbitrary-precision rationals whenever p is
rational), builds the characteristic quartic of the transformed ODE, and
checks the separable-symbol identity that ties the radial and angular
coefficients to the plain bilaplacian acting on r-powers times spherical
harmonics.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence, Tuple, Union

Scalar = Union[Fraction, float]


class SignLemmaError(ArithmeticError):
    """A coefficient sign contradicts the guaranteed sign pattern.

    Inside the subcritical window K0 > 0, K1 > 0, K3 < 0 and J1 < 0 hold
    identically, so this exception signals an implementation bug, not a
    user error.
    """


def _as_exact(value) -> Scalar:
    """Normalize a numeric input: rationals become Fraction, floats stay."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a valid exponent")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise TypeError(f"unsupported numeric type {type(value).__name__}")


def _sign(x: Scalar) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Params:
    """Problem parameters: spatial dimension n and nonlinearity exponent p.

    ``strict=True`` enforces the subcritical window
    n/(n-4) < p < (n+4)/(n-4) with n >= 5 (open interval, compared
    exactly when p is rational).  Non-strict params only require p > 1
    and are meant for endpoint/degeneracy studies of the coefficients.
    """

    n: int
    p: Scalar
    strict: bool = True

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise TypeError("n must be an integer")
        if self.n < 1:
            raise ValueError("n must be positive")
        object.__setattr__(self, "p", _as_exact(self.p))
        if isinstance(self.p, float) and not (self.p == self.p and abs(self.p) != float("inf")):
            raise ValueError("p must be finite")
        if not self.p > 1:
            raise ValueError(f"p must exceed 1 (got p={self.p})")
        if self.strict:
            if self.n < 5:
                raise ValueError("strict params require n >= 5")
            lo, hi = self.window()
            if not (lo < self.p < hi):
                raise ValueError(
                    f"strict params require {lo} < p < {hi} (open window), got p={self.p}"
                )

    def window(self) -> Tuple[Fraction, Fraction]:
        """Subcritical window (n/(n-4), (n+4)/(n-4)); needs n >= 5."""
        if self.n < 5:
            raise ValueError("window is defined for n >= 5 only")
        return Fraction(self.n, self.n - 4), Fraction(self.n + 4, self.n - 4)

    @property
    def growth_exponent(self) -> Scalar:
        """The exponent a = 4/(p-1) of the forward blow-up profile."""
        if isinstance(self.p, Fraction):
            return Fraction(4) / (self.p - 1)
        return 4.0 / (self.p - 1.0)

    @property
    def gamma0(self) -> Scalar:
        """gamma0 = -4/(p-1), the power of the exact singular solution."""
        return -self.growth_exponent

    def in_monotonicity_window(self) -> bool:
        """True when n >= 5 and n/(n-4) <= p < (n+4)/(n-4).

        The left-closed window is the regime where K1 > 0 and K3 < 0
        (hence the energy is monotone); at the left endpoint K0 = 0 and
        the two constant states merge.
        """
        if self.n < 5:
            return False
        lo, hi = self.window()
        return lo <= self.p < hi

    def require_monotonicity_window(self, what: str) -> None:
        if not self.in_monotonicity_window():
            raise ValueError(
                f"{what} requires n >= 5 and n/(n-4) <= p < (n+4)/(n-4); "
                f"got n={self.n}, p={self.p}"
            )


@dataclass(frozen=True)
class CoefficientSet:
    """The five transform coefficients plus derived quantities.

    Values are exact rationals when params.p is rational, floats
    otherwise.  ``C_pn`` is the positive singular limit K0^(1/(p-1)),
    unset when K0 <= 0 (left endpoint and below).
    """

    params: Params
    K0: Scalar
    K1: Scalar
    K2: Scalar
    K3: Scalar
    J1: Scalar
    gamma0: Scalar
    C_pn: Optional[float]

    def floats(self) -> Tuple[float, float, float, float, float]:
        """(K0, K1, K2, K3, J1) as floats."""
        return (float(self.K0), float(self.K1), float(self.K2),
                float(self.K3), float(self.J1))

    def to_dict(self, exact: bool = False) -> dict:
        def fmt(v: Scalar):
            if exact and isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            return float(v)

        return {
            "n": self.params.n,
            "p": fmt(self.params.p) if isinstance(self.params.p, Fraction) else self.params.p,
            "K0": fmt(self.K0),
            "K1": fmt(self.K1),
            "K2": fmt(self.K2),
            "K3": fmt(self.K3),
            "J1": fmt(self.J1),
            "gamma0": fmt(self.gamma0),
            "C_pn": self.C_pn,
        }


@functools.lru_cache(maxsize=256)
def compute_coefficients(params: Params) -> CoefficientSet:
    """Evaluate K0..K3, J1 from their closed forms in (n, p).

    Exact when p is rational.  Valid for any p > 1; the subcritical
    window is not required, so endpoint degeneracies (K1 = K3 = 0 at the
    critical exponent, K0 = 0 at the left endpoint) can be probed.
    Results are cached (Params is frozen and hashable; the returned set
    is immutable).
    """
    n = params.n
    s = params.p - 1  # s = p - 1, positive
    q2 = n * n - 10 * n + 20
    n4 = n - 4
    if isinstance(s, Fraction):
        eight, two, one = Fraction(8), Fraction(2), Fraction(1)
    else:
        eight, two, one = 8.0, 2.0, 1.0

    K0 = eight / s**4 * ((n - 2) * n4 * s**3 + 2 * q2 * s**2 - 16 * n4 * s + 32)
    K1 = -two / s**3 * ((n - 2) * n4 * s**3 + 4 * q2 * s**2 - 48 * n4 * s + 128)
    K2 = one / s**2 * (q2 * s**2 - 24 * n4 * s + 96)
    K3 = two / s * (n4 * s - 8)
    J1 = -two / s**2 * (n4 * s**2 + 4 * n4 * s - 16)

    C_pn = float(K0) ** (1.0 / float(s)) if K0 > 0 else None
    return CoefficientSet(params=params, K0=K0, K1=K1, K2=K2, K3=K3, J1=J1,
                          gamma0=params.gamma0, C_pn=C_pn)


@dataclass(frozen=True)
class SignReport:
    """Exact signs of the coefficients at strict params (-1, 0 or +1).

    sign_K2 is informational only: its sign genuinely varies over the
    window and nothing is asserted about it.
    """

    params: Params
    sign_K0: int
    sign_K1: int
    sign_K2: int
    sign_K3: int
    sign_J1: int

    def to_dict(self) -> dict:
        return {
            "n": self.params.n,
            "p": str(self.params.p),
            "sign_K0": self.sign_K0,
            "sign_K1": self.sign_K1,
            "sign_K2": self.sign_K2,
            "sign_K3": self.sign_K3,
            "sign_J1": self.sign_J1,
        }


def sign_report(params: Params) -> SignReport:
    """Exact coefficient signs; raises SignLemmaError on a contradiction.

    Inside the open window the pattern (K0, K1, K3, J1) = (+, +, -, -)
    is guaranteed; any deviation means the coefficient formulas are
    wrong.  Non-strict params are rejected.
    """
    if not params.strict:
        raise ValueError("sign_report requires strict params (open window)")
    cs = compute_coefficients(params)
    rep = SignReport(params=params,
                     sign_K0=_sign(cs.K0), sign_K1=_sign(cs.K1),
                     sign_K2=_sign(cs.K2), sign_K3=_sign(cs.K3),
                     sign_J1=_sign(cs.J1))
    if not (rep.sign_K0 > 0 and rep.sign_K1 > 0 and rep.sign_K3 < 0 and rep.sign_J1 < 0):
        raise SignLemmaError(
            f"sign pattern violated at n={params.n}, p={params.p}: "
            f"K0={cs.K0}, K1={cs.K1}, K3={cs.K3}, J1={cs.J1}"
        )
    return rep


@dataclass(frozen=True)
class QuarticPolynomial:
    """Monic quartic a4*m^4 + a3*m^3 + a2*m^2 + a1*m + a0 with a4 = 1."""

    a4: Scalar
    a3: Scalar
    a2: Scalar
    a1: Scalar
    a0: Scalar

    def __post_init__(self):
        if self.a4 != 1:
            raise ValueError("quartic must be monic (a4 = 1)")

    @property
    def coefficients(self) -> Tuple[Scalar, Scalar, Scalar, Scalar, Scalar]:
        """(a4, a3, a2, a1, a0), highest degree first."""
        return (self.a4, self.a3, self.a2, self.a1, self.a0)

    def __call__(self, m):
        return (((self.a4 * m + self.a3) * m + self.a2) * m + self.a1) * m + self.a0

    def derivative(self, m):
        return ((4 * self.a4 * m + 3 * self.a3) * m + 2 * self.a2) * m + self.a1

    def float_coefficients(self) -> Tuple[float, float, float, float, float]:
        return tuple(float(c) for c in self.coefficients)

    def shifted_by(self, offset: Scalar) -> "QuarticPolynomial":
        """The quartic m -> self(m + offset), expanded exactly."""
        a4, a3, a2, a1, a0 = self.coefficients
        d = offset
        return QuarticPolynomial(
            a4=a4,
            a3=a3 + 4 * d,
            a2=a2 + 3 * a3 * d + 6 * d**2,
            a1=a1 + 2 * a2 * d + 3 * a3 * d**2 + 4 * d**3,
            a0=a0 + a1 * d + a2 * d**2 + a3 * d**3 + d**4,
        )

    @staticmethod
    def from_roots(roots: Sequence[Scalar]) -> "QuarticPolynomial":
        """Monic expansion of prod (m - r_i); exact for rational roots."""
        if len(roots) != 4:
            raise ValueError("need exactly 4 roots")
        coeffs = [1]
        for r in roots:
            coeffs = [c for c in coeffs] + [0]
            for i in range(len(coeffs) - 1, 0, -1):
                coeffs[i] = coeffs[i] - r * coeffs[i - 1]
        return QuarticPolynomial(*coeffs)


def characteristic_polynomial(cs: CoefficientSet) -> QuarticPolynomial:
    """P(m) = m^4 + K3 m^3 + K2 m^2 + K1 m + K0 of the radial ODE.

    Roots of P govern the exponential modes e^(m t) of the linearization
    at the zero state; P(m + gamma0) factors as the r-power symbol
    gamma(gamma-2)(gamma+n-2)(gamma+n-4) evaluated at gamma = m + gamma0.
    """
    one = Fraction(1) if isinstance(cs.K0, Fraction) else 1.0
    return QuarticPolynomial(one, cs.K3, cs.K2, cs.K1, cs.K0)


def zero_state_roots(params: Params) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
    """Closed-form root set of P: {a, a+2, a+2-n, a+4-n} with a = 4/(p-1)."""
    a = params.growth_exponent
    n = params.n
    return (a, a + 2, a + 2 - n, a + 4 - n)


def sphere_eigenvalue(k: int, n: int) -> int:
    """Spherical-harmonic eigenvalue lambda_k = k (k + n - 2) on S^(n-1)."""
    if k < 0:
        raise ValueError("degree k must be nonnegative")
    return k * (k + n - 2)


def symbol_value(cs: CoefficientSet, m: Scalar, mu: Scalar) -> Scalar:
    """S(m, mu) = P(m) + mu^2 + 2 m^2 mu + K3 m mu + J1 mu.

    The full transformed operator acting on e^(m t) Y(theta) with
    Laplace-Beltrami eigenvalue mu = -lambda_k.
    """
    P = characteristic_polynomial(cs)
    return P(m) + mu * mu + 2 * m * m * mu + cs.K3 * m * mu + cs.J1 * mu


def bilaplacian_symbol(params: Params, m: Scalar, k: int) -> Scalar:
    """Independent route: bilaplacian on r^sigma Y_k, sigma = m + gamma0.

    Composing the Laplacian identity
    Lap(r^s Y_k) = (s(s+n-2) - lambda_k) r^(s-2) Y_k
    with itself gives the factorized quartic symbol below.
    """
    n = params.n
    lam = sphere_eigenvalue(k, n)
    sigma = m + params.gamma0
    return (sigma * (sigma + n - 2) - lam) * ((sigma - 2) * (sigma + n - 4) - lam)


@dataclass(frozen=True)
class SymbolCheckReport:
    """Outcome of the separable-symbol identity check."""

    params: Params
    trials: int
    checks: int
    ok: bool
    # first counterexample (m, k, lhs, rhs), None when all checks passed
    counterexample: Optional[Tuple[Scalar, int, Scalar, Scalar]]

    def __str__(self) -> str:
        if self.ok:
            return f"{self.trials}/{self.trials} exact ({self.checks} checks)"
        m, k, lhs, rhs = self.counterexample
        return (f"SYMBOL IDENTITY VIOLATED at n={self.params.n}, p={self.params.p}: "
                f"m={m}, k={k}, lhs={lhs}, rhs={rhs}")


def verify_symbol_identity(params: Params, trials: int = 32, seed: int = 0) -> SymbolCheckReport:
    """Check S(m, -lambda_k) against the composed-bilaplacian factorization.

    Draws ``trials`` random rational m and tests degrees k in {0, 1, 2, 3}
    (S is quadratic in mu, so three distinct eigenvalues already determine
    it; four give one redundant check).  Exact rational comparison when p
    is rational; floats fall back to a 1e-9 relative tolerance.  The
    report carries the first counterexample, if any.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cs = compute_coefficients(params)
    exact = isinstance(params.p, Fraction)
    rng = random.Random(seed)
    checks = 0
    for _ in range(trials):
        m: Scalar = Fraction(rng.randint(-24, 24), rng.randint(1, 12))
        if not exact:
            m = float(m)
        for k in range(4):
            lhs = symbol_value(cs, m, -sphere_eigenvalue(k, params.n))
            rhs = bilaplacian_symbol(params, m, k)
            checks += 1
            if exact:
                equal = lhs == rhs
            else:
                equal = abs(lhs - rhs) <= 1e-9 * (1.0 + abs(rhs))
            if not equal:
                return SymbolCheckReport(params=params, trials=trials, checks=checks,
                                         ok=False, counterexample=(m, k, lhs, rhs))
    return SymbolCheckReport(params=params, trials=trials, checks=checks,
                             ok=True, counterexample=None)
