"""Three-term recurrences, closed-form coefficient families, and a
brute-force orthogonalization oracle for discrete measures.

Coefficient families are computed in exact rational arithmetic whenever the
parameters are rational (int/Fraction), so normalization identities like
a_t + b_t - c_t = 1 can be tested exactly. Float parameters fall back to
float arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .errors import EstimationError
from .spectral import DiscreteMeasure

__all__ = [
    "Recurrence",
    "GapRecurrence",
    "jacobi_general_recurrence",
    "jacobi_recurrence",
    "jacobi_gap_recurrence",
    "kesten_mckay_recurrence",
    "shift_register_omega",
    "shift_register_rate",
    "chebyshev",
    "shift_register_poly",
    "kesten_mckay_density",
    "kesten_mckay_support",
    "evaluate_recurrence",
    "evaluate_recurrence_sequence",
    "recurrence_table",
    "evaluate_gap_sequence",
    "gap_table",
    "OraclePolynomials",
    "orthogonal_from_modified_weights",
    "oracle_from_measure",
]


def _as_exact(x):
    """Fraction for rational inputs, float otherwise."""
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class Recurrence:
    """Coefficient triple driving pi_{t+1} = (a_t*lam + b_t)*pi_t - c_t*pi_{t-1}.

    a and b are defined for t >= 0, c for t >= 1. When `normalized` is True the
    encoded polynomials satisfy pi_t(1) = 1, equivalently a_0 + b_0 = 1 and
    a_t + b_t - c_t = 1 for t >= 1.
    """

    a: Callable[[int], Any]
    b: Callable[[int], Any]
    c: Callable[[int], Any]
    label: str
    normalized: bool = True


@dataclass(frozen=True)
class GapRecurrence:
    """Gap-rescaled coefficients plus the normalization sequence delta_t.

    The rescaled coefficients generate polynomials with value delta_t at 1
    rather than 1; estimates are recovered as y_t / delta_t. delta follows
    delta_{t+1} = (a_t + b_t) delta_t - c_t delta_{t-1}, delta_0 = 1.
    """

    a: Callable[[int], Any]
    b: Callable[[int], Any]
    c: Callable[[int], Any]
    base: Recurrence
    gamma: Any
    label: str
    normalized: bool = False

    def deltas(self, t_max: int) -> list:
        out = [1 if isinstance(self.gamma, Fraction) else 1.0]
        if t_max >= 1:
            out.append(self.a(0) + self.b(0))
        for t in range(1, t_max):
            out.append((self.a(t) + self.b(t)) * out[t] - self.c(t) * out[t - 1])
        return out[: t_max + 1]


def jacobi_general_recurrence(alpha, beta) -> Recurrence:
    """Recurrence of the polynomials orthogonal w.r.t. (1-x)^alpha (1+x)^beta
    on (-1, 1), normalized to take value 1 at x = 1. Requires alpha, beta > -1.
    """
    al, be = _as_exact(alpha), _as_exact(beta)
    if not (al > -1 and be > -1):
        raise ValueError("Jacobi parameters must satisfy alpha, beta > -1")

    def a(t: int):
        if t == 0:
            return (al + be + 2) / (2 * (1 + al))
        return ((2 * t + al + be + 1) * (2 * t + al + be + 2)) / (
            2 * (t + 1 + al + be) * (t + 1 + al)
        )

    def b(t: int):
        if t == 0:
            return (al - be) / (2 * (1 + al))
        return ((2 * t + al + be + 1) * (al + be) * (al - be)) / (
            2 * (t + 1 + al + be) * (t + 1 + al) * (2 * t + al + be)
        )

    def c(t: int):
        if t < 1:
            raise ValueError("c_t is defined for t >= 1")
        return (t * (t + be) * (2 * t + al + be + 2)) / (
            (t + 1 + al + be) * (2 * t + al + be) * (t + 1 + al)
        )

    return Recurrence(a=a, b=b, c=c, label=f"jacobi_general(alpha={alpha},beta={beta})")


def jacobi_recurrence(d) -> Recurrence:
    """Dimension-parameterized special case alpha = d/2, beta = 0."""
    if not (_as_exact(d) > 0):
        raise ValueError("dimension parameter d must be > 0")
    if isinstance(d, (int, Fraction)) and not isinstance(d, bool):
        alpha = Fraction(d, 2) if isinstance(d, int) else Fraction(d) / 2
    else:
        alpha = float(d) / 2.0
    rec = jacobi_general_recurrence(alpha, 0 if isinstance(alpha, Fraction) else 0.0)
    return Recurrence(a=rec.a, b=rec.b, c=rec.c, label=f"jacobi(d={d})")


def jacobi_gap_recurrence(d, gamma) -> GapRecurrence:
    """Gap-rescaled dimension-d recurrence for matrices with spectral gap gamma.

    a_t is divided by (1 - gamma/2) and b_t gains (gamma/2)/(1 - gamma/2) a_t;
    c_t is unchanged. Consumers must divide by the delta_t normalization.
    """
    gam = _as_exact(gamma)
    if not (0 < gam < 2):
        raise ValueError("gamma must lie in (0, 2)")
    base = jacobi_recurrence(d)
    if isinstance(gam, Fraction):
        fac = 1 / (1 - gam / 2)
    else:
        fac = 1.0 / (1.0 - gam / 2.0)

    def a(t: int):
        return base.a(t) * fac

    def b(t: int):
        return base.b(t) + (gam / 2) * fac * base.a(t)

    return GapRecurrence(
        a=a, b=b, c=base.c, base=base, gamma=gam,
        label=f"jacobi_gap(d={d},gamma={gamma})",
    )


def kesten_mckay_recurrence(d: int) -> Recurrence:
    """Recurrence of the polynomials orthogonal w.r.t. (1-x) times the
    spectral measure of the infinite d-regular tree, normalized to 1 at x = 1.

    b_t = 0 for t >= 1 and a_t - c_t = 1 exactly. d = 2 uses the closed-form
    limit of the general expressions (which are 0/0 at d = 2).
    """
    if not isinstance(d, int) or d < 2:
        raise ValueError("kesten_mckay_recurrence requires an integer d >= 2")

    def b(t: int):
        return Fraction(1, d + 1) if t == 0 else Fraction(0)

    if d == 2:
        def a(t: int):
            if t == 0:
                return Fraction(2, 3)
            return Fraction(2 * (2 * t + 1), 2 * t + 3)

        def c(t: int):
            if t < 1:
                raise ValueError("c_t is defined for t >= 1")
            return Fraction(2 * t - 1, 2 * t + 3)
    else:
        def a(t: int):
            if t == 0:
                return Fraction(d, d + 1)
            q = Fraction(1, (d - 1) ** (t + 1))
            return (Fraction(d, d - 1) - 2 * q) / (1 - Fraction(2, d) * q)

        def c(t: int):
            if t < 1:
                raise ValueError("c_t is defined for t >= 1")
            q = Fraction(1, (d - 1) ** (t + 1))
            return (Fraction(1, d - 1) - Fraction(2, d) * Fraction(1, (d - 1) ** t)) / (
                1 - Fraction(2, d) * q
            )

    return Recurrence(a=a, b=b, c=c, label=f"kesten_mckay(d={d})")


def shift_register_omega(gamma: float) -> float:
    """Tuned relaxation weight for the two-register iteration, given the gap.

    Algebraically equal to 2*(1 - sqrt(g*(1-g/4)))/(1-g/2)^2; evaluated as
    2/(1 + sqrt(g*(1-g/4))), which has no removable singularity at g -> 2.
    """
    if not (0 < gamma < 2):
        raise ValueError("gamma must lie in (0, 2)")
    return 2.0 / (1.0 + math.sqrt(gamma * (1.0 - gamma / 4.0)))


def shift_register_rate(gamma: float) -> float:
    """Asymptotic per-step error ratio of the tuned two-register iteration.

    Equals sqrt(omega - 1): every eigenvalue of modulus < 1 - gamma/2 decays
    at the modulus of the complex characteristic roots. Valid when the
    non-unit spectrum lies inside (-1 + gamma/2, 1 - gamma/2).
    """
    return math.sqrt(shift_register_omega(gamma) - 1.0)


def chebyshev(t: int, lam, kind: str = "first"):
    """Chebyshev polynomial value by three-term recurrence.

    kind="first": T_t (T_t(1) = 1); kind="second": U_t (U_t(1) = t + 1).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if kind == "first":
        prev, cur = 1.0, lam
    elif kind == "second":
        prev, cur = 1.0, 2 * lam
    else:
        raise ValueError("kind must be 'first' or 'second'")
    if t == 0:
        return prev if np.isscalar(lam) else np.ones_like(lam)
    for _ in range(t - 1):
        prev, cur = cur, 2 * lam * cur - prev
    return cur


def shift_register_poly(omega: float, t: int, lam):
    """Value of the two-register iteration polynomial at lam.

    For omega in (1, 2] this is the closed form
        (omega-1)^(t/2) [ (2 - 2/omega) T_t(x) + (2/omega - 1) U_t(x) ],
        x = omega*lam / (2 sqrt(omega-1)),
    which reproduces the recursion x^{t+1} = omega*lam*x^t + (1-omega)*x^{t-1}
    started from 1, lam. omega <= 1 degenerates to plain powers lam^t.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if omega > 2:
        raise ValueError("omega must lie in (1, 2] (or <= 1 for plain powers)")
    if omega <= 1.0:
        return lam**t
    root = math.sqrt(omega - 1.0)
    x = omega * lam / (2.0 * root)
    tt = chebyshev(t, x, "first")
    uu = chebyshev(t, x, "second")
    return root**t * ((2.0 - 2.0 / omega) * tt + (2.0 / omega - 1.0) * uu)


def kesten_mckay_support(d: int) -> float:
    """Support radius 2*sqrt(d-1)/d of the d-regular-tree spectral measure."""
    return 2.0 * math.sqrt(d - 1.0) / d


def kesten_mckay_density(d: int, lam: float) -> float:
    """Density of the d-regular-tree spectral measure (d >= 3), 0 off-support."""
    if not isinstance(d, int) or d < 3:
        raise ValueError("kesten_mckay_density requires an integer d >= 3")
    edge = kesten_mckay_support(d)
    if abs(lam) >= edge:
        return 0.0
    return d / (2.0 * math.pi * (1.0 - lam * lam)) * math.sqrt(
        4.0 * (d - 1.0) / (d * d) - lam * lam
    )


def evaluate_recurrence_sequence(rec: Recurrence, lam, t_max: int) -> list:
    """pi_0(lam), ..., pi_{t_max}(lam) via the three-term recurrence.

    Works with any scalar arithmetic (float, Fraction, mpfr) as long as lam
    and the coefficients combine.
    """
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    out = [lam - lam + 1]  # multiplicative identity in lam's arithmetic
    if t_max >= 1:
        out.append(rec.a(0) * lam + rec.b(0))
    for t in range(1, t_max):
        out.append((rec.a(t) * lam + rec.b(t)) * out[t] - rec.c(t) * out[t - 1])
    return out[: t_max + 1]


def evaluate_recurrence(rec: Recurrence, lam, t: int):
    return evaluate_recurrence_sequence(rec, lam, t)[t]


def recurrence_table(rec: Recurrence, lams: np.ndarray, t_max: int) -> np.ndarray:
    """Float matrix P[t, j] = pi_t(lams[j]) for t = 0..t_max."""
    lams = np.asarray(lams, dtype=float)
    out = np.empty((t_max + 1, len(lams)))
    out[0] = 1.0
    if t_max >= 1:
        out[1] = float(rec.a(0)) * lams + float(rec.b(0))
    for t in range(1, t_max):
        out[t + 1] = (float(rec.a(t)) * lams + float(rec.b(t))) * out[t] - float(
            rec.c(t)
        ) * out[t - 1]
    return out


def evaluate_gap_sequence(gaprec: GapRecurrence, lam, t_max: int) -> list:
    """x_t(lam) = y_t(lam)/delta_t for the gap-rescaled recurrence.

    The (y, delta) pair is rescaled by 1/delta_t each step; the quotient is
    invariant and the rescaling keeps both sequences bounded. Scalar-generic
    (float, Fraction, gmpy2.mpfr).
    """
    one = lam - lam + 1
    y_prev, d_prev = one, one
    out = [one]
    if t_max == 0:
        return out
    y = gaprec.a(0) * lam + gaprec.b(0)
    delta = gaprec.a(0) + gaprec.b(0)
    out.append(y / delta)
    for t in range(1, t_max):
        y_next = (gaprec.a(t) * lam + gaprec.b(t)) * y - gaprec.c(t) * y_prev
        d_next = (gaprec.a(t) + gaprec.b(t)) * delta - gaprec.c(t) * d_prev
        y_prev, y = y / d_next, y_next / d_next
        d_prev, delta = delta / d_next, one
        out.append(y / delta)
    return out


def gap_table(gaprec: GapRecurrence, lams: np.ndarray, t_max: int) -> np.ndarray:
    """Float matrix X[t, j] = x_t(lams[j]) for the gap-rescaled recurrence."""
    lams = np.asarray(lams, dtype=float)
    out = np.empty((t_max + 1, len(lams)))
    out[0] = 1.0
    if t_max == 0:
        return out
    a0, b0 = float(gaprec.a(0)), float(gaprec.b(0))
    y_prev = np.ones_like(lams)
    d_prev = 1.0
    y = a0 * lams + b0
    delta = a0 + b0
    out[1] = y / delta
    for t in range(1, t_max):
        a, b, c = float(gaprec.a(t)), float(gaprec.b(t)), float(gaprec.c(t))
        y_next = (a * lams + b) * y - c * y_prev
        d_next = (a + b) * delta - c * d_prev
        y_prev, y = y / d_next, y_next / d_next
        d_prev, delta = delta / d_next, 1.0
        out[t + 1] = y / delta
    return out


@dataclass
class OraclePolynomials:
    """Orthogonal polynomials of a discrete measure, built by Gram-Schmidt.

    Polynomials are orthogonal w.r.t. the modified weights (1 - lambda_i) w_i
    and rescaled so pi_t(1) = 1. coefficients[t] holds pi_t in the monomial
    basis (ascending powers); values[t] holds pi_t on the support points.
    rec_a/rec_b/rec_c are the extracted three-term coefficients, valid for
    transitions into every non-degenerate degree.
    """

    points: np.ndarray
    sigma_weights: np.ndarray
    tau_weights: np.ndarray
    coefficients: list[np.ndarray]
    values: list[np.ndarray]
    rec_a: list[float]
    rec_b: list[float]
    rec_c: list[float]
    terminal: bool = False

    @property
    def max_degree(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, lam: float, t: int) -> float:
        return float(np.polynomial.polynomial.polyval(lam, self.coefficients[t]))

    def sigma_norm_sq(self, t: int) -> float:
        """Integral of pi_t^2 against the original measure."""
        return float(np.sum(self.sigma_weights * self.values[t] ** 2))

    def recurrence(self) -> Recurrence:
        a_list, b_list, c_list = self.rec_a, self.rec_b, self.rec_c

        def a(t: int) -> float:
            return a_list[t]

        def b(t: int) -> float:
            return b_list[t]

        def c(t: int) -> float:
            return c_list[t]

        return Recurrence(a=a, b=b, c=c, label="oracle")


_TERMINAL_NORM_RATIO = 1e-22


def orthogonal_from_modified_weights(
    points: np.ndarray,
    sigma_weights: np.ndarray,
    tau_weights: np.ndarray,
    t_max: int,
) -> OraclePolynomials:
    """Gram-Schmidt on monomials under sum_i tau_w[i] P(x_i) Q(x_i).

    Modified Gram-Schmidt with one reorthogonalization pass; the monomial
    basis is adequate up to degree ~25 on [-1, 1] supports (conditioning grows
    like (1 + sqrt(2))^t, so coefficients stay well below 1e-6 error there).
    If the modified measure supports fewer than t_max + 1 points, the family
    is truncated after one final degenerate polynomial vanishing on the whole
    support (the perfect-averaging polynomial).
    """
    points = np.asarray(points, dtype=float)
    tau_w = np.asarray(tau_weights, dtype=float)
    support = int(np.sum(tau_w > 0))
    if support == 0:
        raise EstimationError("measure has no mass away from 1: nothing to fit")
    t_cap = min(t_max, support)

    def ip(u: np.ndarray, v: np.ndarray) -> float:
        return float(np.sum(tau_w * u * v))

    values: list[np.ndarray] = []
    coefficients: list[np.ndarray] = []
    norms: list[float] = []
    terminal = False
    for t in range(t_cap + 1):
        if t == 0:
            val = np.ones_like(points)
            coef = np.array([1.0])
        else:
            val = points * values[-1]
            coef = np.concatenate([[0.0], coefficients[-1]])
            for _ in range(2):  # MGS + one reorthogonalization pass
                for s in range(t):
                    proj = ip(val, values[s]) / norms[s]
                    val = val - proj * values[s]
                    cs = np.zeros_like(coef)
                    cs[: len(coefficients[s])] = coefficients[s]
                    coef = coef - proj * cs
        at_one = coef.sum()
        val = val / at_one
        coef = coef / at_one
        nrm = ip(val, val)
        values.append(val)
        coefficients.append(coef)
        norms.append(nrm)
        if t > 0 and nrm <= _TERMINAL_NORM_RATIO * norms[0]:
            terminal = True  # degenerate: vanishes on the support
            break

    rec_a: list[float] = []
    rec_b: list[float] = []
    rec_c: list[float] = []
    n_trans = len(values) - 1 - (1 if terminal else 0)
    for t in range(n_trans):
        lam_pt = points * values[t]
        at = norms[t + 1] / ip(lam_pt, values[t + 1])
        bt = -at * ip(lam_pt, values[t]) / norms[t]
        ct = at * ip(lam_pt, values[t - 1]) / norms[t - 1] if t >= 1 else 0.0
        rec_a.append(at)
        rec_b.append(bt)
        rec_c.append(ct)

    return OraclePolynomials(
        points=points,
        sigma_weights=np.asarray(sigma_weights, dtype=float),
        tau_weights=tau_w,
        coefficients=coefficients,
        values=values,
        rec_a=rec_a,
        rec_b=rec_b,
        rec_c=rec_c,
        terminal=terminal,
    )


def oracle_from_measure(sigma: DiscreteMeasure, t_max: int) -> OraclePolynomials:
    """Best-averaging-polynomial oracle for a discrete error measure.

    Orthogonalizes against the modified weights (1 - lambda_i) w_i, which is
    exactly the inner product under which the optimal value-1-at-1 polynomials
    of the measure are orthogonal.
    """
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    tau_w = (1.0 - sigma.points) * sigma.weights
    if float(np.sum(np.abs(tau_w))) <= 0.0:
        raise EstimationError("all mass at lambda = 1: no error mass to fit")
    return orthogonal_from_modified_weights(sigma.points, sigma.weights, tau_w, t_max)
