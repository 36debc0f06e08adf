"""Scalar special-function kernel.

Everything the bound formulas need: the principal Lambert W branch,
generalised Laguerre polynomials, terminating Gauss hypergeometric sums,
incomplete gamma and beta functions, and log-space factorial/Pochhammer
arithmetic. Factorial-like quantities are kept as (sign, log-magnitude)
pairs because the matrix-element formulas multiply terms that individually
overflow a double well before the product does.

All functions are pure and reentrant.
"""

from __future__ import annotations

import math

__all__ = [
    "DomainError",
    "lambert_w0",
    "lambert_w0_from_log",
    "laguerre",
    "hyp2f1_terminating",
    "gamma_upper",
    "gamma_upper_log",
    "gamma_lower_regularized",
    "gamma_upper_regularized",
    "beta_incomplete",
    "log_factorial",
    "pochhammer_log",
    "signed_exp_sum",
]

_EPS = 2.220446049250313e-16
_MAX_HALLEY_ITERS = 64


class DomainError(ValueError):
    """Argument outside the mathematical domain of a kernel function."""


def _require_finite(name: str, x: float) -> None:
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


# ---------------------------------------------------------------------------
# Lambert W, principal branch
# ---------------------------------------------------------------------------

def lambert_w0(x: float) -> float:
    """Principal branch W0 of w * exp(w) = x, for x >= -1/e.

    Asymptotic initial guess refined by Halley iterations (capped at 64);
    converges to relative round-trip error below 1e-12 on the full domain.
    """
    _require_finite("lambert_w0 argument", x)
    min_x = -math.exp(-1.0)
    if x < min_x:
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    if abs(x - min_x) < 1e-300:
        return -1.0

    # Initial guess by region.
    if x < -0.25:
        # Near the branch point: series in sqrt(2(e*x + 1)).
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
    elif x < 1.0:
        w = x * (1.0 - x + 1.5 * x * x) if abs(x) < 0.5 else 0.5
    else:
        lx = math.log(x)
        llx = math.log(lx) if lx > 1.0 else 0.0
        w = lx - llx + (llx / lx if lx > 1.0 else 0.0)

    return _halley_w(w, x)


def lambert_w0_from_log(ln_x: float) -> float:
    """W0 evaluated at exp(ln_x); safe when exp(ln_x) would overflow.

    Requires ln_x >= 0 (so W0 >= ~0.567); solves w + log(w) = ln_x.
    """
    _require_finite("lambert_w0_from_log argument", ln_x)
    if ln_x < 0.0:
        raise DomainError("lambert_w0_from_log requires ln_x >= 0")
    if ln_x <= 700.0:
        return lambert_w0(math.exp(ln_x))
    # Newton on g(w) = w + log(w) - ln_x, monotone for w > 0.
    w = ln_x - math.log(ln_x)
    for _ in range(_MAX_HALLEY_ITERS):
        g = w + math.log(w) - ln_x
        step = g / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 4.0 * _EPS * abs(w):
            break
    return w


def _halley_w(w: float, x: float) -> float:
    for _ in range(_MAX_HALLEY_ITERS):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            break
        # Halley step for f(w) = w e^w - x.
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        step = f / denom
        w -= step
        if abs(step) <= 4.0 * _EPS * (abs(w) + _EPS):
            break
    return w


# ---------------------------------------------------------------------------
# Generalised Laguerre polynomials
# ---------------------------------------------------------------------------

def laguerre(n: int, a: float, x: float) -> float:
    """Generalised Laguerre polynomial L_n^a(x) by the three-term recurrence."""
    if n < 0 or n != int(n):
        raise DomainError(f"laguerre degree must be a non-negative integer, got {n}")
    _require_finite("laguerre argument", x)
    _require_finite("laguerre order", a)
    n = int(n)
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + a - x
    for k in range(1, n):
        prev, cur = cur, ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0)
    return cur


# ---------------------------------------------------------------------------
# Log-space factorials and Pochhammer symbols
# ---------------------------------------------------------------------------

def log_factorial(n: int) -> float:
    """log(n!) for non-negative integer n."""
    if n < 0 or n != int(n):
        raise DomainError(f"log_factorial requires a non-negative integer, got {n}")
    return math.lgamma(int(n) + 1.0)


def pochhammer_log(x: float, n: int) -> tuple[int, float]:
    """Rising factorial (x)_n = x (x+1) ... (x+n-1) as (sign, log-magnitude).

    sign is 0 when the product vanishes (x a non-positive integer hit by the
    product); the log-magnitude is then -inf.
    """
    if n < 0 or n != int(n):
        raise DomainError(f"pochhammer_log requires a non-negative integer n, got {n}")
    _require_finite("pochhammer_log base", x)
    sign = 1
    logmag = 0.0
    for k in range(int(n)):
        factor = x + k
        if factor == 0.0:
            return 0, -math.inf
        if factor < 0.0:
            sign = -sign
        logmag += math.log(abs(factor))
    return sign, logmag


def signed_exp_sum(terms: list[tuple[int, float]]) -> float:
    """Sum of sign * exp(logmag) terms, evaluated with a max-shift."""
    finite = [(s, lm) for s, lm in terms if s != 0 and lm != -math.inf]
    if not finite:
        return 0.0
    shift = max(lm for _, lm in finite)
    if shift == -math.inf:
        return 0.0
    total = sum(s * math.exp(lm - shift) for s, lm in finite)
    return total * math.exp(shift)


# ---------------------------------------------------------------------------
# Terminating 2F1
# ---------------------------------------------------------------------------

def hyp2f1_terminating(a: int, b: float, c: float, z: float) -> float:
    """2F1(a, b; c; z) for non-positive integer a (an exact finite sum).

    Terms are accumulated in (sign, log-magnitude) form so the alternating
    binomial-type factors cannot overflow before cancellation.
    """
    if a > 0 or a != int(a):
        raise DomainError(f"hyp2f1_terminating requires a non-positive integer a, got {a}")
    _require_finite("hyp2f1 b", b)
    _require_finite("hyp2f1 c", c)
    _require_finite("hyp2f1 z", z)
    n_terms = -int(a)
    if c <= 0.0 and c == int(c) and -int(c) < n_terms:
        raise DomainError(
            f"hyp2f1_terminating: denominator Pochhammer (c)_k vanishes before "
            f"termination (a={a}, c={c})"
        )
    terms: list[tuple[int, float]] = []
    sign = 1
    logmag = 0.0
    terms.append((sign, logmag))  # k = 0
    for k in range(n_terms):
        for factor in (a + k, b + k, z):
            if factor == 0.0:
                sign = 0
                break
            if factor < 0.0:
                sign = -sign
            logmag += math.log(abs(factor))
        if sign == 0:
            break
        divisor = (c + k) * (k + 1.0)
        if divisor < 0.0:
            sign = -sign
        logmag -= math.log(abs(divisor))
        terms.append((sign, logmag))
    return signed_exp_sum(terms)


# ---------------------------------------------------------------------------
# Incomplete gamma
# ---------------------------------------------------------------------------

def _gamma_p_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by power series (x < a + 1)."""
    if x == 0.0:
        return 0.0
    ap = a
    total = 1.0 / a
    delta = total
    for _ in range(1000):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_cf_log(a: float, x: float) -> float:
    """log of regularized upper incomplete gamma Q(a, x) by continued fraction.

    Valid for x >= a + 1 (modified Lentz algorithm).
    """
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return -x + a * math.log(x) - math.lgamma(a) + math.log(abs(h))


def gamma_lower_regularized(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) in [0, 1]."""
    _require_finite("gamma order a", a)
    _require_finite("gamma argument x", x)
    if a <= 0.0:
        raise DomainError(f"gamma functions require a > 0, got a={a}")
    if x < 0.0:
        raise DomainError(f"gamma functions require x >= 0, got x={x}")
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - math.exp(_gamma_q_cf_log(a, x))


def gamma_upper_regularized(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a)."""
    _require_finite("gamma order a", a)
    _require_finite("gamma argument x", x)
    if a <= 0.0:
        raise DomainError(f"gamma functions require a > 0, got a={a}")
    if x < 0.0:
        raise DomainError(f"gamma functions require x >= 0, got x={x}")
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return math.exp(_gamma_q_cf_log(a, x))


def gamma_upper(a: float, x: float) -> float:
    """Upper incomplete gamma Gamma(a, x) = integral_x^inf t^(a-1) e^(-t) dt."""
    return math.exp(gamma_upper_log(a, x))


def gamma_upper_log(a: float, x: float) -> float:
    """log Gamma(a, x); stays finite where Gamma(a, x) itself would overflow."""
    _require_finite("gamma order a", a)
    _require_finite("gamma argument x", x)
    if a <= 0.0:
        raise DomainError(f"gamma_upper requires a > 0, got a={a}")
    if x < 0.0:
        raise DomainError(f"gamma_upper requires x >= 0, got x={x}")
    if x == 0.0:
        return math.lgamma(a)
    if x < a + 1.0:
        p = _gamma_p_series(a, x)
        return math.lgamma(a) + math.log1p(-p)
    return math.lgamma(a) + _gamma_q_cf_log(a, x)


# ---------------------------------------------------------------------------
# Incomplete beta
# ---------------------------------------------------------------------------

def _beta_cf(x: float, a: float, b: float) -> float:
    """Continued fraction for the regularized incomplete beta (Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 500):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def beta_incomplete(x: float, a: float, b: float) -> float:
    """Non-regularized incomplete beta integral_0^x t^(a-1) (1-t)^(b-1) dt."""
    _require_finite("beta order a", a)
    _require_finite("beta order b", b)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"beta_incomplete requires x in [0, 1], got {x}")
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"beta_incomplete requires a, b > 0, got a={a}, b={b}")
    if x == 0.0:
        return 0.0
    log_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    if x == 1.0:
        return math.exp(log_beta)
    front = math.exp(a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    # Symmetry: B(x; a, b) = B(a, b) - B(1-x; b, a).
    return math.exp(log_beta) - math.exp(b * math.log1p(-x) + a * math.log(x)) * _beta_cf(1.0 - x, b, a) / b
