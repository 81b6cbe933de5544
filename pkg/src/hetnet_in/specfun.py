"""Self-contained special-function kernel.

Provides the Gauss hypergeometric function 2F1(a, b; c; -x) on the negative
real axis, the Beta function, the regularized lower incomplete gamma function,
and the composite path-loss functions F, G, F-tilde used by the analytics
layer.  Everything is scalar float64; scipy/mpmath are used only as test
oracles, never here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidParam, NonConvergence

__all__ = [
    "SpecFunConfig",
    "DEFAULT_CONFIG",
    "gauss_2f1_neg",
    "capital_f",
    "capital_g",
    "f_tilde",
    "beta",
    "lower_inc_gamma_reg",
]

# Argument thresholds: defining series below _SERIES_MAX_X, Pfaff transform up
# to _PFAFF_MAX_X, and the 1/x connection formula beyond (the Pfaff series
# needs too many terms once the transformed argument approaches 1).
_SERIES_MAX_X = 0.9
_PFAFF_MAX_X = 50.0


@dataclass(frozen=True)
class SpecFunConfig:
    series_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.series_tol > 0:
            raise InvalidParam(f"series_tol must be > 0, got {self.series_tol}")
        if self.max_terms < 1:
            raise InvalidParam(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_CONFIG = SpecFunConfig()


def _is_nonpos_int(v: float, eps: float = 1e-12) -> bool:
    return v <= eps and abs(v - round(v)) < eps


def _series_2f1(a: float, b: float, c: float, z: float, cfg: SpecFunConfig) -> float:
    """Defining Gauss series at argument z, |z| < 1 (or terminating)."""
    term = 1.0
    total = 1.0
    small_streak = 0
    for k in range(cfg.max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= cfg.series_tol * abs(total):
            small_streak += 1
            if small_streak >= 2:
                return total
        else:
            small_streak = 0
    raise NonConvergence(
        f"2F1 series did not converge in {cfg.max_terms} terms "
        f"(a={a}, b={b}, c={c}, z={z})"
    )


@lru_cache(maxsize=200_000)
def _gauss_2f1_neg_cached(a: float, b: float, c: float, x: float,
                          series_tol: float, max_terms: int) -> float:
    cfg = SpecFunConfig(series_tol, max_terms)
    if x == 0.0:
        return 1.0
    if _is_nonpos_int(a) or _is_nonpos_int(b):
        # Terminating polynomial: the defining series is exact for any x.
        return _series_2f1(a, b, c, -x, cfg)
    if x < _SERIES_MAX_X:
        return _series_2f1(a, b, c, -x, cfg)
    if x <= _PFAFF_MAX_X:
        # Pfaff: 2F1(a,b;c;-x) = (1+x)^(-b) 2F1(c-a, b; c; x/(1+x))
        y = x / (1.0 + x)
        return (1.0 + x) ** (-b) * _series_2f1(c - a, b, c, y, cfg)
    # Large argument: connection formula in powers of 1/x, valid when a - b is
    # not an integer (true for every parameter combination used downstream,
    # where a - b always contains a non-integer 2/alpha offset).
    if abs((a - b) - round(a - b)) < 1e-8:
        # Fall back to Pfaff; slow but defined.
        y = x / (1.0 + x)
        return (1.0 + x) ** (-b) * _series_2f1(c - a, b, c, y, cfg)
    g = math.gamma
    t1 = (g(c) * g(b - a) / (g(b) * g(c - a))
          * x ** (-a) * _series_2f1(a, a - c + 1.0, a - b + 1.0, -1.0 / x, cfg))
    t2 = (g(c) * g(a - b) / (g(a) * g(c - b))
          * x ** (-b) * _series_2f1(b, b - c + 1.0, b - a + 1.0, -1.0 / x, cfg))
    return t1 + t2


def gauss_2f1_neg(a: float, b: float, c: float, x: float,
                  cfg: SpecFunConfig = DEFAULT_CONFIG) -> float:
    """2F1(a, b; c; -x) for x >= 0."""
    if _is_nonpos_int(c):
        raise InvalidParam(f"c must not be a nonpositive integer, got c={c}")
    if x < 0:
        raise InvalidParam(f"x must be >= 0, got {x}")
    return _gauss_2f1_neg_cached(float(a), float(b), float(c), float(x),
                                 cfg.series_tol, cfg.max_terms)


def capital_f(x: float, U: int, alpha: float,
              cfg: SpecFunConfig = DEFAULT_CONFIG) -> float:
    """F(x) = 2F1(-2/alpha, U; 1 - 2/alpha; -x) - 1.

    Nonnegative and nondecreasing in x; the interference integral of a
    Rayleigh-power (gamma-order-U) field outside the serving distance.
    """
    if U < 1:
        raise InvalidParam(f"U must be a positive integer, got {U}")
    if alpha <= 2:
        raise InvalidParam(f"alpha must be > 2, got {alpha}")
    r = 2.0 / alpha
    return gauss_2f1_neg(-r, float(U), 1.0 - r, x, cfg) - 1.0


def capital_g(x: float, U: int, alpha: float) -> float:
    """G(x) = Gamma(1-2/a) Gamma(U+2/a) / Gamma(U) * x^(2/a)."""
    if U < 1:
        raise InvalidParam(f"U must be a positive integer, got {U}")
    if alpha <= 2:
        raise InvalidParam(f"alpha must be > 2, got {alpha}")
    if x < 0:
        raise InvalidParam(f"x must be >= 0, got {x}")
    r = 2.0 / alpha
    return math.gamma(1.0 - r) * math.gamma(U + r) / math.gamma(U) * x ** r


def f_tilde(x: float, k: int, U: int, alpha: float,
            cfg: SpecFunConfig = DEFAULT_CONFIG) -> float:
    """F~_k(x) = x^k / (alpha k - 2) * 2F1(U+k, k-2/alpha; k-2/alpha+1; -x)."""
    if k < 1:
        raise InvalidParam(f"k must be a positive integer, got {k}")
    if U < 1:
        raise InvalidParam(f"U must be a positive integer, got {U}")
    if alpha <= 2:
        raise InvalidParam(f"alpha must be > 2, got {alpha}")
    if x == 0.0:
        return 0.0
    r = 2.0 / alpha
    h = gauss_2f1_neg(float(U + k), k - r, k - r + 1.0, x, cfg)
    return x ** k / (alpha * k - 2.0) * h


def beta(x: float, y: float) -> float:
    """Beta function for positive arguments."""
    if x <= 0 or y <= 0:
        raise InvalidParam(f"beta requires positive arguments, got ({x}, {y})")
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def lower_inc_gamma_reg(s: float, x: float,
                        cfg: SpecFunConfig = DEFAULT_CONFIG) -> float:
    """Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s)."""
    if s <= 0:
        raise InvalidParam(f"s must be > 0, got {s}")
    if x < 0:
        raise InvalidParam(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < s + 1.0:
        # Series: P = x^s e^-x / Gamma(s) * sum_n x^n / (s (s+1) ... (s+n))
        term = 1.0 / s
        total = term
        for n in range(1, cfg.max_terms):
            term *= x / (s + n)
            total += term
            if term < total * 1e-16:
                return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
        raise NonConvergence(f"incomplete gamma series failed (s={s}, x={x})")
    # Continued fraction for Q(s, x), modified Lentz.
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, cfg.max_terms):
        an = -i * (i - s)
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
        if abs(delta - 1.0) < 1e-15:
            q = h * math.exp(-x + s * math.log(x) - math.lgamma(s))
            return min(1.0, max(0.0, 1.0 - q))
    raise NonConvergence(f"incomplete gamma continued fraction failed (s={s}, x={x})")
