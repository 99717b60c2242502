"""Tail bounds for block norms of the Gaussian/Ginibre model and for delta(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .sampling import EnsembleKind, Setting
from .weights import classify, essential_weights, rep_count_by_norm, weyl_dimension

EULER_GAMMA = 0.57721566490153286061

# exponent divisor of F_kind(N, eps) = exp(-N eps^2 / div) / 2
_DIVISOR = {
    EnsembleKind.GOE: 4.0,
    EnsembleKind.GUE: 2.0,
    EnsembleKind.REAL_GINIBRE: 2.0,
    EnsembleKind.COMPLEX_GINIBRE: 1.0,
}


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def tail_bound_single(kind: EnsembleKind | str, n: int, eps: float) -> float:
    """P(||X|| > 2 + eps) <= exp(-n eps^2 / {4, 2, 2, 1}) / 2 for GOE, GUE, real and complex Ginibre."""
    kind = EnsembleKind(kind) if not isinstance(kind, EnsembleKind) else kind
    if n < 1:
        raise ValueError("N must be >= 1")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return 0.5 * math.exp(-n * eps * eps / _DIVISOR[kind])


@lru_cache(maxsize=256)
def _block_terms(d: int, t: int, setting: Setting) -> tuple[tuple[int, EnsembleKind], ...]:
    return tuple(
        (weyl_dimension(w), EnsembleKind.for_weight(setting, classify(w))) for w in essential_weights(d, t)
    )


def _union_sum(d: int, t: int, eps: float, setting) -> float:
    if eps < 0:
        raise ValueError("eps must be >= 0")
    terms = _block_terms(d, t, Setting.coerce(setting))
    return math.fsum(tail_bound_single(kind, n, eps) for n, kind in terms)


def union_bound_delta_t(d: int, t: int, eps: float, setting="symmetric", clamp: bool = True) -> float:
    """Sum of F_kind(d_lambda, eps) over the essential weights.

    Summing once per conjugate pair is the same as halving the sum over both members.
    """
    s = _union_sum(d, t, eps, setting)
    return _clamp(s) if clamp else s


def product_bound_delta_t(d: int, t: int, eps: float, setting="symmetric", clamp: bool = True) -> float:
    """1 - exp(-sum F), from independence of the blocks."""
    p = -math.expm1(-_union_sum(d, t, eps, setting))
    return _clamp(p) if clamp else p


def qubit_closed_form(t: int | float | None, eps: float, setting="symmetric", clamp: bool = True) -> float:
    """Geometric-series value of the d=2 union bound; ``t=None`` or ``inf`` gives the t -> infinity form."""
    if eps <= 0:
        raise ValueError("eps must be > 0")
    c2 = Setting.coerce(setting).c ** 2
    x = eps * eps / c2
    val = math.exp(-x / 2.0) / (2.0 * math.expm1(x))
    if t is not None and not math.isinf(t):
        val *= -math.expm1(-t * x)
    return _clamp(val) if clamp else val


def exponential_integral(x: float) -> float:
    """Ei(x) for x > 0.

    The power series gamma + ln x + sum x^k/(k k!) has only positive terms for x > 0, so it is
    used up to x = 40; beyond that the asymptotic series e^x/x sum k!/x^k is summed to its
    smallest term, which is below e^-40 in relative size.
    """
    if not x > 0:
        raise ValueError("Ei is only implemented for x > 0")
    if x <= 40.0:
        term = 1.0
        acc = 0.0
        k = 1
        while True:
            term *= x / k
            add = term / k
            acc += add
            if add < 1e-17 * acc:
                break
            k += 1
        return EULER_GAMMA + math.log(x) + acc
    acc = 1.0
    term = 1.0
    k = 1
    while True:
        nxt = term * k / x
        if nxt > term or nxt < 1e-17:
            break
        term = nxt
        acc += term
        k += 1
    return math.exp(x) / x * acc


def b_constant() -> float:
    """b = 10 [8 pi^2 Ei(2 sqrt(2/3) pi) - e^{2 sqrt(2/3) pi} (3 + 2 sqrt(6) pi)]."""
    a = 2.0 * math.sqrt(2.0 / 3.0) * math.pi
    return 10.0 * (8.0 * math.pi**2 * exponential_integral(a) - math.exp(a) * (3.0 + 2.0 * math.sqrt(6.0) * math.pi))


B_CONSTANT = b_constant()


@dataclass(frozen=True)
class BoundResult:
    value: float
    valid: bool
    threshold: float
    raw: float = float("nan")


def global_threshold(d: int, setting="symmetric") -> float:
    """eps_d = c (4 pi^2 / (3 d (d-1)^2))^{1/4}; zero for d = 2."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if d == 2:
        return 0.0
    return Setting.coerce(setting).c * (4.0 * math.pi**2 / (3.0 * d * (d - 1) ** 2)) ** 0.25


def global_bound(d: int, eps: float, setting="symmetric") -> BoundResult:
    """Bound on P(delta > 2 + eps) with delta = sup over all t.

    Outside the valid region the formula value is still returned, flagged ``valid=False``.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    c = Setting.coerce(setting).c
    thr = global_threshold(d, setting)
    if d == 2:
        if eps <= 0:
            return BoundResult(value=1.0, valid=False, threshold=0.0, raw=math.inf)
        raw = qubit_closed_form(None, eps, setting, clamp=False)
        return BoundResult(value=_clamp(raw), valid=True, threshold=0.0, raw=raw)
    if eps <= 0:
        return BoundResult(value=1.0, valid=False, threshold=thr, raw=math.inf)
    c2 = c * c
    first = math.exp(-d * (d + 1) * eps**2 / (4.0 * c2)) * (
        math.exp(2.0 * math.pi * math.sqrt((d + 2) / 3.0)) * (60.0 + 100.0 * math.pi * math.sqrt(3 * d + 6)) / (d + 2)
        - B_CONSTANT
    )
    second = (
        60.0
        / d**2
        * (2.0 + math.sqrt(2.0 * math.pi) * c / eps)
        * math.exp(-3.0 * d * (d - 1) * eps**2 / (4.0 * c2) + 2.0 * math.pi * math.sqrt(d / 3.0))
    )
    raw = first + second
    return BoundResult(value=_clamp(raw), valid=eps > thr, threshold=thr, raw=raw)


@dataclass(frozen=True)
class TailSum:
    partial_sum: float
    tail_estimate: float
    c_d: float
    integral_bound: float

    @property
    def total(self) -> float:
        return self.partial_sum + self.tail_estimate


def growth_constant(d: int, k_max: int) -> float:
    """max_{k <= k_max} alpha_{2k} / k^{d-2}."""
    return max(rep_count_by_norm(d, k) / k ** (d - 2) for k in range(1, k_max + 1))


def spectral_gap_tail_sum(d: int, eps: float, setting="symmetric", t_max: int = 10) -> TailSum:
    """Partial union sum over the essential weights up to t_max, plus a bound on the rest.

    Level-k weights have d_lambda >= 2k and every F_kind(N, eps) <= exp(-N eps^2/(2c^2))/2, so
    level k contributes at most c_d k^{d-2} exp(-k eps^2/c^2)/2.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if eps <= 0:
        raise ValueError("eps must be > 0")
    c2 = Setting.coerce(setting).c ** 2
    partial = _union_sum(d, t_max, eps, setting)
    cd = growth_constant(d, max(t_max, 64))
    x = eps * eps / c2

    tail = 0.0
    start = t_max + 1
    peak = (d - 2) / x
    while True:
        k = np.arange(start, start + 100_000, dtype=float)
        chunk = float(np.sum(0.5 * cd * np.exp((d - 2) * np.log(k) - k * x)))
        tail += chunk
        start += 100_000
        if start > peak and chunk <= 1e-17 * max(tail, 1e-300):
            break
    integral = 2.0 ** (d - 1) * cd * math.factorial(d - 2) / eps ** (2 * (d - 1))
    return TailSum(partial_sum=partial, tail_estimate=tail, c_d=cd, integral_bound=integral)
