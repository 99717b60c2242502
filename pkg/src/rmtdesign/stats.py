"""Empirical tails, summaries, erf tail fits and the A <= B <= C ordering report."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares
from scipy.special import erf

from .bounds import tail_bound_single, union_bound_delta_t
from .moments import SampleTable
from .sampling import EnsembleKind, Setting
from .weights import classify, essential_weights, weyl_dimension


def _as_samples(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("need at least one sample")
    return x


def empirical_tail(samples: Sequence[float], threshold: float) -> tuple[float, float]:
    """Fraction of samples strictly above ``threshold`` and its binomial standard error."""
    x = _as_samples(samples)
    p = float(np.count_nonzero(x > threshold)) / x.size
    return p, math.sqrt(p * (1.0 - p) / x.size)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    median: float
    std: float
    count: int


def summarize(samples: Sequence[float]) -> SummaryStats:
    x = _as_samples(samples)
    # np.median averages the two central order statistics for even counts
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return SummaryStats(mean=float(np.mean(x)), median=float(np.median(x)), std=std, count=int(x.size))


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class ErfFit:
    L: float
    residual: float
    grid: np.ndarray
    tail: np.ndarray


def erf_tail_model(eps, L: float):
    """G_L(eps) = (1 - erf(eps / (sqrt(2) L))) / 2."""
    return 0.5 * (1.0 - erf(np.asarray(eps, dtype=float) / (math.sqrt(2.0) * L)))


def fit_erf_tail(samples: Sequence[float], center: float, n_grid: int = 40) -> ErfFit:
    """Unweighted least-squares fit of G_L to the tail of (samples - center).

    The grid has ``n_grid`` evenly spaced points from 0 to the 99.5th percentile offset.
    """
    x = _as_samples(samples)
    if x.size < 100:
        raise FitError(f"need at least 100 samples, got {x.size}")
    if np.ptp(x) == 0.0:
        raise FitError("samples have zero variance")
    off = np.sort(x - center)
    top = float(np.percentile(off, 99.5))
    if top <= 0.0:
        raise FitError("99.5th percentile offset is not positive; no tail to fit")
    grid = np.linspace(0.0, top, n_grid)
    # fraction strictly above each grid point
    tail = 1.0 - np.searchsorted(off, grid, side="right") / off.size

    def resid(p):
        return erf_tail_model(grid, math.exp(p[0])) - tail

    l0 = max(float(np.std(x)), 1e-6)
    sol = least_squares(resid, x0=[math.log(l0)], method="lm")
    L = math.exp(sol.x[0])
    rms = float(np.sqrt(np.mean(resid(sol.x) ** 2)))
    return ErfFit(L=L, residual=rms, grid=grid, tail=tail)


@dataclass(frozen=True)
class ReportRow:
    label: str
    eps: float
    A: float
    A_se: float
    B: float
    B_se: float
    C: float
    ok: bool


def conjecture_report(
    empirical: SampleTable,
    model: SampleTable,
    d: int,
    t: int,
    setting: Setting | str,
    eps_grid: Sequence[float],
    include_max: bool = True,
) -> list[ReportRow]:
    """Per (lambda, eps): A = tail of the (scaled) empirical norms, B = model tail, C = F bound.

    A row fails when A > B + 3 sqrt(se_A^2 + se_B^2) or B > C + 3 se_B. With ``include_max`` a
    final block compares the row maxima (delta(t)) against the union bound.
    """
    if [w.entries for w in empirical.weights] != [w.entries for w in model.weights]:
        raise ValueError("empirical and model tables have different weight lists")
    setting = Setting.coerce(setting)
    out: list[ReportRow] = []

    def row(label, a_s, b_s, eps, c):
        a, a_se = empirical_tail(a_s, 2.0 + eps)
        b, b_se = empirical_tail(b_s, 2.0 + eps)
        ok = a <= b + 3.0 * math.hypot(a_se, b_se) and b <= c + 3.0 * b_se
        return ReportRow(label, float(eps), a, a_se, b, b_se, c, bool(ok))

    blocks = [(weyl_dimension(w), EnsembleKind.for_weight(setting, classify(w))) for w in empirical.weights]
    for j, w in enumerate(empirical.weights):
        n, kind = blocks[j]
        for eps in eps_grid:
            out.append(row(w.label(), empirical.rows[:, j], model.rows[:, j], eps, tail_bound_single(kind, n, eps)))
    if include_max and blocks:
        a_max, b_max = empirical.row_max(), model.row_max()
        full = [w.entries for w in empirical.weights] == [w.entries for w in essential_weights(d, t)]
        for eps in eps_grid:
            if full:
                c = union_bound_delta_t(d, t, eps, setting)
            else:
                # union bound restricted to the blocks actually sampled
                c = min(1.0, math.fsum(tail_bound_single(k, n, eps) for n, k in blocks))
            out.append(row("max", a_max, b_max, eps, c))
    return out


def violations(report: Sequence[ReportRow]) -> list[ReportRow]:
    return [r for r in report if not r.ok]


__all__ = [
    "ErfFit",
    "FitError",
    "ReportRow",
    "SummaryStats",
    "conjecture_report",
    "empirical_tail",
    "erf_tail_model",
    "fit_erf_tail",
    "summarize",
    "violations",
]
