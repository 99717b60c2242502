"""Empirical moment-operator blocks T_{nu_S, lambda} and the sampled-norm experiment."""

from __future__ import annotations

import enum
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import ConfigError
from .gt_irreps import DEFAULT_MAX_DIM, AlgebraRep, build_algebra_rep, evaluate_irrep
from .sampling import (
    TAG_GATES,
    GateSet,
    RngStream,
    check_dims,
    operator_norm,
    sample_gate_set,
    sample_model_block_norms,
)
from .spectra import delta_opt
from .weights import Weight, essential_weights

log = logging.getLogger(__name__)


class Scaling(enum.Enum):
    NONE = "none"
    SQRT_S = "sqrtS"
    TWO_OVER_DELTA_OPT = "two_over_delta_opt"

    def factor(self, cardinality: int) -> float:
        if self is Scaling.NONE:
            return 1.0
        if self is Scaling.SQRT_S:
            return float(np.sqrt(cardinality))
        return 2.0 / delta_opt(cardinality)


@dataclass(frozen=True)
class MomentBlock:
    weight: Weight
    matrix: np.ndarray
    hermitian: bool

    @property
    def norm(self) -> float:
        return operator_norm(self.matrix, hermitian=self.hermitian)


def moment_block(gs: GateSet, rep: AlgebraRep) -> MomentBlock:
    """Uniform average of pi_lambda over the gate-set.

    For symmetric sets only the generators are evaluated: the inverses contribute
    pi(U)^dagger, so the average is the Hermitian part of the generator mean.
    """
    if gs.d != rep.d:
        raise ValueError(f"gate dimension {gs.d} does not match representation of U({rep.d})")
    gates = gs.generators if gs.symmetric else gs.gates
    t = sum(evaluate_irrep(rep, u) for u in gates) / len(gates)
    if gs.symmetric:
        t = 0.5 * (t + t.conj().T)
    return MomentBlock(weight=rep.weight, matrix=t, hermitian=gs.symmetric)


def moment_block_full(gs: GateSet, rep: AlgebraRep) -> np.ndarray:
    """Plain average over every listed gate (inverses evaluated explicitly)."""
    return sum(evaluate_irrep(rep, u) for u in gs.gates) / gs.cardinality


@dataclass
class RepCache:
    """Per-weight AlgebraRep cache; read-only once warmed."""

    max_dim: int = DEFAULT_MAX_DIM
    _reps: dict = field(default_factory=dict)

    def get(self, w: Weight) -> AlgebraRep:
        rep = self._reps.get(w)
        if rep is None:
            rep = build_algebra_rep(w, max_dim=self.max_dim)
            self._reps[w] = rep
        return rep


@dataclass(frozen=True)
class DesignDelta:
    weights: list[Weight]
    norms: np.ndarray

    @property
    def delta(self) -> float:
        return float(self.norms.max())


def design_delta(
    gs: GateSet,
    t: int,
    weights: Sequence[Weight] | None = None,
    cache: RepCache | None = None,
) -> DesignDelta:
    ws = list(weights) if weights is not None else essential_weights(gs.d, t)
    cache = cache or RepCache()
    check_dims(ws, cache.max_dim)
    norms = np.array([moment_block(gs, cache.get(w)).norm for w in ws])
    return DesignDelta(weights=ws, norms=norms)


CONFIG_FIELDS = ("d", "t", "sample_size", "set_size", "is_symmetric", "seed", "scaling")


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    t: int
    sample_size: int
    set_size: int
    is_symmetric: bool
    seed: int
    scaling: Scaling = Scaling.NONE

    def __post_init__(self):
        bad = []
        for name in ("d", "t", "sample_size", "set_size"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                bad.append(name)
        if not bad and self.d < 2:
            bad.append("d")
        if not isinstance(self.is_symmetric, bool):
            bad.append("is_symmetric")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            bad.append("seed")
        if not isinstance(self.scaling, Scaling):
            try:
                object.__setattr__(self, "scaling", Scaling(self.scaling))
            except ValueError:
                bad.append("scaling")
        if bad:
            raise ConfigError(f"invalid config fields: {', '.join(bad)}", keys=bad)

    @property
    def cardinality(self) -> int:
        return 2 * self.set_size if self.is_symmetric else self.set_size

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "t": self.t,
            "sample_size": self.sample_size,
            "set_size": self.set_size,
            "is_symmetric": self.is_symmetric,
            "seed": self.seed,
            "scaling": self.scaling.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        extra = sorted(set(data) - set(CONFIG_FIELDS))
        missing = sorted(set(CONFIG_FIELDS[:-1]) - set(data))
        if extra or missing:
            parts = []
            if extra:
                parts.append(f"unknown fields: {', '.join(extra)}")
            if missing:
                parts.append(f"missing fields: {', '.join(missing)}")
            raise ConfigError("; ".join(parts), keys=extra + missing)
        return cls(**data)


@dataclass
class SampleTable:
    """Per-sample, per-weight norm values plus run metadata."""

    weights: list[Weight]
    rows: np.ndarray  # shape (sample_size, len(weights))
    metadata: dict

    @property
    def sample_size(self) -> int:
        return self.rows.shape[0]

    def column(self, w: Weight) -> np.ndarray:
        return self.rows[:, self.weights.index(w)]

    def row_max(self) -> np.ndarray:
        return self.rows.max(axis=1)


def worker_count(requested: int | None = None) -> int:
    """Requested worker count, capped by TDESIGN_THREADS; defaults to all cores."""
    n = int(requested) if requested is not None else (os.cpu_count() or 1)
    env = os.environ.get("TDESIGN_THREADS")
    if env:
        n = min(n, int(env))
    return max(1, n)


# per-process state for pool workers
_WORKER: dict = {}


def _init_worker(cfg_dict: dict, weight_entries: list[tuple[int, ...]], max_dim: int) -> None:
    _WORKER["cfg"] = ExperimentConfig.from_dict(cfg_dict)
    _WORKER["weights"] = [Weight(e) for e in weight_entries]
    _WORKER["cache"] = RepCache(max_dim=max_dim)


def _empirical_row(i: int) -> np.ndarray:
    cfg: ExperimentConfig = _WORKER["cfg"]
    with threadpool_limits(limits=1):
        root = RngStream(cfg.seed)
        gs = sample_gate_set(cfg.d, cfg.set_size, cfg.is_symmetric, root.generator(TAG_GATES, i))
        dd = design_delta(gs, cfg.t, weights=_WORKER["weights"], cache=_WORKER["cache"])
    return dd.norms * cfg.scaling.factor(gs.cardinality)


def _iter_rows(
    n: int, workers: int, init_args: tuple, row_fn: Callable[[int], np.ndarray]
) -> Iterator[np.ndarray]:
    if workers <= 1:
        _init_worker(*init_args)
        for i in range(n):
            yield row_fn(i)
        return
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=init_args) as ex:
        yield from ex.map(row_fn, range(n), chunksize=max(1, n // (8 * workers)))


def run_empirical_experiment(
    cfg: ExperimentConfig,
    weights: Sequence[Weight] | None = None,
    workers: int | None = 1,
    max_dim: int = DEFAULT_MAX_DIM,
    on_row: Callable[[int, np.ndarray], None] | None = None,
) -> SampleTable:
    """Sample ``cfg.sample_size`` gate-sets and record the norm of every essential block.

    Row i depends only on (seed, i), so results do not depend on ``workers``.
    ``on_row`` is called in sample order as rows complete (used for incremental flushing).
    """
    ws = list(weights) if weights is not None else essential_weights(cfg.d, cfg.t)
    check_dims(ws, max_dim)
    init_args = (cfg.to_dict(), [w.entries for w in ws], max_dim)
    rows = []
    for i, row in enumerate(_iter_rows(cfg.sample_size, worker_count(workers), init_args, _empirical_row)):
        rows.append(row)
        if on_row is not None:
            on_row(i, row)
        if (i + 1) % max(1, cfg.sample_size // 10) == 0:
            log.info("sample %d/%d", i + 1, cfg.sample_size)
    meta = cfg.to_dict()
    meta.update(source="empirical", n_generators=cfg.set_size, cardinality=cfg.cardinality)
    return SampleTable(weights=ws, rows=np.array(rows).reshape(len(rows), len(ws)), metadata=meta)


def _model_row(i: int) -> np.ndarray:
    cfg: ExperimentConfig = _WORKER["cfg"]
    setting = "symmetric" if cfg.is_symmetric else "plain"
    with threadpool_limits(limits=1):
        ms = sample_model_block_norms(
            cfg.d, cfg.t, setting, RngStream(cfg.seed), sample_index=i, weights=_WORKER["weights"],
            max_dim=_WORKER["cache"].max_dim,
        )
    return ms.norms


def run_model_experiment(
    d: int,
    t: int,
    setting: str,
    sample_size: int,
    seed: int,
    weights: Sequence[Weight] | None = None,
    workers: int | None = 1,
    max_dim: int = DEFAULT_MAX_DIM,
    on_row: Callable[[int, np.ndarray], None] | None = None,
) -> SampleTable:
    """Sample the block-diagonal Gaussian/Ginibre model; one row of delta(lambda) per sample."""
    symmetric = setting == "symmetric" or setting is True
    cfg = ExperimentConfig(d=d, t=t, sample_size=sample_size, set_size=1, is_symmetric=bool(symmetric), seed=seed)
    ws = list(weights) if weights is not None else essential_weights(d, t)
    check_dims(ws, max_dim)
    init_args = (cfg.to_dict(), [w.entries for w in ws], max_dim)
    rows = []
    for i, row in enumerate(_iter_rows(sample_size, worker_count(workers), init_args, _model_row)):
        rows.append(row)
        if on_row is not None:
            on_row(i, row)
    meta = {
        "d": d,
        "t": t,
        "sample_size": sample_size,
        "setting": "symmetric" if symmetric else "plain",
        "seed": seed,
        "scaling": Scaling.NONE.value,
        "source": "model",
    }
    return SampleTable(weights=ws, rows=np.array(rows).reshape(len(rows), len(ws)), metadata=meta)
