"""Seeded samplers: Haar unitaries, gate-sets, Gaussian/Ginibre ensembles and the block model."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ResourceError
from .gt_irreps import DEFAULT_MAX_DIM
from .weights import Weight, WeightClass, classify, essential_weights, weyl_dimension

# domain tags keep the key spaces of different samplers apart
TAG_GATES = 1
TAG_MODEL = 2
TAG_ENSEMBLE = 3


class Setting(enum.Enum):
    PLAIN = "plain"
    SYMMETRIC = "symmetric"

    @property
    def c(self) -> float:
        return 1.0 if self is Setting.PLAIN else float(np.sqrt(2.0))

    @classmethod
    def coerce(cls, value: "Setting | str | bool") -> "Setting":
        if isinstance(value, Setting):
            return value
        if isinstance(value, bool):
            return cls.SYMMETRIC if value else cls.PLAIN
        return cls(str(value).lower())


class EnsembleKind(enum.Enum):
    GOE = "GOE"
    GUE = "GUE"
    REAL_GINIBRE = "RealGinibre"
    COMPLEX_GINIBRE = "ComplexGinibre"

    @property
    def hermitian(self) -> bool:
        return self in (EnsembleKind.GOE, EnsembleKind.GUE)

    @classmethod
    def for_weight(cls, setting: Setting | str, wclass: WeightClass) -> "EnsembleKind":
        setting = Setting.coerce(setting)
        real = wclass is WeightClass.REAL
        if setting is Setting.PLAIN:
            return cls.REAL_GINIBRE if real else cls.COMPLEX_GINIBRE
        return cls.GOE if real else cls.GUE


def _zigzag(z: int) -> int:
    return 2 * z if z >= 0 else -2 * z - 1


def weight_key(w: Weight) -> tuple[int, ...]:
    """Non-negative integer key identifying a weight, independent of enumeration order."""
    return (w.d,) + tuple(_zigzag(x) for x in w.entries)


@dataclass(frozen=True)
class RngStream:
    """A split stream of a root seed: sample i of stream ``key`` depends only on (seed, key, i)."""

    seed: int
    key: tuple[int, ...] = ()

    def __post_init__(self):
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def child(self, *keys: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(k) for k in keys))

    def generator(self, *keys: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key + tuple(int(k) for k in keys))
        return np.random.Generator(np.random.PCG64(ss))


RngLike = Union[RngStream, np.random.Generator, int, None]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


def haar_unitary(d: int, rng: RngLike = None) -> np.ndarray:
    """Haar-distributed U(d) element: QR of a complex Ginibre matrix with R's diagonal phases removed."""
    if d < 1:
        raise ValueError("d must be >= 1")
    gen = as_generator(rng)
    z = (gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


@dataclass(frozen=True, eq=False)
class GateSet:
    """Gates of a (symmetric) Haar random gate-set; symmetric sets list generators then inverses."""

    gates: np.ndarray  # shape (|S|, d, d)
    symmetric: bool
    n_generators: int
    seed: int | None = None

    @property
    def d(self) -> int:
        return self.gates.shape[1]

    @property
    def cardinality(self) -> int:
        return self.gates.shape[0]

    @property
    def generators(self) -> np.ndarray:
        return self.gates[: self.n_generators]

    def __len__(self) -> int:
        return self.cardinality


def make_gate_set(generators: Sequence[np.ndarray], symmetric: bool, seed: int | None = None) -> GateSet:
    gens = np.asarray(generators, dtype=complex)
    if gens.ndim != 3 or gens.shape[1] != gens.shape[2]:
        raise ValueError("generators must be a stack of square matrices")
    if symmetric:
        gens = np.concatenate([gens, np.conj(np.transpose(gens, (0, 2, 1)))], axis=0)
    return GateSet(gates=gens, symmetric=symmetric, n_generators=len(generators), seed=seed)


def sample_gate_set(d: int, n: int, symmetric: bool, rng: RngLike = None) -> GateSet:
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = as_generator(rng)
    seed = rng.seed if isinstance(rng, RngStream) else None
    return make_gate_set([haar_unitary(d, gen) for _ in range(n)], symmetric, seed=seed)


def sample_ensemble(kind: EnsembleKind | str, n: int, rng: RngLike = None) -> np.ndarray:
    """One N x N matrix from GOE, GUE, real or complex Ginibre (semicircle edge at 2)."""
    kind = EnsembleKind(kind) if not isinstance(kind, EnsembleKind) else kind
    if n < 1:
        raise ValueError("N must be >= 1")
    gen = as_generator(rng)
    if kind is EnsembleKind.GOE:
        a = gen.standard_normal((n, n))
        # off-diagonal variance 1/N, diagonal 2/N
        return (a + a.T) / np.sqrt(2.0 * n)
    if kind is EnsembleKind.GUE:
        a = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
        # off-diagonal Re/Im variance 1/(2N), diagonal variance 1/N
        return (a + a.conj().T) / (2.0 * np.sqrt(n))
    if kind is EnsembleKind.REAL_GINIBRE:
        return gen.standard_normal((n, n)) / np.sqrt(n)
    return (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2.0 * n)


def operator_norm(m: np.ndarray, hermitian: bool | None = None) -> float:
    """Largest singular value; uses the Hermitian eigensolver when ``hermitian``."""
    if hermitian is None:
        hermitian = bool(np.allclose(m, m.conj().T, rtol=0, atol=1e-12))
    if hermitian:
        ev = np.linalg.eigvalsh(m)
        return float(max(abs(ev[0]), abs(ev[-1])))
    return float(np.linalg.svd(m, compute_uv=False)[0])


@dataclass(frozen=True)
class ModelSample:
    weights: list[Weight]
    norms: np.ndarray  # per-weight delta(lambda)

    @property
    def delta_t(self) -> float:
        return float(self.norms.max())


def check_dims(weights: Sequence[Weight], max_dim: int) -> None:
    for w in weights:
        dim = weyl_dimension(w)
        if dim > max_dim:
            raise ResourceError(f"block {w.label()} has dimension {dim}, above the cap {max_dim}", required=dim)


def sample_block_norm(w: Weight, setting: Setting | str, root: RngStream, sample_index: int) -> float:
    """delta(lambda) for one sample; the stream is keyed by the weight itself."""
    kind = EnsembleKind.for_weight(setting, classify(w))
    gen = root.generator(TAG_MODEL, *weight_key(w), sample_index)
    return operator_norm(sample_ensemble(kind, weyl_dimension(w), gen), hermitian=kind.hermitian)


def sample_model_block_norms(
    d: int,
    t: int,
    setting: Setting | str,
    rng: RngStream,
    sample_index: int = 0,
    weights: Sequence[Weight] | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> ModelSample:
    """Independent T_lambda blocks over the essential weights; returns their norms and delta(t)."""
    ws = list(weights) if weights is not None else essential_weights(d, t)
    check_dims(ws, max_dim)
    norms = np.array([sample_block_norm(w, setting, rng, sample_index) for w in ws])
    return ModelSample(weights=ws, norms=norms)
