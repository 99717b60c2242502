"""Highest weights of PU(d) irreps occurring in U^{t,t}, their dimensions and counts."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence


class WeightClass(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"


@dataclass(frozen=True, order=False)
class Weight:
    """A non-increasing integer vector labelling an irrep of U(d)."""

    entries: tuple[int, ...]

    def __init__(self, entries: Sequence[int]):
        ent = tuple(int(x) for x in entries)
        if len(ent) < 2:
            raise ValueError(f"weight needs at least 2 entries, got {ent}")
        if any(ent[i] < ent[i + 1] for i in range(len(ent) - 1)):
            raise ValueError(f"weight entries must be non-increasing: {ent}")
        object.__setattr__(self, "entries", ent)

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def total(self) -> int:
        return sum(self.entries)

    @property
    def l1(self) -> int:
        return sum(abs(x) for x in self.entries)

    @property
    def positive_part(self) -> tuple[int, ...]:
        return tuple(x for x in self.entries if x > 0)

    @property
    def level(self) -> int:
        """k such that the l1 norm is 2k (for zero-sum weights)."""
        return self.l1 // 2

    @property
    def dimension(self) -> int:
        return weyl_dimension(self)

    @property
    def weight_class(self) -> WeightClass:
        return classify(self)

    def conjugate(self) -> "Weight":
        return conjugate(self)

    def label(self) -> str:
        """Stable string form used as a column name, e.g. ``(2,0,-1,-1)``."""
        return "(" + ",".join(str(x) for x in self.entries) + ")"

    @classmethod
    def parse(cls, text: str) -> "Weight":
        body = text.strip().strip("()[]")
        return cls(int(x) for x in body.replace(";", ",").split(",") if x.strip())

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __repr__(self) -> str:
        return f"Weight{self.entries}"


def _check_dt(d: int, t: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d!r}")
    if int(t) != t or t < 1:
        raise ValueError(f"t must be an integer >= 1, got {t!r}")


def _partitions(k: int, max_parts: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of k (non-increasing) with at most ``max_parts`` parts."""
    if max_part is None:
        max_part = k
    if k == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(k, max_part), 0, -1):
        for rest in _partitions(k - first, max_parts - 1, first):
            yield (first,) + rest


def _canonical_key(w: Weight):
    # l1 ascending, then lexicographically descending entries
    return (w.l1, tuple(-x for x in w.entries))


def enumerate_weights(d: int, t: int) -> list[Weight]:
    """All weights in Lambda_t: nonzero, non-increasing, zero sum, positive part summing to <= t.

    Ordered by l1 norm, then lexicographically descending.
    """
    _check_dt(d, t)
    out = []
    for k in range(1, t + 1):
        for n_pos in range(1, min(k, d - 1) + 1):
            for pos in _partitions(k, n_pos):
                if len(pos) != n_pos:
                    continue
                for neg in _partitions(k, d - n_pos):
                    zeros = d - n_pos - len(neg)
                    out.append(Weight(pos + (0,) * zeros + tuple(-x for x in reversed(neg))))
    out.sort(key=_canonical_key)
    return out


def classify(w: Weight) -> WeightClass:
    e = w.entries
    d = len(e)
    if all(e[i] == -e[d - 1 - i] for i in range(d)):
        return WeightClass.REAL
    return WeightClass.COMPLEX


def conjugate(w: Weight) -> Weight:
    """lambda* = -(lambda_d, ..., lambda_1)."""
    return Weight(tuple(-x for x in reversed(w.entries)))


def essential_weights(d: int, t: int) -> list[Weight]:
    """Real weights plus one representative (the lexicographically larger) per conjugate pair."""
    out = []
    for w in enumerate_weights(d, t):
        if classify(w) is WeightClass.REAL or w.entries > conjugate(w).entries:
            out.append(w)
    return out


@lru_cache(maxsize=65536)
def _weyl_dimension(entries: tuple[int, ...]) -> int:
    d = len(entries)
    num = 1
    den = 1
    for i in range(d):
        for j in range(i + 1, d):
            num *= entries[i] - entries[j] + j - i
            den *= j - i
    q, r = divmod(num, den)
    assert r == 0, "Weyl product must be an integer"
    return q


def weyl_dimension(w: Weight | Sequence[int]) -> int:
    """Exact irrep dimension prod_{i<j} (l_i - l_j + j - i)/(j - i), as a Python int."""
    entries = w.entries if isinstance(w, Weight) else tuple(int(x) for x in w)
    return _weyl_dimension(entries)


@dataclass(frozen=True)
class PartitionCounts:
    p: int
    p_exact: int
    p_at_most: int


_P_TABLE: list[list[int]] = [[1]]  # _P_TABLE[k][n] = p_n(k), n = 0..k


def _extend_table(k: int) -> None:
    # p_n(k) = p_{n-1}(k-1) + p_n(k-n)
    while len(_P_TABLE) <= k:
        kk = len(_P_TABLE)
        row = [0] * (kk + 1)
        for n in range(1, kk + 1):
            prev = _P_TABLE[kk - 1][n - 1] if n - 1 <= kk - 1 else 0
            rest = _P_TABLE[kk - n][n] if n <= kk - n else 0
            row[n] = prev + rest
        _P_TABLE.append(row)


def p_exact(k: int, n: int) -> int:
    """Number of partitions of k into exactly n parts (0 outside the valid range)."""
    if k < 0 or n < 0 or n > k:
        return 0
    _extend_table(k)
    return _P_TABLE[k][n]


def p_at_most(k: int, n: int) -> int:
    """Number of partitions of k into at most n parts; p_at_most(0, n) = 1."""
    if k == 0:
        return 1
    return sum(p_exact(k, m) for m in range(1, min(n, k) + 1))


def partition_number(k: int) -> int:
    return p_at_most(k, k)


def partition_counts(k: int, n: int) -> PartitionCounts:
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if int(n) != n or not 1 <= n <= k:
        raise ValueError(f"n must satisfy 1 <= n <= k, got n={n!r}, k={k}")
    return PartitionCounts(p=partition_number(k), p_exact=p_exact(k, n), p_at_most=p_at_most(k, n))


def rep_count_by_norm(d: int, k: int) -> int:
    """alpha_{2k}: the number of weights of Lambda_t with l1 norm 2k (conjugates counted separately)."""
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    if d >= 2 * k:
        return partition_number(k) ** 2
    upper = k if d >= k + 1 else d - 1
    return sum(p_exact(k, n) * p_at_most(k, d - n) for n in range(1, upper + 1))


def dimension_lower_bound(d: int, k: int) -> int:
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    if 2 * k <= d:
        return max(2 * k, math.comb(d + 1, 2))
    return max(2 * k, math.comb(d, 2) + (d - 1) * 2 * k)
