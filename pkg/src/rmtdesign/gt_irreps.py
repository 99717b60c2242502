"""Irreducible representations of U(d) in the orthonormal Gelfand-Tsetlin basis.

The Lie-algebra images rho(E_jk) are built from GT patterns; the group
representation is evaluated as ``pi(U) = exp(rho(log U))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import schur

from .errors import ResourceError
from .weights import Weight, weyl_dimension

DEFAULT_MAX_DIM = 6000

Pattern = tuple[tuple[int, ...], ...]  # rows[0] = top row (length d), rows[-1] has length 1


def gt_patterns(w: Weight | Sequence[int]) -> list[Pattern]:
    """All GT patterns with top row ``w``, in lexicographic order of the row tuples."""
    top = tuple(w)
    out: list[Pattern] = []

    def below(row: tuple[int, ...]):
        # rows r' of length len(row)-1 with row[i] >= r'[i] >= row[i+1]
        n = len(row) - 1
        cur = [0] * n

        def rec(i):
            if i == n:
                yield tuple(cur)
                return
            for v in range(row[i + 1], row[i] + 1):
                cur[i] = v
                yield from rec(i + 1)

        yield from rec(0)

    def build(prefix: list[tuple[int, ...]]):
        last = prefix[-1]
        if len(last) == 1:
            out.append(tuple(prefix))
            return
        for r in below(last):
            prefix.append(r)
            build(prefix)
            prefix.pop()

    build([top])
    out.sort()
    return out


def _raising_coefficient_sq(p: Pattern, k: int, i: int) -> Fraction:
    """Squared matrix element <p + delta_{k,i}| E_{k,k+1} |p> (1-based row k, entry i).

    Uses l_{k,i} = m_{k,i} - i + 1 where m_{k,.} is the row of length k.
    """
    d = len(p[0])

    def row(length):
        return p[d - length]

    def l(length, j):
        return row(length)[j - 1] - j + 1

    lki = l(k, i)
    num = Fraction(1)
    for j in range(1, k + 2):
        num *= lki - l(k + 1, j)
    for j in range(1, k):
        num *= lki - l(k - 1, j) + 1
    den = Fraction(1)
    for j in range(1, k + 1):
        if j == i:
            continue
        den *= (lki - l(k, j)) * (lki - l(k, j) + 1)
    return -num / den


@dataclass(frozen=True, eq=False)
class AlgebraRep:
    """rho_lambda on the GT basis.

    ``generator_images[j][k]`` is the sparse real matrix of rho(E_{jk}) (0-based j, k).
    """

    weight: Weight
    dim: int
    patterns: list[Pattern] = field(repr=False)
    generator_images: list[list[sp.csr_matrix]] = field(repr=False)
    _stacked: sp.csr_matrix = field(repr=False)

    @property
    def d(self) -> int:
        return self.weight.d

    def generator(self, j: int, k: int) -> np.ndarray:
        """Dense rho(E_{jk})."""
        return self.generator_images[j][k].toarray()

    def algebra_image(self, a: np.ndarray) -> np.ndarray:
        """rho(A) = sum_{jk} A_jk rho(E_jk) as a dense complex matrix."""
        a = np.asarray(a)
        vec = self._stacked @ a.reshape(-1)
        return np.asarray(vec).reshape(self.dim, self.dim)


def build_algebra_rep(w: Weight | Sequence[int], max_dim: int = DEFAULT_MAX_DIM) -> AlgebraRep:
    w = w if isinstance(w, Weight) else Weight(w)
    dim = weyl_dimension(w)
    if dim > max_dim:
        raise ResourceError(f"irrep {w.label()} has dimension {dim}, above the cap {max_dim}", required=dim)
    d = w.d
    patterns = gt_patterns(w)
    if len(patterns) != dim:
        raise AssertionError(f"pattern count {len(patterns)} != Weyl dimension {dim}")
    index = {p: n for n, p in enumerate(patterns)}

    # diagonal generators: E_kk -> (row sum of length k) - (row sum of length k-1)
    sums = np.array([[sum(r) for r in reversed(p)] for p in patterns], dtype=float)  # col m: row length m+1
    gens: list[list[sp.csr_matrix | None]] = [[None] * d for _ in range(d)]
    for k in range(d):
        diag = sums[:, k] - (sums[:, k - 1] if k > 0 else 0.0)
        gens[k][k] = sp.diags(diag, format="csr")

    # E_{k,k+1} raising (0-based k), E_{k+1,k} its transpose
    for k in range(1, d):
        rows, cols, vals = [], [], []
        for src, p in enumerate(patterns):
            rowk = p[d - k]
            for i in range(1, k + 1):
                new = list(rowk)
                new[i - 1] += 1
                q = list(p)
                q[d - k] = tuple(new)
                tgt = index.get(tuple(q))
                if tgt is None:
                    continue
                c2 = _raising_coefficient_sq(p, k, i)
                if c2 <= 0:
                    continue
                rows.append(tgt)
                cols.append(src)
                vals.append(math.sqrt(c2))
        up = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
        gens[k - 1][k] = up
        gens[k][k - 1] = up.T.tocsr()

    # remaining off-diagonal generators by nested commutators
    for gap in range(2, d):
        for j in range(d - gap):
            k = j + gap
            a, b = gens[j][k - 1], gens[k - 1][k]
            gens[j][k] = (a @ b - b @ a).tocsr()
            a, b = gens[k][k - 1], gens[k - 1][j]
            gens[k][j] = (a @ b - b @ a).tocsr()

    for row in gens:
        for g in row:
            g.eliminate_zeros()
            g.sort_indices()

    # column (j*d + k) of the stacked matrix holds vec(rho(E_jk))
    blocks = [gens[j][k].tocoo() for j in range(d) for k in range(d)]
    r_idx, c_idx, v = [], [], []
    for col, b in enumerate(blocks):
        r_idx.append(b.row.astype(np.int64) * dim + b.col)
        c_idx.append(np.full(b.nnz, col, dtype=np.int64))
        v.append(b.data)
    stacked = sp.csr_matrix(
        (np.concatenate(v), (np.concatenate(r_idx), np.concatenate(c_idx))), shape=(dim * dim, d * d)
    )
    return AlgebraRep(weight=w, dim=dim, patterns=patterns, generator_images=gens, _stacked=stacked)


def unitary_log(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Anti-Hermitian log of a unitary using principal eigenphases in (-pi, pi]."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n) or np.linalg.norm(u.conj().T @ u - np.eye(n)) > tol * max(1, n):
        raise ValueError("input is not a unitary matrix within tolerance")
    # complex Schur form of a normal matrix is diagonal
    t, z = schur(u, output="complex")
    phases = np.angle(np.diag(t))
    phases = np.where(phases <= -np.pi, phases + 2 * np.pi, phases)
    return (z * (1j * phases)) @ z.conj().T


def evaluate_irrep(rep: AlgebraRep, u: np.ndarray) -> np.ndarray:
    """pi_lambda(U) = exp(rho_lambda(log U)) via a Hermitian eigendecomposition."""
    u = np.asarray(u)
    if u.shape != (rep.d, rep.d):
        raise ValueError(f"expected a {rep.d}x{rep.d} matrix, got shape {u.shape}")
    x = rep.algebra_image(unitary_log(u))
    h = -1j * x
    h = 0.5 * (h + h.conj().T)
    evals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * evals)) @ vecs.conj().T


# --- independent character oracle ---------------------------------------------------------------


def _complete_homogeneous(x: np.ndarray, kmax: int) -> np.ndarray:
    """h_0..h_kmax of the variables x (h_k = 0 for k < 0 handled by caller)."""
    h = np.zeros(kmax + 1, dtype=complex)
    h[0] = 1.0
    for xj in x:
        for k in range(1, kmax + 1):
            h[k] = h[k] + xj * h[k - 1]
    return h


def _character_jacobi_trudi(entries: tuple[int, ...], x: np.ndarray) -> complex:
    # chi_lambda = (x_1...x_d)^{lambda_d} s_mu(x) with mu = lambda - lambda_d, s_mu = det(h_{mu_i - i + j})
    d = len(entries)
    shift = entries[-1]
    mu = [e - shift for e in entries]
    h = _complete_homogeneous(x, max(mu) + d)

    def hk(k):
        return h[k] if 0 <= k < len(h) else 0.0

    m = np.array([[hk(mu[i] - i + j) for j in range(d)] for i in range(d)], dtype=complex)
    return complex(np.prod(x) ** shift * np.linalg.det(m))


def weyl_character(w: Weight | Sequence[int], phases: Sequence[float], min_separation: float = 1e-3) -> complex:
    """Character of pi_lambda at diag(e^{i theta_1}, ..., e^{i theta_d}).

    Uses the bialternant ratio det(x_j^{lambda_i + d - i}) / det(x_j^{d - i}) when the
    eigenvalues are well separated; otherwise the division-free Jacobi-Trudi form, which
    is the exact limit of the ratio.
    """
    entries = tuple(w)
    d = len(entries)
    th = np.asarray(phases, dtype=float)
    if th.shape != (d,):
        raise ValueError(f"need {d} phases")
    x = np.exp(1j * th)
    gaps = [abs(x[a] - x[b]) for a in range(d) for b in range(a + 1, d)]
    if min(gaps) < min_separation:
        return _character_jacobi_trudi(entries, x)
    num = np.array([[x[j] ** (entries[i] + d - 1 - i) for j in range(d)] for i in range(d)])
    den = np.array([[x[j] ** (d - 1 - i) for j in range(d)] for i in range(d)])
    return complex(np.linalg.det(num) / np.linalg.det(den))


def character_via_jacobi_trudi(w: Weight | Sequence[int], phases: Sequence[float]) -> complex:
    return _character_jacobi_trudi(tuple(w), np.exp(1j * np.asarray(phases, dtype=float)))


def qubit_character(k: int, theta: float) -> complex:
    """sin((2k+1) theta) / sin(theta), with the theta -> 0 limit 2k+1."""
    s = math.sin(theta)
    if abs(s) < 1e-12:
        return complex(2 * k + 1)
    return complex(math.sin((2 * k + 1) * theta) / s)


@dataclass(frozen=True)
class IrrepResiduals:
    weight: Weight
    dim: int
    homomorphism: float
    unitarity: float
    phase: float
    inverse: float
    character: float

    @property
    def worst(self) -> float:
        return max(self.homomorphism, self.unitarity, self.phase, self.inverse, self.character)


def irrep_residuals(rep: AlgebraRep, pairs, phi: float = 0.7) -> IrrepResiduals:
    """Max residuals over (U, V) pairs, spectral norm except the scalar character residual.

    Homomorphism is reported relative to d_lambda.
    """
    hom = uni = pha = inv = chi = 0.0
    eye = np.eye(rep.dim)
    for u, v in pairs:
        pu, pv = evaluate_irrep(rep, u), evaluate_irrep(rep, v)
        puv = evaluate_irrep(rep, u @ v)
        hom = max(hom, np.linalg.norm(puv - pu @ pv, 2) / rep.dim)
        uni = max(uni, np.linalg.norm(pu.conj().T @ pu - eye, 2))
        pha = max(pha, np.linalg.norm(evaluate_irrep(rep, np.exp(1j * phi) * u) - pu, 2))
        inv = max(inv, np.linalg.norm(evaluate_irrep(rep, u.conj().T) - pu.conj().T, 2))
        theta = np.angle(np.linalg.eigvals(u))
        chi = max(chi, abs(np.trace(pu) - weyl_character(rep.weight, theta)))
    return IrrepResiduals(rep.weight, rep.dim, float(hom), float(uni), float(pha), float(inv), float(chi))


__all__ = [
    "AlgebraRep",
    "build_algebra_rep",
    "evaluate_irrep",
    "gt_patterns",
    "unitary_log",
    "weyl_character",
    "character_via_jacobi_trudi",
    "qubit_character",
    "IrrepResiduals",
    "irrep_residuals",
    "DEFAULT_MAX_DIM",
]
