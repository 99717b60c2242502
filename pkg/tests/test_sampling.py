import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmtdesign.errors import ResourceError
from rmtdesign.sampling import (
    EnsembleKind,
    RngStream,
    Setting,
    haar_unitary,
    make_gate_set,
    operator_norm,
    sample_ensemble,
    sample_gate_set,
    sample_model_block_norms,
)
from rmtdesign.weights import Weight, WeightClass


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**63))
def test_haar_is_unitary(d, seed):
    u = haar_unitary(d, RngStream(seed).generator(0))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


def test_haar_trace_second_moment():
    gen = np.random.default_rng(2024)
    vals = [abs(np.trace(haar_unitary(3, gen))) ** 2 for _ in range(100_000)]
    assert abs(np.mean(vals) - 1.0) < 0.02


def test_haar_irrep_mean_vanishes():
    from rmtdesign.gt_irreps import build_algebra_rep, evaluate_irrep

    rep = build_algebra_rep(Weight((1, -1)))
    gen = np.random.default_rng(3)
    n = 20_000
    acc = np.zeros((3, 3), dtype=complex)
    acc2 = np.zeros((3, 3))
    for _ in range(n):
        m = evaluate_irrep(rep, haar_unitary(2, gen))
        acc += m
        acc2 += np.abs(m) ** 2
    mean = acc / n
    se = np.sqrt(acc2 / n / n)
    assert np.all(np.abs(mean) <= 4 * se)


def test_symmetric_gate_set_layout():
    gs = sample_gate_set(2, 2, True, RngStream(1).generator(0))
    assert gs.cardinality == 4 and gs.n_generators == 2
    np.testing.assert_array_equal(gs.gates[2], gs.gates[0].conj().T)
    np.testing.assert_array_equal(gs.gates[3], gs.gates[1].conj().T)


def test_plain_gate_set_distinct():
    gs = sample_gate_set(4, 3, False, RngStream(1).generator(0))
    assert gs.cardinality == 3
    assert all(not np.allclose(gs.gates[i], gs.gates[j]) for i in range(3) for j in range(i + 1, 3))


def test_gate_set_deterministic():
    a = sample_gate_set(3, 4, True, RngStream(99).generator(1, 5))
    b = sample_gate_set(3, 4, True, RngStream(99).generator(1, 5))
    assert a.gates.tobytes() == b.gates.tobytes()
    c = sample_gate_set(3, 4, True, RngStream(99).generator(1, 6))
    assert a.gates.tobytes() != c.gates.tobytes()


def test_make_gate_set_validates():
    with pytest.raises(ValueError):
        make_gate_set(np.ones((2, 3)), symmetric=False)


def test_kind_mapping():
    R, C = WeightClass.REAL, WeightClass.COMPLEX
    assert EnsembleKind.for_weight("plain", R) is EnsembleKind.REAL_GINIBRE
    assert EnsembleKind.for_weight("plain", C) is EnsembleKind.COMPLEX_GINIBRE
    assert EnsembleKind.for_weight("symmetric", R) is EnsembleKind.GOE
    assert EnsembleKind.for_weight("symmetric", C) is EnsembleKind.GUE
    assert Setting.coerce(True) is Setting.SYMMETRIC
    assert Setting.PLAIN.c == 1.0 and abs(Setting.SYMMETRIC.c - np.sqrt(2)) < 1e-15


def test_ensemble_structure():
    gen = np.random.default_rng(0)
    h = sample_ensemble("GOE", 7, gen)
    assert np.array_equal(h, h.T) and h.dtype == float
    g = sample_ensemble("GUE", 7, gen)
    assert np.array_equal(g, g.conj().T)
    assert sample_ensemble("RealGinibre", 7, gen).dtype == float
    assert sample_ensemble("ComplexGinibre", 7, gen).dtype == complex


@pytest.mark.parametrize(
    "kind,expected", [("GOE", 51 / 50), ("GUE", 1.0), ("RealGinibre", 1.0), ("ComplexGinibre", 1.0)]
)
def test_normalized_second_moment(kind, expected):
    gen = np.random.default_rng(17)
    n = 50
    vals = []
    for _ in range(2000):
        h = sample_ensemble(kind, n, gen)
        vals.append(np.real(np.trace(h @ h.conj().T)) / n)
    assert abs(np.mean(vals) - expected) < 0.02


def test_operator_norm_paths_agree():
    gen = np.random.default_rng(4)
    h = sample_ensemble("GUE", 30, gen)
    assert abs(operator_norm(h, hermitian=True) - operator_norm(h, hermitian=False)) < 1e-12
    a = sample_ensemble("ComplexGinibre", 30, gen)
    assert abs(operator_norm(a) - np.linalg.norm(a, 2)) < 1e-12


def test_model_single_block():
    ms = sample_model_block_norms(2, 1, "symmetric", RngStream(5))
    assert [w.entries for w in ms.weights] == [(1, -1)]
    assert ms.delta_t == ms.norms[0]


def test_model_d4_t2_blocks():
    ms = sample_model_block_norms(4, 2, "plain", RngStream(5))
    assert [w.dimension for w in ms.weights] == [15, 84, 45, 20]
    assert ms.delta_t == max(ms.norms)


def test_model_monotone_in_t():
    small = sample_model_block_norms(3, 2, "symmetric", RngStream(8), sample_index=3)
    big = sample_model_block_norms(3, 4, "symmetric", RngStream(8), sample_index=3)
    assert [w.entries for w in big.weights[: len(small.weights)]] == [w.entries for w in small.weights]
    np.testing.assert_array_equal(big.norms[: len(small.norms)], small.norms)
    assert big.delta_t >= small.delta_t


def test_model_cap():
    with pytest.raises(ResourceError):
        sample_model_block_norms(4, 6, "plain", RngStream(1), max_dim=1000)


@pytest.mark.parametrize("kind", list(EnsembleKind))
def test_large_block_mean_norm(kind):
    # E delta(lambda) -> 2; std at N=1001 is ~0.01 so a handful of samples suffices
    gen = RngStream(31).generator(int(kind is EnsembleKind.GUE), 1001)
    norms = [operator_norm(sample_ensemble(kind, 1001, gen), hermitian=kind.hermitian) for _ in range(6)]
    assert abs(np.mean(norms) - 2.0) < 0.02


def test_seed_range():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(2**64)
