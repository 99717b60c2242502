import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import expi

from oracles import ei_quadrature
from rmtdesign.bounds import (
    B_CONSTANT,
    exponential_integral,
    global_bound,
    global_threshold,
    growth_constant,
    product_bound_delta_t,
    qubit_closed_form,
    spectral_gap_tail_sum,
    tail_bound_single,
    union_bound_delta_t,
)
from rmtdesign.sampling import EnsembleKind
from rmtdesign.weights import WeightClass, classify, enumerate_weights

eps_st = st.floats(0.01, 4.0)


def test_single_block_values():
    for kind in EnsembleKind:
        assert tail_bound_single(kind, 17, 0.0) == 0.5
    assert abs(tail_bound_single("ComplexGinibre", 10, 0.5) - 0.0410424993119494) < 1e-15
    for n, e in [(3, 0.2), (40, 1.1)]:
        assert tail_bound_single("GUE", n, e) == tail_bound_single("RealGinibre", n, e)


def test_single_block_rejects_bad_input():
    with pytest.raises(ValueError):
        tail_bound_single("GOE", 0, 0.1)
    with pytest.raises(ValueError):
        tail_bound_single("GOE", 4, -0.1)


def test_union_d4_t2_plain():
    # dims 15, 84, 20 real (RealGinibre) and 45 complex (ComplexGinibre)
    assert abs(union_bound_delta_t(4, 2, 0.3, "plain") - 0.47798557320636736) < 1e-14


def test_pair_halving_identity():
    for d, t, s in [(3, 4, "symmetric"), (4, 3, "plain"), (5, 2, "symmetric")]:
        for eps in (0.2, 0.5):
            split = 0.0
            for w in enumerate_weights(d, t):
                kind = EnsembleKind.for_weight(s, classify(w))
                f = tail_bound_single(kind, w.dimension, eps)
                split += f if classify(w) is WeightClass.REAL else 0.5 * f
            assert abs(union_bound_delta_t(d, t, eps, s, clamp=False) - split) <= 1e-13 * split


@pytest.mark.parametrize("setting", ["plain", "symmetric"])
def test_qubit_identity(setting):
    for t in (1, 5, 50, 500):
        for eps in np.linspace(0.05, 3.0, 60):
            u = union_bound_delta_t(2, t, eps, setting, clamp=False)
            q = qubit_closed_form(t, eps, setting, clamp=False)
            assert abs(u - q) <= 1e-12 * q
            assert abs(union_bound_delta_t(2, t, eps, setting) - qubit_closed_form(t, eps, setting)) <= 1e-12


def test_qubit_limit_form():
    for eps in (0.3, 1.0, 2.0):
        expected = math.exp(-eps**2 / 4) / (2 * (math.exp(eps**2 / 2) - 1))
        assert abs(qubit_closed_form(None, eps, "symmetric", clamp=False) - expected) <= 1e-14 * expected
        assert qubit_closed_form(math.inf, eps, "symmetric", clamp=False) == qubit_closed_form(None, eps, "symmetric", clamp=False)
        vals = [qubit_closed_form(t, eps, clamp=False) for t in (1, 2, 10, 100)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= qubit_closed_form(None, eps, clamp=False)
    with pytest.raises(ValueError):
        qubit_closed_form(3, 0.0)


def test_product_strictly_below_union():
    assert product_bound_delta_t(4, 6, 0.2, "symmetric", clamp=False) < union_bound_delta_t(4, 6, 0.2, "symmetric", clamp=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(1, 4), eps_st, st.sampled_from(["plain", "symmetric"]))
def test_bound_orderings(d, t, eps, s):
    u = union_bound_delta_t(d, t, eps, s)
    p = product_bound_delta_t(d, t, eps, s)
    assert 0.0 <= p <= u <= 1.0
    assert union_bound_delta_t(d, t, eps * 1.1, s) <= u
    assert union_bound_delta_t(d, t + 1, eps, s) >= u
    assert product_bound_delta_t(d, t + 1, eps, s) >= p


def test_first_order_agreement():
    for eps in (1.5, 2.0, 3.0):
        u = union_bound_delta_t(3, 3, eps, "plain")
        p = product_bound_delta_t(3, 3, eps, "plain")
        assert u < 1e-2 and (u - p) <= u * u


def test_ei_oracle_values():
    assert abs(exponential_integral(1.0) - 1.8951178163559366) < 1e-12
    for x in (0.01, 0.5, 1.0, 3.0, 5.130199320647456, 6.0, 12.0, 39.0, 41.0, 60.0, 200.0):
        ref = expi(x)
        assert abs(exponential_integral(x) - ref) <= 1e-10 * abs(ref)
    for x in (0.2, 2.0, 7.5, 25.0):
        ref = ei_quadrature(x)
        assert abs(exponential_integral(x) - ref) <= 1e-10 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(st.floats(3.0001, 300.0))
def test_ei_upper_estimate(x):
    assert 1.5 * math.exp(x) / x > exponential_integral(x)


def test_ei_domain():
    with pytest.raises(ValueError):
        exponential_integral(0.0)


def test_b_constant():
    assert abs(B_CONSTANT - 3855.93) < 0.01
    assert abs(B_CONSTANT - 3855.9280289711705) < 1e-8


def test_threshold():
    assert abs(global_threshold(4, "plain") - 0.777560150778107) < 1e-12
    assert abs(global_threshold(4, "symmetric") - math.sqrt(2) * 0.777560150778107) < 1e-12
    assert global_threshold(2) == 0.0


def test_global_bound_d2_branch():
    r = global_bound(2, 0.8, "symmetric")
    assert r.valid and r.raw == qubit_closed_form(None, 0.8, "symmetric", clamp=False)


def test_global_bound_flags_and_monotone():
    thr = global_threshold(4, "plain")
    assert not global_bound(4, 0.5, "plain").valid
    assert 0.0 <= global_bound(4, 0.5, "plain").value <= 1.0
    grid = np.linspace(thr + 1e-3, 4.0, 80)
    raws = [global_bound(4, e, "plain").raw for e in grid]
    assert all(r.valid for r in (global_bound(4, e, "plain") for e in grid))
    assert all(b < a for a, b in zip(raws, raws[1:]))
    assert global_bound(4, 3.0, "plain").value < 1e-3


def test_global_bound_dominates_union_where_small():
    # the global bound covers every t, so it cannot be below a finite-t union bound
    for eps in (2.0, 2.5, 3.0):
        g = global_bound(3, eps, "plain").raw
        assert g >= union_bound_delta_t(3, 6, eps, "plain", clamp=False)


def test_tail_sum_d2_approaches_closed_form():
    limit = qubit_closed_form(None, 0.7, "symmetric", clamp=False)
    prev = 0.0
    for t_max in (5, 20, 80, 320):
        ts = spectral_gap_tail_sum(2, 0.7, "symmetric", t_max)
        assert prev <= ts.partial_sum <= limit * (1 + 1e-12)
        assert ts.total >= limit * (1 - 1e-12)
        prev = ts.partial_sum
    assert limit - prev < 1e-12


@pytest.mark.parametrize("d,eps,setting", [(3, 0.5, "plain"), (4, 1.0, "plain"), (4, 1.3, "symmetric")])
def test_tail_sum_increments_bounded(d, eps, setting):
    for t_max in range(1, 6):
        a = spectral_gap_tail_sum(d, eps, setting, t_max)
        b = spectral_gap_tail_sum(d, eps, setting, t_max + 1)
        assert b.partial_sum - a.partial_sum <= a.tail_estimate
        assert a.tail_estimate <= a.integral_bound


def test_tail_sum_d4_finite():
    ts = spectral_gap_tail_sum(4, 1.0, "plain", 6)
    assert math.isfinite(ts.total) and ts.total < 1.0


def test_growth_constant():
    from collections import Counter

    from oracles import brute_weights

    assert growth_constant(2, 10) == 1.0
    for d in (3, 4):
        counts = Counter(sum(abs(x) for x in v) // 2 for v in brute_weights(d, 6))
        assert growth_constant(d, 6) == max(counts[k] / k ** (d - 2) for k in range(1, 7))
    # d=3: alpha_4 = 3 from (2,0,-2), (2,-1,-1), (1,1,-2)
    assert growth_constant(3, 6) == 1.5
