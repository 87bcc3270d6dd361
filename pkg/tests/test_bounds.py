from math import log2

import numpy as np
import pytest

from schmidt_bench.bounds import (compute_bounds, delta_epsilon, dp_bernoulli_bound,
                                  dp_manual_bound, hayden_winter_bound,
                                  ordered_block_relaxation, product_envelope,
                                  sdp_relaxation_bound)
from schmidt_bench.errors import DimensionError, SizeError, ValidationError
from schmidt_bench.losr import f_losr, f_losr_grid, losr_objective
from schmidt_bench.lu import f_lu
from schmidt_bench.simplex import uniform


def subset_oracle(p, eps):
    p = np.asarray(p, dtype=float)
    d = p.size
    masks = np.arange(1, 2**d)
    member = (masks[:, None] >> np.arange(d)) & 1
    mass = member @ p
    size = member.sum(axis=1)
    top = (member * p).max(axis=1)
    ok = mass >= (1 - eps) - 1e-12
    return log2(float((size * top)[ok].min()))


def random_dist(rng, k):
    return np.sort(rng.dirichlet(np.ones(k)))[::-1]


def test_delta_examples():
    res = delta_epsilon([0.54, 0.44, 0.02], 0.01 ** 0.125)
    assert res.value == pytest.approx(log2(0.44))
    assert res.chosen_indices == (1,)
    assert delta_epsilon(uniform(5), 0).value == pytest.approx(0.0, abs=1e-12)
    assert delta_epsilon([0.6, 0.3, 0.1], 0.15).value == pytest.approx(
        subset_oracle([0.6, 0.3, 0.1], 0.15))
    with pytest.raises(ValidationError):
        delta_epsilon([0.5, 0.5], -0.1)


def test_delta_matches_subset_oracle():
    rng = np.random.default_rng(11)
    for d in range(1, 13):
        for _ in range(3):
            p = rng.dirichlet(np.full(d, 0.7))
            for eps in np.arange(0, 0.51, 0.05):
                res = delta_epsilon(p, eps)
                assert res.value == pytest.approx(subset_oracle(p, eps), abs=1e-12)
                kept = p[list(res.chosen_indices)]
                assert kept.sum() >= 1 - eps - 1e-12
                assert res.value == pytest.approx(log2(kept.size * kept.max()))


def test_delta_zero_nonnegative():
    rng = np.random.default_rng(12)
    for _ in range(50):
        assert delta_epsilon(rng.dirichlet(np.ones(5)), 0).value >= -1e-12


def test_hayden_winter():
    q, c = hayden_winter_bound([0.54, 0.02, 0.44], 0.01)
    assert q < 0 and c == pytest.approx(2 * q)
    q, _ = hayden_winter_bound([0.3, 0.7], 1e-12, seed=[0.3, 0.7])
    assert q <= 0
    q, _ = hayden_winter_bound(uniform(4), 1e-8, seed=[1.0])
    delta = 1e-8 ** 0.125
    assert q == pytest.approx(log2(1 - delta))
    with pytest.raises(ValidationError):
        hayden_winter_bound(uniform(4), 0.0)


def test_dp_bernoulli():
    assert dp_bernoulli_bound([0.75, 0.125, 0.125], [0.5, 0.5]) is None
    assert dp_bernoulli_bound([0.6, 0.4], [0.6, 0.4]) == pytest.approx(1.0)
    assert dp_bernoulli_bound([0.6, 0.4], [0.7, 0.3]) == pytest.approx(
        (np.sqrt(0.42) + np.sqrt(0.12)) ** 2)


def test_dp_manual_worked_example():
    val = dp_manual_bound([0.75, 0.125, 0.125], [0.5, 0.5], 1)
    assert val == pytest.approx(0.8307, abs=1e-3)
    assert val >= f_losr([0.75, 0.125, 0.125], [0.5, 0.5]).fidelity
    assert dp_manual_bound([1.0, 0.0], [0.5, 0.5], 1) == pytest.approx(0.5)
    with pytest.raises(DimensionError):
        dp_manual_bound([0.5, 0.5], [0.5, 0.5], 2)


def test_target_envelope_is_not_an_upper_bound():
    # a flat ancilla lifts the second joint entry above the second target weight
    target_env = dp_manual_bound([0.9, 0.1], [0.5, 0.5], 1, envelope="target")
    reached = losr_objective([0.9, 0.1], [0.5, 0.5], [0.5, 0.5])
    assert target_env == pytest.approx(0.8)
    assert reached == pytest.approx(0.9)
    assert dp_manual_bound([0.9, 0.1], [0.5, 0.5], 1, envelope="product") >= reached


def test_product_envelope():
    assert product_envelope([0.9, 0.1], 0) == pytest.approx(0.9)
    assert product_envelope([0.9, 0.1], 1) == pytest.approx(0.45)
    # loose: the shared ancilla reaches only about 0.19 here
    env = product_envelope([0.5, 0.3, 0.2], 2)
    assert env == pytest.approx(0.25)
    rng = np.random.default_rng(15)
    for a in rng.dirichlet(np.full(3, 0.5), size=2000):
        third = np.sort(np.outer([0.5, 0.3, 0.2], a).ravel())[::-1][2]
        assert third <= env + 1e-12


def test_sound_bounds_dominate_grid():
    rng = np.random.default_rng(13)
    for _ in range(25):
        t = random_dist(rng, int(rng.integers(1, 4)))
        s = random_dist(rng, int(rng.integers(1, 4)))
        grid = f_losr_grid(t, s, 0.01).fidelity
        assert sdp_relaxation_bound(t, s) >= grid - 1e-9
        b = dp_bernoulli_bound(t, s)
        if b is not None:
            assert b >= grid - 1e-9
        for k in range(t.size):
            assert dp_manual_bound(t, s, k, envelope="product") >= grid - 1e-9


def test_sdp_examples():
    assert sdp_relaxation_bound([0.5, 0.3, 0.2], [0.5, 0.3, 0.2]) == pytest.approx(1.0)
    val = sdp_relaxation_bound([0.85, 0.08, 0.07], [0.45, 0.45, 0.1])
    assert val >= 0.8212
    assert val == pytest.approx(0.929460857725, abs=1e-9)
    for t, s in [([0.7, 0.3], [0.6, 0.4]), ([0.9, 0.1], [0.5, 0.5])]:
        assert sdp_relaxation_bound(t, s) >= f_losr(t, s).fidelity - 1e-9
    with pytest.raises(SizeError):
        sdp_relaxation_bound(uniform(4), uniform(12), cap=1000)


def test_ordered_block_relaxation_matches_cvxpy():
    cp = pytest.importorskip("cvxpy")
    for t, s in [([0.5, 0.5], [0.5, 0.5]), ([0.85, 0.08, 0.07], [0.45, 0.45, 0.1]),
                 ([0.7, 0.3], [0.6, 0.3, 0.1])]:
        p, q = np.array(t), np.array(s)
        d, dq = p.size, q.size
        n = d * d * dq
        qe = np.zeros(n)
        qe[:dq] = q
        r = cp.Variable(n)
        cons = [r >= 0, r[:-1] >= r[1:]]
        cons += [cp.sum(r[i * d * dq:(i + 1) * d * dq]) == p[i] for i in range(d)]
        prob = cp.Problem(cp.Maximize(cp.sum(cp.multiply(np.sqrt(qe), cp.sqrt(r)))), cons)
        prob.solve()
        assert ordered_block_relaxation(t, s) == pytest.approx(prob.value**2, abs=1e-5)


def test_ordered_block_relaxation_is_not_sound():
    assert ordered_block_relaxation([0.5, 0.5], [0.5, 0.5]) == pytest.approx(0.25, abs=1e-6)


def test_bundle_invariants():
    rng = np.random.default_rng(14)
    for _ in range(5):
        t, s = random_dist(rng, 3), random_dist(rng, 3)
        b = compute_bounds(t, s, step=0.02, restarts=4)
        assert b.f_lu <= b.f_losr_lower + 1e-12
        assert b.f_losr_lower <= b.sdp_upper + 1e-8
        assert b.dp_upper >= b.f_losr_lower - 1e-8
        assert b.hw_cbit_lower == pytest.approx(2 * b.hw_qubit_lower)
        assert set(b.to_dict()) == {"f_lu", "f_losr_lower", "sdp_upper", "dp_upper",
                                    "hw_qubit_lower", "hw_cbit_lower"}
