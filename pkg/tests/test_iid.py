import numpy as np
import pytest

from schmidt_bench.errors import SizeError, ValidationError
from schmidt_bench.iid import (chunk_sums, distillation_lo, distillation_lo_numeric,
                               distillation_lu, dilution_lo, dilution_lu)
from schmidt_bench.losr import f_losr_grid
from schmidt_bench.lu import f_lu, f_lu_iid_general
from schmidt_bench.simplex import uniform


def test_dilution_lu_examples():
    assert dilution_lu(uniform(4), 2, 2) == pytest.approx(1.0)
    expected = (np.sqrt(0.54) + np.sqrt(0.44) + np.sqrt(0.02)) ** 2 / 3
    assert dilution_lu([0.54, 0.02, 0.44], 3, 1) == pytest.approx(expected)
    assert dilution_lu([0.54, 0.02, 0.44], 3, 1) == pytest.approx(0.790116, abs=1e-6)


def test_dilution_lu_matches_f_lu():
    rng = np.random.default_rng(20)
    for _ in range(10):
        t = rng.dirichlet(np.ones(3))
        for d, n in [(2, 2), (3, 1), (2, 3)]:
            assert dilution_lu(t, d, n) == pytest.approx(f_lu(t, uniform(d**n)).fidelity,
                                                         abs=1e-14)


def test_dilution_lo_examples():
    val, anc = dilution_lo(uniform(4), 2, 2)
    assert val == pytest.approx(1.0)
    assert anc.weights[0] == 1.0
    val, anc = dilution_lo([0.54, 0.02, 0.44], 3, 1)
    assert val == pytest.approx(0.831628, abs=1e-6)


def test_dilution_lo_against_grid():
    rng = np.random.default_rng(21)
    step = 0.01
    for _ in range(8):
        t = rng.dirichlet(np.ones(3))
        val, _ = dilution_lo(t, 2, 2)
        grid = f_losr_grid(t, uniform(4), step).fidelity
        assert val >= grid - 1e-9
        assert val <= grid + 2 * step
        assert val >= dilution_lu(t, 2, 2) - 1e-12


def test_distillation_lu_examples():
    assert distillation_lu(uniform(4), 2, 2, 1) == pytest.approx(1.0)
    assert distillation_lu([0.7, 0.3], 2, 1, 1) == pytest.approx(
        (np.sqrt(0.35) + np.sqrt(0.15)) ** 2)
    assert distillation_lu([0.7, 0.3], 2, 2, 3) == pytest.approx(
        f_lu_iid_general(uniform(2), 2, [0.7, 0.3], 3), abs=1e-12)


def test_distillation_lo_examples():
    val, anc = distillation_lo(uniform(4), 2, 2, 1)
    assert val == pytest.approx(1.0)
    assert anc.weights[0] == pytest.approx(1.0)
    val, anc = distillation_lo([0.7, 0.3], 2, 1, 2)
    a1 = np.sqrt(0.49) + np.sqrt(0.21)
    a2 = np.sqrt(0.21) + np.sqrt(0.09)
    assert val == pytest.approx(0.5 * (a1**2 + a2**2), abs=1e-12)
    num, _ = distillation_lo_numeric(np.array([a1, a2]), 2)
    assert num == pytest.approx(val, abs=1e-10)


def test_distillation_closed_form_matches_numeric_sweep():
    rng = np.random.default_rng(22)
    for _ in range(60):
        d, m, n = int(rng.integers(2, 4)), int(rng.integers(1, 4)), int(rng.integers(1, 5))
        p = rng.dirichlet(np.ones(int(rng.integers(2, 5))))
        val, anc = distillation_lo(p, d, m, n, verify=False)
        num, a = distillation_lo_numeric(chunk_sums(p, d, m, n), d**m)
        assert num == pytest.approx(val, abs=1e-8)
        assert val >= distillation_lu(p, d, m, n) - 1e-12
        assert 0 < val <= 1 + 1e-12


def test_chunk_sums_nonincreasing():
    rng = np.random.default_rng(23)
    for _ in range(30):
        p = rng.dirichlet(np.ones(4))
        alpha = chunk_sums(p, 2, 1, 3)
        assert np.all(np.diff(alpha) <= 1e-15)
        roots = np.sqrt(np.sort(np.outer(np.outer(p, p), p).ravel())[::-1])
        assert alpha.sum() == pytest.approx(roots.sum())


def test_errors():
    with pytest.raises(ValidationError):
        dilution_lu([0.5, 0.5], 1, 2)
    with pytest.raises(SizeError):
        distillation_lu(uniform(10), 2, 1, 9, cap=10**6)
