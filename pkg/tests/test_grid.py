import itertools

import numpy as np
import pytest

from schmidt_bench.errors import SizeError, ValidationError
from schmidt_bench.grid import (count_ordered_compositions, grid_argmax, grid_top,
                                grid_units, iter_ordered_compositions)


def brute(total, dim, caps=None):
    out = []
    for v in itertools.product(range(total + 1), repeat=dim):
        if sum(v) != total or any(v[i] < v[i + 1] for i in range(dim - 1)):
            continue
        if caps is not None and any(v[i] > caps[i] for i in range(min(dim, len(caps)))):
            continue
        out.append(v)
    return sorted(out)


@pytest.mark.parametrize("total,dim,caps", [(10, 3, None), (12, 4, None), (7, 1, None),
                                            (9, 4, [5, 3]), (6, 6, None), (8, 3, [8, 2, 2])])
def test_enumeration_matches_brute_force(total, dim, caps):
    pts = np.concatenate(list(iter_ordered_compositions(total, dim, caps, block_rows=3)))
    assert sorted(map(tuple, pts.tolist())) == brute(total, dim, caps)
    assert count_ordered_compositions(total, dim, caps) == len(brute(total, dim, caps))


def test_grid_units():
    assert grid_units(0.005) == 200
    assert grid_units(0.25) == 4
    with pytest.raises(ValidationError):
        grid_units(0.3)
    with pytest.raises(ValidationError):
        grid_units(0.0)


def test_budget_guard():
    with pytest.raises(SizeError) as exc:
        grid_argmax(lambda b: b[:, 0], 200, 8, max_nodes=10**6)
    assert exc.value.required == count_ordered_compositions(200, 8)


def test_tie_break_is_lexicographically_largest():
    val, pt, _ = grid_argmax(lambda b: np.zeros(b.shape[0]), 10, 3)
    assert val == 0.0
    assert pt.tolist() == [10, 0, 0]
    # ties among interior points
    val, pt, _ = grid_argmax(lambda b: -np.abs(b[:, 1] - 3.0), 10, 3)
    assert pt.tolist() == [7, 3, 0]


def test_threads_do_not_change_result():
    rng = np.random.default_rng(0)
    w = rng.random(4)

    def obj(b):
        return np.round(np.sqrt(b) @ w, 3)

    single = grid_top(obj, 60, 4, top=5, threads=1)
    multi = grid_top(obj, 60, 4, top=5, threads=4)
    np.testing.assert_array_equal(single[0], multi[0])
    np.testing.assert_array_equal(single[1], multi[1])


def test_env_var_overrides_threads(monkeypatch):
    from schmidt_bench.grid import resolve_threads

    monkeypatch.setenv("SCHMIDT_BENCH_THREADS", "3")
    assert resolve_threads(1) == 3
    monkeypatch.setenv("SCHMIDT_BENCH_THREADS", "x")
    with pytest.raises(ValidationError):
        resolve_threads(1)
