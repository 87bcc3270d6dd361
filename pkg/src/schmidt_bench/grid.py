"""Exhaustive search over a discretized ordered probability simplex.

Grid points are nonincreasing integer vectors of a fixed length summing to
``total = 1/step``; dividing by ``total`` gives an ordered distribution whose
entries are multiples of ``step``. Points are produced in blocks that share
their first entry, so memory stays bounded and blocks can be scored in
parallel while the final reduction stays deterministic.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import SizeError, ValidationError

MAX_NODES = 10**9
_BLOCK_ROWS = 1 << 18


def grid_units(step: float) -> int:
    """Number of grid units in the unit mass; ``step`` must divide 1."""
    if not (0 < step <= 1):
        raise ValidationError(f"step must lie in (0, 1], got {step}")
    n = int(round(1.0 / step))
    if abs(n * step - 1.0) > 1e-9:
        raise ValidationError(f"step {step} does not divide 1")
    return n


def _caps_array(total: int, dim: int, caps: Sequence[int] | None) -> np.ndarray:
    out = np.full(dim, total, dtype=np.int64)
    if caps is not None:
        c = np.asarray(caps, dtype=np.int64)[:dim]
        out[: c.size] = np.minimum(out[: c.size], c)
    return out


def count_ordered_compositions(total: int, dim: int, caps: Sequence[int] | None = None) -> int:
    """Count nonincreasing length-``dim`` integer vectors summing to ``total``.

    ``caps[i]``, when given, bounds entry ``i`` from above (entries beyond
    ``len(caps)`` are uncapped).
    """
    cap = _caps_array(total, dim, caps)
    size = total + 1
    rem = np.arange(size)[:, None]
    ub = np.arange(size)[None, :]
    # table[r, u]: ways to fill the remaining slots with sum r, all entries <= u
    table = np.zeros((size, size), dtype=np.float64)
    table[0, :] = 1.0
    for i in range(dim - 1, -1, -1):
        src_r = rem - ub
        ok = (src_r >= 0) & (ub <= cap[i])
        g = np.where(ok, table[np.clip(src_r, 0, None), ub], 0.0)
        table = np.cumsum(g, axis=1)
    return int(round(table[total, total]))


def _expand(prefix: np.ndarray, rem: np.ndarray, last: np.ndarray, slots: int, cap: int):
    if slots == 1:
        keep = (rem <= last) & (rem <= cap)
        vals = rem[keep]
        return np.column_stack([prefix[keep], vals]), np.zeros(vals.size, dtype=np.int64), vals
    lo = -(-rem // slots)
    hi = np.minimum(np.minimum(last, rem), cap)
    counts = np.maximum(hi - lo + 1, 0)
    n = int(counts.sum())
    rows = np.repeat(np.arange(prefix.shape[0]), counts)
    starts = np.cumsum(counts) - counts
    offs = np.arange(n) - np.repeat(starts, counts)
    vals = lo[rows] + offs
    return np.column_stack([prefix[rows], vals]), rem[rows] - vals, vals


def iter_ordered_compositions(total: int, dim: int, caps: Sequence[int] | None = None,
                              block_rows: int = _BLOCK_ROWS) -> Iterator[np.ndarray]:
    """Yield blocks (int arrays of shape ``(m, dim)``) covering every grid point once."""
    cap = _caps_array(total, dim, caps)
    first_lo = -(-total // dim)
    first_hi = min(total, int(cap[0]))
    pending = []
    pending_rows = 0
    for x0 in range(first_hi, first_lo - 1, -1):
        prefix = np.array([[x0]], dtype=np.int64)
        rem = np.array([total - x0], dtype=np.int64)
        last = np.array([x0], dtype=np.int64)
        for i in range(1, dim):
            prefix, rem, last = _expand(prefix, rem, last, dim - i, int(cap[i]))
            if prefix.shape[0] == 0:
                break
        if dim == 1:
            if rem[0] != 0:
                continue
        elif prefix.shape[0] == 0:
            continue
        pending.append(prefix)
        pending_rows += prefix.shape[0]
        if pending_rows >= block_rows:
            yield np.concatenate(pending)
            pending, pending_rows = [], 0
    if pending:
        yield np.concatenate(pending)


def _order(values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Indices sorting by value descending, then lexicographically descending."""
    keys = [-points[:, c] for c in range(points.shape[1] - 1, -1, -1)]
    return np.lexsort(keys + [-values])


def _block_top(block: np.ndarray, objective, top: int) -> tuple[np.ndarray, np.ndarray]:
    vals = np.asarray(objective(block), dtype=float)
    if vals.size > top:
        cut = np.partition(vals, vals.size - top)[vals.size - top]
        keep = vals >= cut
        vals, block = vals[keep], block[keep]
    idx = _order(vals, block)[:top]
    return vals[idx], block[idx]


def resolve_threads(threads: int | None) -> int:
    env = os.environ.get("SCHMIDT_BENCH_THREADS")
    if env:
        try:
            threads = int(env)
        except ValueError:
            raise ValidationError(f"SCHMIDT_BENCH_THREADS must be an integer, got {env!r}") from None
    if threads is None:
        return 1
    if threads < 1:
        raise ValidationError(f"threads must be >= 1, got {threads}")
    return threads


def grid_top(objective: Callable[[np.ndarray], np.ndarray], total: int, dim: int,
             top: int = 1, caps: Sequence[int] | None = None, max_nodes: int = MAX_NODES,
             threads: int | None = None) -> tuple[np.ndarray, np.ndarray, int]:
    """Best ``top`` grid points of a batched objective.

    ``objective`` receives an integer block of shape ``(m, dim)`` and returns
    ``m`` values. Results are ordered by value, with ties broken toward the
    lexicographically largest point, so the output does not depend on block
    order or thread count.

    Returns
    -------
    values : ndarray, shape (top,)
    points : ndarray of int, shape (top, dim)
    n_points : int
        Size of the enumerated grid.
    """
    n_points = count_ordered_compositions(total, dim, caps)
    if n_points > max_nodes:
        raise SizeError(f"grid enumeration needs {n_points} points, above the budget of "
                        f"{max_nodes}", cap=max_nodes, required=n_points)
    if n_points == 0:
        raise ValidationError("empty grid: caps exclude every point")
    blocks = iter_ordered_compositions(total, dim, caps)
    workers = resolve_threads(threads)
    if workers == 1:
        results = [_block_top(b, objective, top) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _block_top(b, objective, top), blocks))
    vals = np.concatenate([v for v, _ in results])
    pts = np.concatenate([p for _, p in results])
    idx = _order(vals, pts)[:top]
    return vals[idx], pts[idx], n_points


def grid_argmax(objective: Callable[[np.ndarray], np.ndarray], total: int, dim: int,
                caps: Sequence[int] | None = None, max_nodes: int = MAX_NODES,
                threads: int | None = None) -> tuple[float, np.ndarray, int]:
    """Single best grid point; see ``grid_top``."""
    vals, pts, n_points = grid_top(objective, total, dim, 1, caps, max_nodes, threads)
    return float(vals[0]), pts[0], n_points
