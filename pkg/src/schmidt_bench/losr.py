"""Conversion fidelity under local operations and shared randomness.

For pure states the optimal LOSR fidelity is

    F_LOSR(target, seed) = max_a F((target (x) a)_sorted, seed_sorted)

over ancilla distributions ``a`` on at most ``SR(seed) * SR(target)``
symbols. Shared randomness never helps for a pure target, so no
randomness parameter appears anywhere in this module: the value is the
plain LO value.

The objective only reads the ``SR(seed)`` largest joint weights, and
moving ancilla mass from any position beyond ``SR(seed)`` onto the first
entry never lowers one of them. The search therefore runs over ancillas
with at most ``SR(seed)`` nonzero entries and pads the optimizer with
zeros to the full alphabet size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .grid import MAX_NODES, grid_top, grid_units
from .lu import f_lu, tensor_power
from .simplex import (ProbVector, SortedProbVector, VectorLike, as_weights, sort_desc,
                      sorted_fidelity)


@dataclass(frozen=True)
class LosrResult:
    """Best ancilla found and its objective value.

    Attributes
    ----------
    fidelity_lower_bound : float
        Objective at ``ancilla``; a certified lower bound on ``F_LOSR``.
    ancilla : SortedProbVector
        Optimizing ancilla distribution, zero-padded to ``SR(seed)*SR(target)``.
    method : str
        ``"grid"``, ``"refined"`` or ``"closed_form"``.
    grid_step : float or None
    """

    fidelity_lower_bound: float
    ancilla: SortedProbVector
    method: str
    grid_step: float | None = None

    @property
    def fidelity(self) -> float:
        return self.fidelity_lower_bound


def _support(v: VectorLike) -> np.ndarray:
    w = as_weights(v)
    return np.sort(w[w > 0])[::-1]


def losr_objective(target: VectorLike, seed: VectorLike, ancilla: VectorLike) -> float:
    """``F((target (x) ancilla)_sorted, seed_sorted)`` with zero padding."""
    t = as_weights(target)
    a = as_weights(ancilla)
    return sorted_fidelity(np.outer(t, a).ravel(), as_weights(seed))


def _batch_objective(t: np.ndarray, sqrt_q: np.ndarray, total: int):
    """Vectorized objective over integer grid blocks."""
    L = sqrt_q.size

    def objective(block: np.ndarray) -> np.ndarray:
        a = block / total
        z = (a[:, :, None] * t[None, None, :]).reshape(block.shape[0], -1)
        z = -np.sort(-z, axis=1)
        if z.shape[1] < L:
            z = np.pad(z, ((0, 0), (0, L - z.shape[1])))
        bc = (np.sqrt(z[:, :L]) * sqrt_q).sum(axis=1)
        return bc * bc

    return objective


def _pad_ancilla(a: np.ndarray, dim: int) -> SortedProbVector:
    out = np.zeros(max(dim, a.size))
    out[: a.size] = np.sort(a)[::-1]
    return SortedProbVector(out)


def _alphabet(t: np.ndarray, q: np.ndarray) -> tuple[int, int]:
    """(full alphabet size, effective search dimension)."""
    return t.size * q.size, q.size


def _check_step(step: float) -> int:
    if not (0 < step <= 0.25):
        raise ValidationError(f"step must lie in (0, 0.25], got {step}")
    return grid_units(step)


def _grid(t, q, step, top, threads, max_nodes):
    total = _check_step(step)
    _, k = _alphabet(t, q)
    obj = _batch_objective(t, np.sqrt(q), total)
    vals, pts, _ = grid_top(obj, total, k, top=top, max_nodes=max_nodes, threads=threads)
    return vals, pts / total


def f_losr_grid(target: VectorLike, seed: VectorLike, step: float = 0.005,
                threads: int | None = None, max_nodes: int = MAX_NODES) -> LosrResult:
    """Exhaustive search over ancillas whose entries are multiples of ``step``.

    Ties go to the lexicographically largest ancilla.

    Raises
    ------
    SizeError
        If the grid has more than ``max_nodes`` points.
    """
    t, q = _support(target), _support(seed)
    vals, pts = _grid(t, q, step, 1, threads, max_nodes)
    anc = _pad_ancilla(pts[0], _alphabet(t, q)[0])
    return LosrResult(losr_objective(t, q, anc), anc, "grid", step)


def ascend(t: np.ndarray, q: np.ndarray, a0: np.ndarray, max_iters: int = 500,
           tol: float = 1e-9) -> tuple[float, np.ndarray]:
    """Monotone ascent of the LOSR objective from ancilla ``a0``.

    For a fixed assignment of seed ranks to joint entries ``(j, l)`` the
    Bhattacharyya coefficient is ``c . sqrt(a)`` with
    ``c_l = sum sqrt(q_rank) sqrt(t_j)``, maximized on the simplex by
    ``a = c**2 / |c|**2``. Re-sorting the joint vector for the new ancilla
    can only raise the coefficient further (rearrangement inequality), so
    alternating the two steps never decreases the objective.

    Returns ``(fidelity, ancilla)``.
    """
    L = q.size
    sqrt_q = np.sqrt(q)
    sqrt_t = np.sqrt(t)
    a = np.asarray(a0, dtype=float)
    a = a / a.sum()
    best = sorted_fidelity(np.outer(t, a).ravel(), q)
    for _ in range(max_iters):
        z = np.outer(t, a).ravel()
        order = np.argsort(-z, kind="stable")[:L]
        j, l = np.divmod(order, a.size)
        c = np.zeros(a.size)
        np.add.at(c, l, sqrt_q[: order.size] * sqrt_t[j])
        new_a = c * c / (c @ c)
        val = sorted_fidelity(np.outer(t, new_a).ravel(), q)
        if val < best:
            break
        gain = val - best
        a, best = new_a, val
        if gain <= tol:
            break
    return best, a


def f_losr(target: VectorLike, seed: VectorLike, step: float = 0.005, restarts: int = 16,
           max_iters: int = 500, tol: float = 1e-9, threads: int | None = None,
           max_nodes: int = MAX_NODES) -> LosrResult:
    """Grid search followed by monotone ascent from the best grid points.

    When ``seed`` factors exactly as ``target (x) zeta`` the factor is
    returned directly with ``method="closed_form"``. The reported value is
    always the objective re-evaluated at the returned ancilla and is a lower
    bound on the true optimum; the problem is not concave.

    Examples
    --------
    >>> res = f_losr([0.85, 0.08, 0.07], [0.45, 0.45, 0.1], step=0.01)
    >>> res.fidelity > 0.82
    True
    """
    if restarts < 0 or max_iters < 0 or tol < 0:
        raise ValidationError("restarts, max_iters and tol must be nonnegative")
    t, q = _support(target), _support(seed)
    full, k = _alphabet(t, q)
    zeta = exact_convertible(t, q, tol=max(tol, 1e-9))
    if zeta is not None:
        anc = _pad_ancilla(zeta.weights, full)
        val = losr_objective(t, q, anc)
        if val >= 1 - max(tol, 1e-9):
            return LosrResult(val, anc, "closed_form", None)
    vals, pts = _grid(t, q, step, max(restarts, 1), threads, max_nodes)
    best_val = losr_objective(t, q, pts[0])
    best_a = pts[0]
    method = "grid"
    for start in pts[:restarts]:
        val, a = ascend(t, q, start, max_iters, tol)
        val = losr_objective(t, q, a)
        if val > best_val + tol:
            best_val, best_a, method = val, a, "refined"
    anc = _pad_ancilla(best_a, full)
    return LosrResult(losr_objective(t, q, anc), anc, method, step)


def exact_convertible(target: VectorLike, seed: VectorLike,
                      tol: float = 1e-9) -> SortedProbVector | None:
    """Factor ``seed = target (x) zeta`` as multisets, if possible.

    The largest remaining seed weight must equal ``t_1 * z`` for the next
    factor entry ``z``; the products ``t_j * z`` are then cancelled from the
    remaining multiset. Zero weights are ignored.

    Returns
    -------
    SortedProbVector or None
        ``zeta`` when the factorization holds entrywise within ``tol``.
    """
    t = _support(target)
    rest = list(_support(seed))
    if len(rest) % t.size:
        return None
    zeta = []
    while rest:
        z = rest[0] / t[0]
        zeta.append(z)
        for tj in t:
            want = tj * z
            arr = np.asarray(rest)
            i = int(np.argmin(np.abs(arr - want)))
            if abs(arr[i] - want) > tol:
                return None
            rest.pop(i)
    zeta = np.array(zeta)
    if abs(zeta.sum() - 1.0) > max(tol, 1e-12) * len(zeta) + 1e-12:
        return None
    return sort_desc(ProbVector(zeta / zeta.sum()))


def iid_two_qubit_target_lu_optimal(p: float, n: int, seed: VectorLike) -> float:
    """LU fidelity of making ``n`` copies of a two-qubit state from ``seed``.

    The i.i.d. optimality result claims this equals ``F_LOSR`` whenever
    ``SR(seed) <= 2n``. The returned number is always the LU value. The
    claim fails already for ``n = 1``: target (0.9, 0.1) from seed
    (0.5, 0.5) reaches 0.9 under LO against 0.8 under LU. In general the
    value is a lower bound on ``F_LOSR``.

    Raises
    ------
    DomainError
        If ``SR(seed) > 2n``. The message says whether the instance would
        satisfy the looser ``SR(seed) <= 2**n`` condition.
    """
    if not (0.5 <= p <= 1.0):
        raise ValidationError(f"p must lie in [1/2, 1], got {p}")
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n}")
    n = int(n)
    q = _support(seed)
    if q.size > 2 * n:
        looser = q.size <= 2**n
        raise DomainError(
            f"SR(seed)={q.size} exceeds 2n={2 * n} required for i.i.d. LU optimality"
            + ("; it does satisfy the looser SR(seed) <= 2^n condition" if looser else ""))
    target = tensor_power([p, 1 - p], n)
    return f_lu(target, q).fidelity
