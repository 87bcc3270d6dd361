"""Upper bounds on the LOSR fidelity and communication lower bounds.

Three families of upper bounds are provided:

* data-processing bounds, which coarse-grain both sorted vectors onto a
  two-outcome distribution;
* ``sdp_relaxation_bound``, a relaxation that only keeps the row marginal
  of the joint (target, ancilla) distribution;
* ``ordered_block_relaxation``, the ordered-simplex relaxation written as a
  concave program over a flattened joint vector. It is kept for reference
  and is *not* a valid upper bound (see its docstring).

``hayden_winter_bound`` converts the eigenvalue-compression quantity
``Delta_eps`` into a lower bound on the communication a conversion needs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import log2

import numpy as np
from scipy.optimize import isotonic_regression

from .errors import ConvergenceError, DimensionError, SizeError, ValidationError
from .lu import f_lu
from .simplex import VectorLike, as_weights, fidelity_classical

ASSIGNMENT_CAP = 2 * 10**7
_MASS_TOL = 1e-12


@dataclass(frozen=True)
class DeltaResult:
    """``Delta_eps`` in bits and the retained entries achieving it.

    ``chosen_indices`` index the input vector.
    """

    value: float
    chosen_indices: tuple[int, ...]


def delta_epsilon(p: VectorLike, eps: float) -> DeltaResult:
    """Smallest ``log2(|S| * max_{i in S} p_i)`` over index sets of mass >= 1 - eps.

    For each candidate cap ``p_j`` the cheapest feasible set whose largest
    element is ``p_j`` takes ``p_j`` and then the largest remaining entries
    not exceeding it; scanning all caps gives the exact minimum in
    ``O(d^2)``. With ``eps = 0`` the full support is used.

    Examples
    --------
    >>> round(delta_epsilon([0.54, 0.44, 0.02], 0.5623).value, 4)
    -1.1844
    """
    w = as_weights(p)
    if not (0 <= eps < 1):
        raise ValidationError(f"eps must lie in [0, 1), got {eps}")
    order = np.argsort(-w, kind="stable")
    ws = w[order]
    pos = int(np.count_nonzero(ws > 0))
    need = (1.0 - eps) * w.sum()
    if eps == 0:
        return DeltaResult(log2(pos * ws[0]), tuple(sorted(int(i) for i in order[:pos])))
    best = None
    for j in range(pos):
        csum = np.cumsum(ws[j:pos])
        hit = np.flatnonzero(csum >= need - _MASS_TOL)
        if hit.size == 0:
            break
        size = int(hit[0]) + 1
        cost = size * ws[j]
        if best is None or cost < best[0]:
            best = (cost, j, size)
    cost, j, size = best
    return DeltaResult(log2(cost), tuple(sorted(int(i) for i in order[j:j + size])))


def hayden_winter_bound(target: VectorLike, eps: float,
                        seed: VectorLike | None = None) -> tuple[float, float]:
    """Communication needed to reach fidelity ``1 - eps``.

    ``q = (Delta_delta(target) - Delta_0(seed)) / 2 + log2(1 - delta)`` with
    ``delta = eps**(1/8)``. Without a seed, ``Delta_0(seed)`` is replaced by
    0, its minimum over normalized seeds, which can only weaken the bound.
    A negative value means the bound says nothing.

    Returns
    -------
    (q_qubits, c_bits)
        ``c_bits = 2 * q_qubits`` (superdense coding).
    """
    if not (0 < eps < 1):
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")
    delta = eps ** 0.125
    d_target = delta_epsilon(target, delta).value
    d_seed = 0.0 if seed is None else delta_epsilon(seed, 0.0).value
    q = 0.5 * (d_target - d_seed) + log2(1 - delta)
    return q, 2 * q


def _bernoulli_fid(x: float, y: float) -> float:
    return fidelity_classical([x, 1 - x], [y, 1 - y])


def dp_bernoulli_bound(target: VectorLike, seed: VectorLike) -> float | None:
    """Coarse-grain both sides onto (largest entry, rest).

    No joint entry of ``target (x) ancilla`` exceeds ``p_max``, so when
    ``p_max <= q_max`` data processing gives ``F((p_max, 1-p_max),
    (q_max, 1-q_max))``. Returns ``None`` when ``p_max > q_max``.
    """
    pm = float(as_weights(target).max())
    qm = float(as_weights(seed).max())
    if pm > qm:
        return None
    return _bernoulli_fid(pm, qm)


def product_envelope(target: VectorLike, k: int) -> float:
    """Upper bound on the ``(k+1)``-th largest entry of ``target (x) a`` over all ``a``.

    Having ``k + 1`` joint entries of size at least ``tau`` needs
    ``sum_i floor(p_i / tau) >= k + 1``, since row ``i`` can hold at most
    ``p_i / tau`` ancilla entries of size ``tau / p_i``. The largest such
    ``tau`` is one of the values ``p_i / m``. The condition ignores that all
    rows share one ancilla, so the bound need not be attained.
    """
    p = as_weights(target)
    p = p[p > 0]
    best = 0.0
    for pi in p:
        for m in range(1, k + 2):
            tau = pi / m
            if tau <= best:
                break
            if np.floor(p / tau * (1 + 1e-12)).sum() >= k + 1:
                best = tau
                break
    return float(best)


def dp_manual_bound(target: VectorLike, seed: VectorLike, pivot_index: int,
                    envelope: str = "target") -> float:
    """Coarse-grain on one sorted position and lump everything else.

    With ``z`` the sorted joint vector and ``e`` an upper envelope for
    ``z[pivot_index]``, data processing gives ``F((e, 1-e), (q_k, 1-q_k))``
    when ``e < q_k`` and the trivial bound 1 otherwise.

    Parameters
    ----------
    envelope : {"target", "product"}
        ``"target"`` takes ``e = p_sorted[pivot_index]``, reproducing the
        worked coarse-graining example. That envelope is not valid in
        general: a spread-out ancilla can push later joint entries above
        the corresponding target weight. ``"product"`` uses
        ``product_envelope`` and is always a valid upper bound.
    """
    p = np.sort(as_weights(target))[::-1]
    q = np.sort(as_weights(seed))[::-1]
    if not (0 <= pivot_index < p.size):
        raise DimensionError(f"pivot_index {pivot_index} outside [0, {p.size - 1}]",
                             index=pivot_index)
    if envelope == "target":
        env = float(p[pivot_index])
    elif envelope == "product":
        env = product_envelope(p, pivot_index)
    else:
        raise ValidationError(f"unknown envelope {envelope!r}")
    qk = float(q[pivot_index]) if pivot_index < q.size else 0.0
    if env >= qk:
        return 1.0
    return _bernoulli_fid(env, qk)


def sdp_relaxation_bound(target: VectorLike, seed: VectorLike, tol: float = 1e-8,
                         cap: int = ASSIGNMENT_CAP) -> float:
    """Upper bound on ``F_LOSR`` from the row marginal of the joint vector.

    In ``F((t (x) a)_sorted, q_sorted)`` every seed atom is matched to a
    joint entry ``(j, l)``. Grouping atoms by row ``j`` and applying
    Cauchy-Schwarz inside each row (distinct ``l``, so the ancilla mass
    used is at most 1) gives

        sqrt(F) <= max_g sum_j sqrt(t_j * Q_j),

    where ``g`` assigns each seed atom to a row and ``Q_j`` is the seed mass
    sent to row ``j``. The right side is evaluated exactly by enumerating
    all ``SR(target)**SR(seed)`` assignments; ``tol`` is accepted for API
    symmetry and unused.

    Raises
    ------
    SizeError
        When the number of assignments exceeds ``cap``.
    """
    t = as_weights(target)
    t = t[t > 0]
    q = as_weights(seed)
    q = np.sort(q[q > 0])[::-1]
    d, dq = t.size, q.size
    required = d**dq
    if required > cap:
        raise SizeError(f"relaxation needs {required} assignments, above the cap of {cap}",
                        cap=cap, required=required)
    sqrt_t = np.sqrt(t)
    best = 0.0
    chunk = 1 << 20
    for start in range(0, required, chunk):
        codes = np.arange(start, min(start + chunk, required))
        mass = np.zeros((codes.size, d))
        rows = np.arange(codes.size)
        for r in range(dq):
            codes, digit = np.divmod(codes, d)
            mass[rows, digit] += q[r]
        best = max(best, float((np.sqrt(mass) @ sqrt_t).max()))
    return min(best * best, 1.0)


def _project_feasible(r0: np.ndarray, sums: np.ndarray, block: int, iters: int = 2000,
                      tol: float = 1e-13) -> np.ndarray:
    """Dykstra projection onto {nonincreasing, nonnegative} intersected with block sums."""
    x = r0.copy()
    pa = np.zeros_like(x)
    pb = np.zeros_like(x)
    for _ in range(iters):
        y = isotonic_regression(x + pa, increasing=False).x
        y = np.maximum(y, 0.0)
        pa = x + pa - y
        z = y + pb
        blocks = z.reshape(-1, block)
        blocks = blocks + ((sums - blocks.sum(axis=1)) / block)[:, None]
        z_new = blocks.ravel()
        pb = y + pb - z_new
        if np.max(np.abs(z_new - x)) < tol:
            x = z_new
            break
        x = z_new
    return x


def _residual(r: np.ndarray, sums: np.ndarray, block: int) -> float:
    mono = max(float(np.max(np.diff(r), initial=0.0)), 0.0)
    return max(mono, float(-r.min()), float(np.abs(r.reshape(-1, block).sum(axis=1) - sums).max()))


def ordered_block_relaxation(target: VectorLike, seed: VectorLike, tol: float = 1e-8,
                             max_iters: int = 5000) -> float:
    """Ordered-simplex relaxation over a flattened joint vector.

    Maximizes ``(sum_i sqrt(r_i q_i))**2`` over ``r`` of length ``d*d*d'``
    that is nonincreasing in flat order and whose consecutive blocks of
    ``d*d'`` entries sum to ``p_sorted``, with ``d = SR(target)``,
    ``d' = SR(seed)`` and ``q`` the sorted seed zero-padded. Solved by
    projected gradient ascent, projecting with Dykstra's method.

    This program does not contain the LOSR feasible set: for
    ``target = seed = (1/2, 1/2)`` it returns 1/4 while the true fidelity
    is 1. It is provided to document that fact, not as a bound.

    Raises
    ------
    ConvergenceError
        If the iterate has not settled within ``max_iters``.
    """
    p = np.sort(as_weights(target))[::-1]
    p = p[p > 0]
    q = np.sort(as_weights(seed))[::-1]
    q = q[q > 0]
    d, dq = p.size, q.size
    block = d * dq
    n = d * block
    qe = np.zeros(n)
    qe[: min(dq, n)] = q[:n]
    r = np.repeat(p / block, block)
    r = _project_feasible(r, p, block)

    def value(x):
        return float(np.sqrt(np.maximum(x, 0) * qe).sum()) ** 2

    best = value(r)
    step = 0.1
    for _ in range(max_iters):
        g = 0.5 * np.sqrt(qe) / np.sqrt(np.maximum(r, 1e-14))
        cand = _project_feasible(r + step * g / max(np.linalg.norm(g), 1e-300), p, block)
        val = value(cand)
        if val > best and _residual(cand, p, block) <= 1e-10:
            moved = np.max(np.abs(cand - r))
            r, best = cand, val
            step *= 1.5
            if moved < tol:
                return best
        else:
            step *= 0.5
            if step < tol * 1e-3:
                return best
    raise ConvergenceError("ordered block relaxation did not converge", best_value=best,
                           feasible=_residual(r, p, block) <= 1e-10)


@dataclass(frozen=True)
class BoundBundle:
    """Lower and upper bounds around ``F_LOSR`` for one (target, seed) pair.

    ``dp_upper`` is the smallest valid data-processing bound (Bernoulli and
    product-envelope coarse-grainings), or ``None`` if none applies.
    """

    f_lu: float
    f_losr_lower: float
    sdp_upper: float
    dp_upper: float | None
    hw_qubit_lower: float
    hw_cbit_lower: float

    def to_dict(self) -> dict:
        return asdict(self)


def compute_bounds(target: VectorLike, seed: VectorLike, eps: float = 0.01,
                   step: float = 0.005, restarts: int = 16, tol: float = 1e-9,
                   threads: int | None = None) -> BoundBundle:
    """Assemble a ``BoundBundle``; the LOSR value comes from ``f_losr``."""
    from .losr import f_losr

    lu = f_lu(target, seed).fidelity
    lower = f_losr(target, seed, step=step, restarts=restarts, tol=tol,
                   threads=threads).fidelity_lower_bound
    upper = sdp_relaxation_bound(target, seed)
    dps = []
    b = dp_bernoulli_bound(target, seed)
    if b is not None:
        dps.append(b)
    dim = int(np.count_nonzero(as_weights(target)))
    for k in range(dim):
        dps.append(dp_manual_bound(target, seed, k, envelope="product"))
    q, c = hayden_winter_bound(target, eps, seed)
    return BoundBundle(lu, lower, upper, min(dps) if dps else None, q, c)
