"""Embezzling states: harmonic families and searched finite catalysts.

The van Dam-Hayden state ``mu(n)`` has squared Schmidt coefficients
``1 / (j H_n)``. Appending it to any ``m``-level state and reordering gives
fidelity at least ``1 - log m / log n`` with the target. For a fixed
catalyst dimension the best LU catalyst is found by grid search over the
ordered simplex, which is how finite embezzlers are compared with the
rank the harmonic family would need.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from math import floor, log10

import numpy as np

from .errors import DomainError, ValidationError
from .grid import MAX_NODES, grid_top, grid_units
from .losr import ascend, f_losr
from .simplex import SortedProbVector, VectorLike, as_weights, sorted_fidelity

EXACT_LOG10_LIMIT = 15.0
NESTING_FROM_DIM = 7


@dataclass(frozen=True)
class HarmonicState:
    """Harmonic distribution ``w_j = 1 / (j H_n)`` on ``n`` levels."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n}")

    @property
    def harmonic_number(self) -> float:
        return float(np.sum(1.0 / np.arange(1, self.n + 1)))

    @property
    def weights(self) -> np.ndarray:
        inv = 1.0 / np.arange(1, self.n + 1)
        return inv / inv.sum()

    @property
    def dist(self) -> SortedProbVector:
        return SortedProbVector(self.weights)


def harmonic_dist(n: int) -> HarmonicState:
    return HarmonicState(n)


def randomness_embezzle_fidelity(target: VectorLike, n: int) -> float:
    """``(sum_{j<=n} sqrt(z_j / (j H_n)))**2`` with ``z = (mu(n) (x) target)_sorted``.

    Evaluated directly from the definition; see ``randomness_embezzle_curve``
    for all ``n`` at once.
    """
    h = harmonic_dist(n).weights
    t = as_weights(target)
    z = np.sort(np.outer(h, t).ravel())[::-1][:n]
    return float(np.sqrt(z * h[: z.size]).sum()) ** 2


def randomness_embezzle_curve(target: VectorLike, n_max: int) -> np.ndarray:
    """Fidelities for ``n = 1..n_max`` in one pass.

    The ``n`` largest entries of ``{t_i / j}`` only involve ``j <= n``, so
    with ``u`` the sorted merge of ``t_i / j`` the top of ``mu(n) (x) t``
    is ``u / H_n`` for every ``n``. Then
    ``F(n) = (sum_{k<=n} sqrt(u_k / k))**2 / H_n**2``.

    Returns
    -------
    ndarray, shape (n_max,)
        Entry ``n - 1`` holds the fidelity for ``n``.
    """
    if int(n_max) != n_max or n_max < 1:
        raise ValidationError(f"n_max must be a positive integer, got {n_max}")
    t = as_weights(target)
    t = t / t.sum()
    j = np.arange(1, n_max + 1)
    u = np.sort(np.outer(1.0 / j, t).ravel())[::-1][:n_max]
    partial = np.cumsum(np.sqrt(u / j))
    h = np.cumsum(1.0 / j)
    return (partial / h) ** 2


@dataclass(frozen=True)
class RequiredRank:
    """Smallest ``n`` with ``n > m**(1/eps)``.

    ``n`` is ``None`` when ``log10_n`` exceeds the exact-representation
    limit, in which case ``overflow`` is set.
    """

    n: int | None
    log10_n: float
    overflow: bool


def vdh_required_rank(m: int, eps: float) -> RequiredRank:
    """Rank the harmonic embezzler needs for error ``eps`` on an ``m``-level target.

    Examples
    --------
    >>> vdh_required_rank(3, 0.25).n
    82
    """
    if int(m) != m or m < 2:
        raise ValidationError(f"m must be an integer >= 2, got {m}")
    if not (0 < eps < 1):
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")
    k = 1.0 / eps
    log10_bound = k * log10(m)
    if log10_bound > EXACT_LOG10_LIMIT:
        return RequiredRank(None, log10_bound, True)
    if abs(k - round(k)) < 1e-12:
        n = int(m) ** int(round(k)) + 1
    else:
        n = floor(float(m) ** k) + 1
    return RequiredRank(n, log10(n), False)


def vdh_order_for_fidelity(f_tilde: float) -> float:
    """``log10(2**(1/(1-F)))``: decimal order of the harmonic rank matching fidelity ``F``."""
    if not (f_tilde < 1):
        raise DomainError(f"fidelity must be below 1, got {f_tilde}")
    if f_tilde <= 0:
        raise ValidationError(f"fidelity must be positive, got {f_tilde}")
    return log10(2.0) / (1.0 - f_tilde)


def embezzler_objective(target: VectorLike, seed: VectorLike, catalyst: VectorLike) -> float:
    """``F((target (x) r)_sorted, (seed (x) r)_sorted)`` for catalyst ``r``."""
    r = as_weights(catalyst)
    return sorted_fidelity(np.outer(as_weights(target), r).ravel(),
                           np.outer(as_weights(seed), r).ravel())


def _batch_embezzler(t: np.ndarray, s: np.ndarray, total: int):
    L = max(t.size, s.size)
    t = np.concatenate([t, np.zeros(L - t.size)])
    s = np.concatenate([s, np.zeros(L - s.size)])

    def objective(block: np.ndarray) -> np.ndarray:
        r = block / total
        m = block.shape[0]
        x = -np.sort(-(r[:, :, None] * t[None, None, :]).reshape(m, -1), axis=1)
        y = -np.sort(-(r[:, :, None] * s[None, None, :]).reshape(m, -1), axis=1)
        bc = np.sqrt(x * y).sum(axis=1)
        return bc * bc

    return objective


@dataclass(frozen=True)
class EmbezzlerSearchResult:
    """Best catalyst found by a search.

    ``ancilla`` is set by the LOSR search only and holds the output-side
    ancilla ``P'``.
    """

    catalyst: SortedProbVector
    fidelity: float
    grid_step: float | None
    heuristic_capped: bool
    ancilla: SortedProbVector | None = None


def nesting_caps(previous: VectorLike, total: int) -> list[int]:
    """Entry caps (in grid units) for the next dimension.

    The published tables list catalysts in ascending order, and the new
    largest entry may not exceed the previous optimizer's largest entry.
    Since catalysts are sorted, this caps every entry by ``max(previous)``.
    The previous optimizer padded with a zero stays feasible, so the search
    value is nondecreasing in the dimension.
    """
    prev = as_weights(previous)
    top = int(np.rint(prev.max() * total))
    return [top] * (prev.size + 1)


def embezzler_search_lu(target: VectorLike, seed: VectorLike, dim: int, step: float = 0.005,
                        nesting_cap: VectorLike | None = None, threads: int | None = None,
                        max_nodes: int = MAX_NODES) -> EmbezzlerSearchResult:
    """Grid maximization of ``embezzler_objective`` over ``dim``-level catalysts.

    Parameters
    ----------
    nesting_cap : array_like, optional
        Optimizer of the ``dim - 1`` search; restricts the grid via
        ``nesting_caps``.

    Raises
    ------
    SizeError
        When the (capped) grid exceeds ``max_nodes`` points.
    """
    if int(dim) != dim or dim < 1:
        raise ValidationError(f"dim must be a positive integer, got {dim}")
    total = grid_units(step)
    t = np.sort(as_weights(target))[::-1]
    s = np.sort(as_weights(seed))[::-1]
    caps = None
    if nesting_cap is not None:
        caps = nesting_caps(nesting_cap, total)
        if len(caps) != dim:
            raise ValidationError(f"nesting_cap must have dimension {dim - 1}, got "
                                  f"{len(caps) - 1}")
    obj = _batch_embezzler(t, s, total)
    _, pts, _ = grid_top(obj, total, int(dim), 1, caps, max_nodes, threads)
    r = SortedProbVector(pts[0] / total)
    return EmbezzlerSearchResult(r, embezzler_objective(t, s, r), step, caps is not None)


def embezzler_search_losr(target: VectorLike, seed: VectorLike, dim: int, step: float = 0.005,
                          max_rounds: int = 50, max_iters: int = 500, tol: float = 1e-12,
                          threads: int | None = None) -> EmbezzlerSearchResult:
    """Alternating maximization of ``F((P (x) P')_sorted, (Q (x) R)_sorted)`` over ``R`` and ``P'``.

    Starts from the LU search optimum with ``P' = R``, which reproduces the
    LU value, then alternates monotone ascent in ``P'`` (``R`` fixed) and in
    ``R`` (``P'`` fixed, dimension ``dim``). The result is a lower bound on
    the optimal LO embezzling fidelity at this catalyst size.
    """
    p = np.sort(as_weights(target))[::-1]
    q = np.sort(as_weights(seed))[::-1]
    if dim == 1:
        res = f_losr(p, q, step=step, tol=tol, threads=threads)
        return EmbezzlerSearchResult(SortedProbVector([1.0]), res.fidelity, step, False,
                                     res.ancilla)
    lu = embezzler_search_lu(p, q, dim, step, threads=threads)
    r = lu.catalyst.weights.copy()
    alphabet = p.size * q.size * dim
    a = np.zeros(alphabet)
    a[:dim] = r

    def value(a_, r_):
        return sorted_fidelity(np.outer(p, a_).ravel(), np.outer(q, r_).ravel())

    best = value(a, r)
    for _ in range(max_rounds):
        seed_side = np.sort(np.outer(q, r).ravel())[::-1]
        _, a = ascend(p, seed_side, a, max_iters, tol)
        target_side = np.sort(np.outer(p, a).ravel())[::-1]
        _, r = ascend(q, target_side, r, max_iters, tol)
        val = value(a, r)
        if val <= best + tol:
            best = max(best, val)
            break
        best = val
    return EmbezzlerSearchResult(SortedProbVector(np.sort(r)[::-1]), value(a, r), step, False,
                                 SortedProbVector(np.sort(a)[::-1]))


def fig5_sweep(pairs, dims, step: float = 0.005, threads: int | None = None,
               nesting_from: int = NESTING_FROM_DIM) -> list[dict]:
    """Best LU catalyst fidelity per ``(p, q)`` pair and catalyst dimension.

    Dimensions at or above ``nesting_from`` are searched with the nesting
    caps taken from the previous dimension's optimizer (computed even when
    that dimension is not requested).

    Returns
    -------
    list of dict
        Keys ``pair``, ``p``, ``q``, ``dim``, ``fidelity``, ``vdh_order``,
        ``heuristic_capped`` and ``catalyst``.
    """
    rows = []
    dims = sorted(set(int(d) for d in dims))
    for p, q in pairs:
        cache = {}

        def solve(d):
            if d in cache:
                return cache[d]
            cap = solve(d - 1).catalyst if d >= nesting_from and d > 1 else None
            cache[d] = embezzler_search_lu([p, 1 - p], [q, 1 - q], d, step, cap, threads)
            return cache[d]

        for d in dims:
            res = solve(d)
            f = res.fidelity
            order = vdh_order_for_fidelity(f) if f < 1 else float("inf")
            rows.append({"pair": f"{p}:{q}", "p": p, "q": q, "dim": d, "fidelity": f,
                         "vdh_order": order, "heuristic_capped": res.heuristic_capped,
                         "catalyst": res.catalyst.tolist()})
    return rows


@dataclass(frozen=True)
class CatalystTableRow:
    """One stored catalyst from the published tables.

    ``weights`` is the list as printed (ascending order). ``issue`` is empty
    for well-formed rows and describes the defect otherwise; ``dist`` is the
    descending, renormalized distribution.
    """

    p: float
    q: float
    dim: int
    weights: tuple[float, ...]
    dist: SortedProbVector
    issue: str = ""

    @property
    def malformed(self) -> bool:
        return bool(self.issue)

    def objective(self) -> float:
        return embezzler_objective([self.p, 1 - self.p], [self.q, 1 - self.q], self.dist)


def load_catalyst_tables() -> list[CatalystTableRow]:
    """Read the bundled catalyst tables, flagging rows with a wrong length or mass."""
    rows = []
    with resources.files(__package__).joinpath("data/catalyst_tables.csv").open() as fh:
        for rec in csv.DictReader(fh):
            w = tuple(float(x) for x in rec["weights"].split())
            dim = int(rec["dim"])
            issues = []
            if len(w) != dim:
                issues.append(f"{len(w)} entries listed for dimension {dim}")
            mass = sum(w)
            if abs(mass - 1.0) > 1e-9:
                issues.append(f"entries sum to {mass:.6g}")
            dist = SortedProbVector(np.sort(np.array(w) / mass)[::-1])
            rows.append(CatalystTableRow(float(rec["p"]), float(rec["q"]), dim, w, dist,
                                    "; ".join(issues)))
    return rows
