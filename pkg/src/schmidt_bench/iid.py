"""Dilution and distillation fidelities with maximally entangled resources.

Dilution turns ``n`` copies of the ``d``-level maximally entangled state
(uniform weights on ``d**n`` entries) into a target; distillation turns
``n`` copies of a seed into ``m`` copies of the maximally entangled state.
Both the LU and LO optima reduce to ``(k, 1/2)`` quasi-norm expressions on
sorted weight vectors.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, SizeError, ValidationError
from .lu import TENSOR_CAP, tensor_power
from .losr import ascend
from .simplex import SortedProbVector, VectorLike, as_weights, kp_quasi_norm, sorted_fidelity


def _check_counts(**kw) -> None:
    for name, val in kw.items():
        minimum = 2 if name == "d" else 1
        if int(val) != val or val < minimum:
            raise ValidationError(f"{name} must be an integer >= {minimum}, got {val}")


def dilution_lu(target: VectorLike, d: int, n: int) -> float:
    """``d**-n * ||P||_(d**n, 1/2)``: the best LU fidelity from ``n`` max-entangled copies.

    Examples
    --------
    >>> round(dilution_lu([0.5, 0.5], 2, 1), 12)
    1.0
    """
    _check_counts(d=d, n=n)
    p = as_weights(target)
    D = int(d) ** int(n)
    return kp_quasi_norm(p, min(D, p.size), 0.5) / D


def _sorted_power(p: np.ndarray, n: int, cap: int) -> np.ndarray:
    p = p[p > 0]
    required = p.size ** n
    if required > cap:
        raise SizeError(f"tensor power needs {required} entries, above the cap of {cap}",
                        cap=cap, required=required)
    return np.sort(tensor_power(p, n))[::-1]


def dilution_lo(target: VectorLike, d: int, n: int, restarts: int = 16, max_iters: int = 500,
                tol: float = 1e-12, seed: int = 0,
                cap: int = TENSOR_CAP) -> tuple[float, SortedProbVector]:
    """Best LO dilution fidelity ``d**-n * max_a ||P (x) a||_(d**n, 1/2)``.

    This is the LOSR program with a uniform seed on ``D = d**n`` entries.
    The objective is not concave in ``a`` (the top-``D`` sum of square roots
    is a maximum of concave functions), so the solver runs the monotone
    ascent of ``losr.ascend`` from several starting points: the delta
    ancilla, uniform ancillas on the first ``j`` symbols, and ``restarts``
    Dirichlet draws from a generator seeded with ``seed``.

    Returns
    -------
    value : float
        Best objective found (a lower bound on the optimum).
    ancilla : SortedProbVector
        Ancilla of length ``D`` achieving ``value``.
    """
    _check_counts(d=d, n=n)
    t = np.sort(as_weights(target))[::-1]
    t = t[t > 0]
    D = int(d) ** int(n)
    if D * t.size > cap:
        raise SizeError(f"dilution joint vector needs {D * t.size} entries, above the cap "
                        f"of {cap}", cap=cap, required=D * t.size)
    q = np.full(D, 1.0 / D)
    rng = np.random.default_rng(seed)
    starts = []
    for j in range(1, min(D, 16) + 1):
        a = np.zeros(D)
        a[:j] = 1.0 / j
        starts.append(a)
    for _ in range(restarts):
        a = np.sort(rng.dirichlet(np.ones(min(D, 64))))[::-1]
        starts.append(np.concatenate([a, np.zeros(D - a.size)]))
    best_val, best_a = -1.0, None
    for a0 in starts:
        val, a = ascend(t, q, a0, max_iters, tol)
        if val > best_val + 1e-15:
            best_val, best_a = val, a
    anc = SortedProbVector(np.sort(best_a)[::-1])
    return sorted_fidelity(np.outer(t, anc.weights).ravel(), q), anc


def distillation_lu(seed: VectorLike, d: int, m: int, n: int, cap: int = TENSOR_CAP) -> float:
    """``d**-m * ||P^n||_(S, 1/2)`` with ``S = min(d**m, rank(P)**n)``."""
    _check_counts(d=d, m=m, n=n)
    pn = _sorted_power(as_weights(seed), int(n), cap)
    D = int(d) ** int(m)
    return float(np.sqrt(pn[: min(D, pn.size)]).sum()) ** 2 / D


def chunk_sums(seed: VectorLike, d: int, m: int, n: int, cap: int = TENSOR_CAP) -> np.ndarray:
    """``alpha_i``: sums of ``sqrt(P^n)`` (sorted) over consecutive blocks of ``d**m`` entries.

    Blocks are half-open and non-overlapping; the last block may be short.
    """
    _check_counts(d=d, m=m, n=n)
    roots = np.sqrt(_sorted_power(as_weights(seed), int(n), cap))
    D = int(d) ** int(m)
    pad = (-roots.size) % D
    return np.concatenate([roots, np.zeros(pad)]).reshape(-1, D).sum(axis=1)


def distillation_lo_numeric(alpha: np.ndarray, D: int, max_iters: int = 10000,
                            tol: float = 1e-16) -> tuple[float, np.ndarray]:
    """Maximize ``(sum_i alpha_i sqrt(a_i))**2 / D`` over the simplex numerically.

    Works in amplitude coordinates ``s = sqrt(a)``: the program becomes
    maximizing the linear function ``alpha . s`` over the convex set
    ``{s >= 0, |s| <= 1}``, solved by projected gradient ascent (clip, then
    rescale into the ball) with a step that grows while ascent continues.
    Started from the uniform distribution.

    Returns ``(value, a)``.
    """
    alpha = np.asarray(alpha, dtype=float)
    s = np.full(alpha.size, 1.0 / np.sqrt(alpha.size))
    val = float(alpha @ s)
    step = 1.0 / max(float(np.linalg.norm(alpha)), 1e-300)
    for _ in range(max_iters):
        cand = np.maximum(s + step * alpha, 0.0)
        cand /= max(float(np.linalg.norm(cand)), 1.0)
        cval = float(alpha @ cand)
        if cval <= val + tol:
            break
        s, val = cand, cval
        step *= 2.0
    a = s * s
    return val * val / D, a / a.sum()


def distillation_lo(seed: VectorLike, d: int, m: int, n: int, verify: bool = True,
                    cap: int = TENSOR_CAP) -> tuple[float, SortedProbVector]:
    """Best LO distillation fidelity and the optimal ancilla.

    The output state is ``(uniform_D (x) a)_sorted`` with ``D = d**m``, which
    is ``a_i / D`` repeated over block ``i``. Its overlap with ``P^n`` is
    ``sum_i alpha_i sqrt(a_i / D)``; Cauchy-Schwarz gives the optimizer
    ``a_i = alpha_i**2 / sum(alpha**2)`` and value ``sum(alpha**2) / D``. The
    ancilla is already sorted because ``alpha`` is nonincreasing.

    With ``verify`` the closed form is checked against
    ``distillation_lo_numeric``.

    Raises
    ------
    ConvergenceError
        If ``verify`` is set and the two values differ by more than 1e-8.
    """
    alpha = chunk_sums(seed, d, m, n, cap)
    D = int(d) ** int(m)
    s = float(alpha @ alpha)
    value = s / D
    anc = SortedProbVector(alpha * alpha / s)
    if verify:
        num, _ = distillation_lo_numeric(alpha, D)
        if abs(num - value) > 1e-8:
            raise ConvergenceError(f"numeric distillation solver gave {num}, closed form "
                                   f"{value}", best_value=num, feasible=True)
    return value, anc
