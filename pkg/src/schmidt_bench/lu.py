"""Optimal conversion fidelities under local unitaries.

Under local unitaries the best strategy co-sorts the Schmidt coefficients,
so the optimal fidelity is the classical fidelity of the two sorted weight
vectors. This module adds the many-copy closed form for two-qubit states and
an explicit tensor-power evaluation for general states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma, log

import numpy as np

from .errors import SizeError, ValidationError
from .simplex import VectorLike, as_weights, sorted_fidelity

TENSOR_CAP = 2 * 10**7


@dataclass(frozen=True)
class LuResult:
    """Optimal LU fidelity with the rank-order matching that achieves it.

    Attributes
    ----------
    fidelity : float
        ``F(p_sorted, q_sorted)``.
    permutation_witness : dict
        Maps the seed index holding the ``k``-th largest seed weight to the
        target index holding the ``k``-th largest target weight.
    note : str
        Free-form remark, empty unless a wrapper adds one.
    """

    fidelity: float
    permutation_witness: dict = field(default_factory=dict)
    note: str = ""


def f_lu(target: VectorLike, seed: VectorLike) -> LuResult:
    """Optimal fidelity of turning ``seed`` into ``target`` with local unitaries.

    Examples
    --------
    >>> round(f_lu([0.7, 0.3], [0.5, 0.5]).fidelity, 4)
    0.9583
    """
    t = as_weights(target)
    s = as_weights(seed)
    t_order = np.argsort(-t, kind="stable")
    s_order = np.argsort(-s, kind="stable")
    k = min(t.size, s.size)
    witness = {int(s_order[i]): int(t_order[i]) for i in range(k)}
    return LuResult(sorted_fidelity(t, s), witness)


def f_lu_mixed_unitary_equals_lu(target: VectorLike, seed: VectorLike) -> LuResult:
    """Optimal fidelity over mixed-unitary channels.

    Mixing local unitaries cannot beat the best single one for a pure
    target (fidelity is linear in the channel), so this is ``f_lu`` with a
    note recording the identity.
    """
    res = f_lu(target, seed)
    return LuResult(res.fidelity, res.permutation_witness,
                    "mixed-unitary optimum coincides with the local-unitary optimum")


def _check_bernoulli(name: str, x: float) -> None:
    if not (0.5 <= x <= 1.0):
        raise ValidationError(f"{name} must lie in [1/2, 1], got {x}")


def f_lu_iid_two_qubit(p: float, q: float, n: int) -> float:
    """LU fidelity between ``n`` copies of two two-qubit states.

    With Schmidt weights ``(p, 1-p)`` and ``(q, 1-q)``, ``p, q >= 1/2``,
    the co-sorted overlap groups strings by their number of minority
    outcomes, giving

        sqrt(F) = sum_k C(n, k) (pq)^((n-k)/2) ((1-p)(1-q))^(k/2).

    Each term is formed in log space so that ``n`` in the tens of thousands
    does not overflow the binomial coefficient.
    """
    _check_bernoulli("p", p)
    _check_bernoulli("q", q)
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n}")
    n = int(n)
    a = 0.5 * log(p * q)
    minor = (1 - p) * (1 - q)
    if minor == 0.0:
        return float(np.exp(2 * n * a))
    b = 0.5 * log(minor)
    k = np.arange(n + 1)
    log_binom = lgamma(n + 1) - np.array([lgamma(j + 1) + lgamma(n - j + 1) for j in k])
    terms = log_binom + (n - k) * a + k * b
    top = terms.max()
    log_bc = top + np.log(np.exp(terms - top).sum())
    return float(np.exp(2 * log_bc))


def tensor_power(v: VectorLike, n: int) -> np.ndarray:
    """``n``-fold product distribution of ``v`` with its zero weights dropped."""
    w = as_weights(v)
    w = w[w > 0]
    out = np.ones(1)
    for _ in range(n):
        out = np.outer(out, w).ravel()
    return out


def f_lu_iid_general(target: VectorLike, n: int, seed: VectorLike, m: int,
                     cap: int = TENSOR_CAP) -> float:
    """``F_LU(target^n, seed^m)`` by explicit tensoring and sorting.

    Zero weights are dropped before counting, so the size check is
    ``rank(target)**n * rank(seed)**m <= cap``.
    """
    for name, val in (("n", n), ("m", m)):
        if int(val) != val or val < 1:
            raise ValidationError(f"{name} must be a positive integer, got {val}")
    t = as_weights(target)
    s = as_weights(seed)
    kt = int(np.count_nonzero(t))
    ks = int(np.count_nonzero(s))
    required = kt**n * ks**m
    if required > cap:
        raise SizeError(f"explicit tensor powers need {required} joint entries, above the cap "
                        f"of {cap}", cap=cap, required=required)
    return sorted_fidelity(tensor_power(t, n), tensor_power(s, m))


def lu_decay_curve(p: float, q: float, n_max: int) -> list[tuple[int, float, float]]:
    """Fidelity of ``n`` copies with and without the reordering unitary.

    ``p`` and ``q`` are the first Schmidt weights of the two two-qubit
    states; ``q`` may fall below 1/2, in which case the unsorted overlap
    pairs the larger weight of one state with the smaller of the other.

    Returns
    -------
    list of (n, f_plain, f_lu)
        ``f_plain = F(P, Q)**n`` without reordering and ``f_lu`` the
        optimal LU value, for ``n = 1..n_max``.
    """
    for name, x in (("p", p), ("q", q)):
        if not (0.0 <= x <= 1.0):
            raise ValidationError(f"{name} must lie in [0, 1], got {x}")
    if int(n_max) != n_max or n_max < 1:
        raise ValidationError(f"n_max must be a positive integer, got {n_max}")
    plain = (np.sqrt(p * q) + np.sqrt((1 - p) * (1 - q))) ** 2
    ps, qs = max(p, 1 - p), max(q, 1 - q)
    out = []
    for n in range(1, int(n_max) + 1):
        out.append((n, float(plain**n), f_lu_iid_two_qubit(ps, qs, n)))
    return out
