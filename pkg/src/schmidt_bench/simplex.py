"""Probability-vector arithmetic over squared Schmidt coefficients.

A bipartite pure state is determined up to local unitaries by its squared
Schmidt coefficients, so every conversion problem in this package is posed
on nonnegative weight vectors. ``ProbVector`` carries an arbitrary
nonnegative vector (its total mass is the ``scale``), ``SortedProbVector``
additionally guarantees nonincreasing order, and ``SchmidtState`` wraps a
sorted vector with an optional label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError, ValidationError

REL_TOL = 1e-12


def _freeze(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbVector:
    """Nonnegative weight vector with total mass ``scale``.

    Parameters
    ----------
    weights : array_like
        Nonnegative, finite entries. At least one entry.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = _freeze(self.weights)
        if w.size == 0:
            raise ValidationError("probability vector must have dimension >= 1")
        bad = np.flatnonzero(~np.isfinite(w) | (w < 0))
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"entry {i} is not a finite nonnegative number: {w[i]!r}",
                                  index=i)
        if w.sum() <= 0:
            raise ValidationError("probability vector has zero total mass")
        object.__setattr__(self, "weights", w)

    @property
    def scale(self) -> float:
        return float(self.weights.sum())

    @property
    def dim(self) -> int:
        return int(self.weights.size)

    @property
    def rank(self) -> int:
        """Number of strictly positive weights."""
        return int(np.count_nonzero(self.weights > 0))

    def is_normalized(self, tol: float = REL_TOL) -> bool:
        return abs(self.scale - 1.0) <= tol

    def normalized(self) -> "ProbVector":
        return type(self)(self.weights / self.scale)

    def __len__(self):
        return self.dim

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, ProbVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash(self.weights.tobytes())

    def __repr__(self):
        return f"{type(self).__name__}({np.array2string(self.weights, separator=', ')})"

    def tolist(self) -> list[float]:
        return [float(x) for x in self.weights]


@dataclass(frozen=True, eq=False, repr=False)
class SortedProbVector(ProbVector):
    """A ``ProbVector`` whose weights are nonincreasing."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(np.diff(self.weights) > 0):
            raise ValidationError("weights are not in nonincreasing order")


@dataclass(frozen=True)
class SchmidtState:
    """LU-equivalence class of a bipartite pure state."""

    dist: SortedProbVector
    label: str | None = None

    def __post_init__(self):
        if not isinstance(self.dist, SortedProbVector):
            object.__setattr__(self, "dist", sort_desc(self.dist))

    @property
    def schmidt_rank(self) -> int:
        return self.dist.rank

    @property
    def weights(self) -> np.ndarray:
        return self.dist.weights


VectorLike = Union[ProbVector, SchmidtState, Sequence[float], np.ndarray]


def as_weights(v: VectorLike) -> np.ndarray:
    """Validated read-only float array for any accepted vector form."""
    if isinstance(v, SchmidtState):
        return v.dist.weights
    if isinstance(v, ProbVector):
        return v.weights
    return ProbVector(v).weights


def as_state(v: VectorLike, label: str | None = None) -> SchmidtState:
    if isinstance(v, SchmidtState):
        return v
    return SchmidtState(sort_desc(v), label)


def sort_desc(v: VectorLike) -> SortedProbVector:
    """Sort weights into nonincreasing order; ties keep their original order."""
    w = as_weights(v)
    order = np.argsort(-w, kind="stable")
    return SortedProbVector(w[order])


def tensor(a: VectorLike, b: VectorLike) -> ProbVector:
    """Product distribution, flattened with the first factor's index major."""
    return ProbVector(np.outer(as_weights(a), as_weights(b)).ravel())


def embed(v: VectorLike, dim: int) -> ProbVector:
    """Zero-pad ``v`` to length ``dim``."""
    w = as_weights(v)
    if dim < w.size:
        raise DimensionError(f"cannot embed a vector of dimension {w.size} into dimension {dim}")
    out = np.zeros(dim)
    out[: w.size] = w
    if isinstance(v, (SortedProbVector, SchmidtState)):
        return SortedProbVector(out)
    return ProbVector(out)


def _pad_pair(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = max(p.size, q.size)
    if p.size < n:
        p = np.concatenate([p, np.zeros(n - p.size)])
    if q.size < n:
        q = np.concatenate([q, np.zeros(n - q.size)])
    return p, q


def bhattacharyya(p: VectorLike, q: VectorLike) -> float:
    """Bhattacharyya coefficient ``sum_i sqrt(p_i q_i)``, zero-padding the shorter input."""
    a, b = _pad_pair(as_weights(p), as_weights(q))
    return float(np.sqrt(a * b).sum())


def fidelity_classical(p: VectorLike, q: VectorLike) -> float:
    """Classical fidelity, the squared Bhattacharyya coefficient."""
    return bhattacharyya(p, q) ** 2


def sorted_fidelity(p: np.ndarray, q: np.ndarray) -> float:
    """Fidelity of the sorted versions of two raw weight arrays (no validation)."""
    a, b = _pad_pair(np.sort(p)[::-1], np.sort(q)[::-1])
    return float(np.sqrt(a * b).sum()) ** 2


def kp_quasi_norm(v: VectorLike, k: int, p: float) -> float:
    """``(sum of p-th powers of the k largest entries)^(1/p)``.

    For ``p < 1`` this is not a norm (subadditivity fails) but is still
    well defined on nonnegative vectors.
    """
    w = as_weights(v)
    if not 1 <= k <= w.size:
        raise DimensionError(f"k={k} outside [1, {w.size}]")
    if not p > 0:
        raise ValidationError(f"p must be positive, got {p}")
    top = np.sort(w)[::-1][:k]
    return float(np.sum(top ** p) ** (1.0 / p))


def uniform(d: int) -> SortedProbVector:
    return SortedProbVector(np.full(d, 1.0 / d))


def parse_vector(text: str) -> np.ndarray:
    """Parse a comma-separated decimal list or a JSON array.

    JSON objects of the form ``{"dist": [...]}`` are accepted too. Raises
    ``ValidationError`` naming the index of the first bad entry.
    """
    import json

    s = text.strip()
    if s.startswith("[") or s.startswith("{"):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON distribution: {exc.msg}") from None
        if isinstance(obj, dict):
            if "dist" not in obj:
                raise ValidationError('JSON object must have a "dist" key')
            obj = obj["dist"]
        if not isinstance(obj, list):
            raise ValidationError("distribution must be a JSON array")
        items = obj
    else:
        items = s.split(",")
    values = []
    for i, item in enumerate(items):
        try:
            if isinstance(item, bool):
                raise ValueError
            x = float(item)
        except (TypeError, ValueError):
            raise ValidationError(f"entry {i} is not a number: {item!r}", index=i) from None
        if not np.isfinite(x) or x < 0:
            raise ValidationError(f"entry {i} is not a finite nonnegative number: {item!r}",
                                  index=i)
        values.append(x)
    return ProbVector(values).weights
