"""Discrete weighted measures and empirical cumulative distributions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Bad input data (empty, malformed, out of range)."""


@dataclass(frozen=True)
class DiscreteMeasure:
    """A positive weight per item; uniform weights give the counting measure."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DataError("measure needs a non-empty 1-d weight vector")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DataError("all weights must be finite and > 0")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return int(self.weights.size)

    def total(self) -> float:
        return float(self.weights.sum())

    @classmethod
    def counting(cls, n: int) -> "DiscreteMeasure":
        return cls(np.ones(n))

    @classmethod
    def probability(cls, n: int) -> "DiscreteMeasure":
        return cls(np.full(n, 1.0 / n))


def measure_of(measure: DiscreteMeasure, subset) -> float:
    """Total weight of an index subset (empty subset has measure 0)."""
    idx = np.asarray(list(subset), dtype=int)
    if idx.size == 0:
        return 0.0
    n = len(measure)
    if idx.min() < 0 or idx.max() >= n:
        raise DataError(f"index out of range for measure of size {n}")
    return float(measure.weights[idx].sum())


@dataclass(frozen=True)
class Ecdf:
    """Step function over sorted distinct values; query cost is one binary search.

    ``cum[i]`` is the cumulative mass of everything <= ``values[i]``;
    it ends at 1.  ``mass[i]`` is the mass sitting exactly at ``values[i]``.
    """

    values: np.ndarray
    cum: np.ndarray
    mass: np.ndarray = field(repr=False)

    def query(self, v: float) -> float:
        return float(self.query_many(np.asarray([v]))[0])

    def query_many(self, v: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.values, v, side="right")
        out = np.zeros(len(v), dtype=float)
        hit = idx > 0
        out[hit] = self.cum[idx[hit] - 1]
        return out

    def point_mass(self, v: float) -> float:
        return float(self.point_mass_many(np.asarray([v]))[0])

    def point_mass_many(self, v: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.values, v, side="left")
        idx_c = np.minimum(idx, len(self.values) - 1)
        out = np.where(self.values[idx_c] == v, self.mass[idx_c], 0.0)
        return out.astype(float)


def ecdf_build(values, weights=None) -> Ecdf:
    """Build a (optionally weighted) empirical CDF.

    Sorts the values, collapses duplicates, and accumulates mass so that
    lookups reduce to a binary search on the distinct-value array.  With no
    weights every item carries mass 1/n.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DataError("ecdf needs a non-empty 1-d value array")
    if weights is None:
        w = np.ones(v.size)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != v.shape:
            raise DataError("weights must match values in length")
    distinct, inverse = np.unique(v, return_inverse=True)
    mass = np.bincount(inverse, weights=w, minlength=distinct.size)
    mass = mass / w.sum()
    cum = np.cumsum(mass)
    cum[-1] = 1.0  # guard against rounding drift at the top
    return Ecdf(values=distinct, cum=cum, mass=mass)


class HStar:
    """Interval-anchored empirical distribution for an equality constraint band.

    For a band [a, b] and a query z it returns the fraction of the sample
    lying in [z, b] when z < a, in [a, b] when a <= z <= b, and in [a, z]
    when z > b.
    """

    def __init__(self, values, a: float, b: float):
        v = np.asarray(values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DataError("h_star needs a non-empty 1-d value array")
        if a > b:
            raise DataError("band must satisfy a <= b")
        self.sorted = np.sort(v)
        self.n = v.size
        self.a = float(a)
        self.b = float(b)

    def _count_between(self, lo, hi):
        # number of sample points in the closed interval [lo, hi]
        left = np.searchsorted(self.sorted, lo, side="left")
        right = np.searchsorted(self.sorted, hi, side="right")
        return np.maximum(right - left, 0)

    def __call__(self, z: float) -> float:
        return float(self.eval_many(np.asarray([z]))[0])

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        lo = np.where(z < self.a, z, self.a)
        hi = np.where(z > self.b, z, self.b)
        return self._count_between(lo, hi) / self.n


def h_star_build(values, a: float, b: float) -> HStar:
    """Piecewise evaluator for the band-relation distribution (see HStar)."""
    return HStar(values, a, b)
