"""k-Pareto-optimality engine: rankings, selections, choice, and oracles.

The central quantity is po(x): the measure of the set of items strictly
preferable to x.  Sorting by po, thresholding it (T_k), and the choice /
diversity functionals built on it all live here, together with the exact
O(n^2) pairwise computation, the O(n log n) per-axis ECDF approximation,
the constrained variant, a brute-force maximum-choice oracle for small
instances, and the closed-form unit-square reference values.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .measures import DataError, DiscreteMeasure, ecdf_build, h_star_build, measure_of
from .relations import (
    MAX,
    MIN,
    Componentwise,
    ConfigError,
    RelationSpec,
    cmop_relation,
    holds_matrix,
    strict_matrix,
)


class CyclicPreference(ValueError):
    """The strict part of the relation cycles, so front peeling cannot finish."""


class NotASelection(ValueError):
    """Subset is not closed under strict dominance."""


@dataclass(frozen=True)
class PointSet:
    """Finite weighted set of coordinate vectors."""

    points: np.ndarray
    measure: DiscreteMeasure

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise DataError("point set must contain at least one point")
        if len(self.measure) != pts.shape[0]:
            raise DataError("measure length must match the number of points")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @classmethod
    def counting(cls, points) -> "PointSet":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(pts, DiscreteMeasure.counting(pts.shape[0]))

    @classmethod
    def probability(cls, points) -> "PointSet":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(pts, DiscreteMeasure.probability(pts.shape[0]))


@dataclass(eq=False)
class PoRanking:
    """po values plus the ordering and equivalence classes they induce.

    `order` is a stable ascending-po permutation (ties keep original index
    order).  `classes` groups indices with exactly equal po, ascending.
    """

    po: np.ndarray
    order: np.ndarray
    classes: list
    class_ids: np.ndarray
    relation: RelationSpec | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return int(self.po.size)


def _ranking_from_po(po: np.ndarray, relation=None) -> PoRanking:
    order = np.argsort(po, kind="stable")
    classes, class_ids = [], np.empty(po.size, dtype=int)
    for idx in order:
        if classes and po[classes[-1][-1]] == po[idx]:
            classes[-1].append(int(idx))
        else:
            classes.append([int(idx)])
        class_ids[idx] = len(classes) - 1
    classes = [np.asarray(c, dtype=int) for c in classes]
    return PoRanking(po=po, order=order, classes=classes, class_ids=class_ids, relation=relation)


def po_exact(ps: PointSet, rel: RelationSpec) -> PoRanking:
    """Exact k-Pareto optimality by a full pairwise pass (O(n^2) holds calls)."""
    strict = strict_matrix(rel, ps.points)
    po = ps.measure.weights @ strict
    return _ranking_from_po(po, relation=rel)


def po_prob(ps: PointSet, orientations) -> PoRanking:
    """ECDF-product approximation of po for independent per-axis preferences.

    po(x) = prod_d F_d(x_d) - prod_d p_d(x_d) with F_d the weighted empirical
    CDF of axis d (orientation-adjusted) and p_d its point mass.  Values lie
    in [0, 1]; cost is O(n * M * log n).  Independence of the axes is the
    modeling assumption, not something checked at runtime.
    """
    axes = tuple(orientations)
    if len(axes) != ps.dim or any(o not in (MIN, MAX) for o in axes):
        raise DataError(f"need one 'min'/'max' orientation per axis, got {axes}")
    w = ps.measure.weights
    cum = np.ones(len(ps))
    tie = np.ones(len(ps))
    for d, orient in enumerate(axes):
        col = ps.points[:, d] if orient == MIN else -ps.points[:, d]
        ecdf = ecdf_build(col, weights=w)
        cum *= ecdf.query_many(col)
        tie *= ecdf.point_mass_many(col)
    return _ranking_from_po(cum - tie, relation=Componentwise(axes))


def po_cmop(evals: np.ndarray, ng: int, nh: int, eq_bounds=()) -> PoRanking:
    """po over constrained-evaluation rows laid out as (g_1..g_ng, h.., f..).

    Feasible rows score P(all feasible) * prod_i F_i(f_i); infeasible rows
    score the product of their per-constraint violation CDFs.  All
    distributions are empirical over the given rows, so the cost is
    O((ng + nh + M) * n * log n).
    """
    E = np.atleast_2d(np.asarray(evals, dtype=float))
    n, cols = E.shape
    m = cols - ng - nh
    if m < 1:
        raise DataError(f"evaluation rows of width {cols} leave no objective block")
    bounds = [tuple(b) for b in eq_bounds]
    if len(bounds) != nh:
        raise DataError(f"expected {nh} equality bounds, got {len(bounds)}")

    g_block = E[:, :ng]
    h_block = E[:, ng : ng + nh]
    f_block = E[:, ng + nh :]

    feasible = np.ones(n, dtype=bool)
    p_feas = 1.0
    g_factor = np.ones(n)
    h_factor = np.ones(n)
    for i in range(ng):
        col = g_block[:, i]
        feasible &= col <= 0
        ecdf = ecdf_build(col)
        p_feas *= ecdf.query(0.0)
        g_factor *= ecdf.query_many(np.maximum(col, 0.0))
    for j, (a, b) in enumerate(bounds):
        col = h_block[:, j]
        feasible &= (col >= a) & (col <= b)
        hstar = h_star_build(col, a, b)
        p_feas *= hstar(a)
        h_factor *= hstar.eval_many(col)

    f_cum = np.ones(n)
    for i in range(m):
        col = f_block[:, i]
        f_cum *= ecdf_build(col).query_many(col)

    po = np.where(feasible, p_feas * f_cum, g_factor * h_factor)
    return _ranking_from_po(po, relation=cmop_relation(ng, nh, bounds))


def t_k(ranking: PoRanking, k: float, strict: bool = False) -> np.ndarray:
    """Indices with po <= k (or < k for the strict variant)."""
    if k < 0:
        raise DataError("k must be >= 0")
    mask = ranking.po < k if strict else ranking.po <= k
    return np.flatnonzero(mask)


def fronts_from_strict(strict: np.ndarray) -> np.ndarray:
    """Front index per item by iterative peeling of non-dominated sets."""
    n = strict.shape[0]
    fronts = np.full(n, -1, dtype=int)
    dominators = strict.sum(axis=0).astype(int)
    alive = np.ones(n, dtype=bool)
    level = 0
    while alive.any():
        front = alive & (dominators == 0)
        if not front.any():
            raise CyclicPreference("no non-dominated element remains")
        fronts[front] = level
        alive &= ~front
        dominators -= strict[front].sum(axis=0).astype(int)
        level += 1
    return fronts


def pareto_fronts(ps: PointSet, rel: RelationSpec) -> np.ndarray:
    return fronts_from_strict(strict_matrix(rel, ps.points))


def _subset_indices(ps: PointSet, subset) -> np.ndarray:
    idx = np.unique(np.asarray(list(subset), dtype=int))
    if idx.size and (idx.min() < 0 or idx.max() >= len(ps)):
        raise DataError(f"subset index out of range for {len(ps)} points")
    return idx


def choice(ps: PointSet, subset, rel: RelationSpec) -> float:
    """Product-measure mass of ordered pairs in subset^2 on which R gives no
    strict verdict.  The diagonal always counts."""
    idx = _subset_indices(ps, subset)
    if idx.size == 0:
        return 0.0
    H = holds_matrix(rel, ps.points[idx])
    pair = H == H.T
    w = ps.measure.weights[idx]
    return float(w @ pair @ w)


def diversity(ps: PointSet, subset, rel: RelationSpec) -> float:
    """choice / measure^2: likelihood two random draws offer choice."""
    idx = _subset_indices(ps, subset)
    if idx.size == 0:
        raise DataError("diversity of an empty subset is undefined")
    mu = measure_of(ps.measure, idx)
    return choice(ps, idx, rel) / (mu * mu)


def is_selection(ps: PointSet, subset, rel: RelationSpec) -> bool:
    """True iff nothing outside the subset strictly dominates a member."""
    idx = _subset_indices(ps, subset)
    if idx.size in (0, len(ps)):
        return True
    inside = np.zeros(len(ps), dtype=bool)
    inside[idx] = True
    strict = strict_matrix(rel, ps.points)
    return not strict[np.ix_(~inside, inside)].any()


def choice_of_selection(ps: PointSet, subset, ranking: PoRanking) -> float:
    """Choice of a selection via the closed form mu(S)^2 - 2 sum_S w*po."""
    idx = _subset_indices(ps, subset)
    if ranking.relation is None:
        raise DataError("ranking does not carry the relation needed to verify the selection")
    if not is_selection(ps, idx, ranking.relation):
        raise NotASelection("subset is not closed under strict dominance")
    mu = measure_of(ps.measure, idx)
    return float(mu * mu - 2.0 * (ps.measure.weights[idx] * ranking.po[idx]).sum())


def _bit_indices(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def max_choice_oracle(ps: PointSet, rel: RelationSpec, m: float):
    """Enumerate every selection of measure <= m; return (best choice, argmaxes).

    Exhaustive reference oracle: walks the items in a topological order of
    the strict-dominance DAG and extends partial selections recursively, so
    each valid down-set is visited exactly once.  Capped at n <= 16.
    """
    n = len(ps)
    if n > 16:
        raise DataError(f"oracle enumeration is capped at 16 points, got {n}")
    if m < 0:
        raise DataError("budget m must be >= 0")
    strict = strict_matrix(rel, ps.points)
    topo = np.argsort(fronts_from_strict(strict), kind="stable")
    H = holds_matrix(rel, ps.points)
    pair = H == H.T
    w = ps.measure.weights

    dom_mask = [0] * n
    pair_mask = [0] * n
    for i in range(n):
        for j in range(n):
            if strict[j, i]:
                dom_mask[i] |= 1 << j
            if pair[i, j]:
                pair_mask[i] |= 1 << j

    best = -1.0
    argmax: list[int] = []

    def visit(pos: int, chosen: int, weight: float, cho: float):
        nonlocal best, argmax
        if pos == n:
            if cho > best:
                best, argmax = cho, [chosen]
            elif cho == best:
                argmax.append(chosen)
            return
        visit(pos + 1, chosen, weight, cho)
        e = int(topo[pos])
        if dom_mask[e] & ~chosen:
            return
        we = w[e]
        if weight + we > m:
            return
        delta = we * we + 2.0 * we * sum(w[i] for i in _bit_indices(chosen & pair_mask[e]))
        visit(pos + 1, chosen | (1 << e), weight + we, cho + delta)

    visit(0, 0, 0.0, 0.0)
    selections = sorted(tuple(sorted(_bit_indices(mask))) for mask in argmax)
    return best, selections


# --- closed forms and Monte Carlo on the unit square ---------------------------

def analytic_p_tk(k: float) -> float:
    """Mass of T_k for two independent uniform axes: k - k*ln(k)."""
    if not (0 < k <= 1):
        raise DataError("k must lie in (0, 1]")
    return k - k * math.log(k)


def analytic_cho_tk(k: float) -> float:
    """Choice of T_k for two independent uniform axes."""
    if not (0 < k <= 1):
        raise DataError("k must lie in (0, 1]")
    p = k - k * math.log(k)
    return p * p - k * k * (0.5 - math.log(k))


DENSITIES = ("uniform", "rarefy2", "rarefy4")


def mc_sample_square(n: int, density: str = "uniform", seed: int = 0) -> PointSet:
    """Sample the unit square under one of three separable densities.

    "uniform" is the area measure; "rarefy2" thins small second coordinates
    (density 2*x2); "rarefy4" thins small values on both axes (4*x1*x2).
    Inverse-CDF sampling per axis; weights are uniform 1/n.
    """
    if n < 1:
        raise DataError("need at least one sample")
    if density not in DENSITIES:
        raise DataError(f"density must be one of {DENSITIES}")
    rng = np.random.default_rng(seed)
    u = rng.random((n, 2))
    if density == "rarefy2":
        u[:, 1] = np.sqrt(u[:, 1])
    elif density == "rarefy4":
        u = np.sqrt(u)
    return PointSet(u, DiscreteMeasure.probability(n))


def find_k_for_measure(source, target_fraction: float, orientations=None) -> float:
    """Smallest k with |T_k|/n at least the target fraction.

    `source` is a PoRanking, or a PointSet ranked here with po_prob under
    all-min orientations (override via `orientations`).
    """
    if not (0 < target_fraction <= 1):
        raise DataError("target fraction must lie in (0, 1]")
    if isinstance(source, PointSet):
        axes = orientations if orientations is not None else (MIN,) * source.dim
        ranking = po_prob(source, axes)
    else:
        ranking = source
    po_sorted = np.sort(ranking.po)
    need = math.ceil(target_fraction * po_sorted.size)
    return float(po_sorted[need - 1])


# --- CSV interfaces -------------------------------------------------------------

def load_points_csv(path) -> PointSet:
    """Read points from CSV with header x1,...,xM[,weight]; weight defaults to 1."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip().lower() for h in rows[0]]
    has_weight = bool(header) and header[-1] == "weight"
    dim = len(header) - (1 if has_weight else 0)
    if dim < 1:
        raise DataError(f"{path}: no coordinate columns")
    body = [r for r in rows[1:] if any(cell.strip() for cell in r)]
    if not body:
        raise DataError(f"{path}: no data rows beyond the header")
    try:
        data = np.array([[float(c) for c in r] for r in body])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric cell ({exc})") from exc
    if data.shape[1] != len(header):
        raise DataError(f"{path}: row width does not match header")
    points = data[:, :dim]
    weights = data[:, dim] if has_weight else np.ones(len(body))
    return PointSet(points, DiscreteMeasure(weights))


def save_ranking_csv(path, ranking: PoRanking, fronts: np.ndarray | None = None) -> None:
    """Write `index,po,class[,front]` rows in index order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["index", "po", "class"] + (["front"] if fronts is not None else [])
        writer.writerow(header)
        for i in range(len(ranking)):
            row = [i, repr(float(ranking.po[i])), int(ranking.class_ids[i])]
            if fronts is not None:
                row.append(int(fronts[i]))
            writer.writerow(row)
