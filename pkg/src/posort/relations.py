"""Preference relations over coordinate vectors, as interpretable data.

A relation spec says when ``x R y`` ("x is at least as preferable as y")
holds for two vectors.  The strict part, equivalence and incomparability
are all derived from two ``holds`` evaluations.  Specs are plain frozen
dataclasses so they can be parsed from config text, serialized back, and
enumerated over by test oracles.
"""

from __future__ import annotations

import ast
import enum
from dataclasses import dataclass
from typing import Union

import numpy as np

MIN = "min"
MAX = "max"


class ConfigError(ValueError):
    """Invalid relation specification or unparsable relation text."""


class DimensionMismatch(ValueError):
    """Vectors do not have the dimension the relation expects."""


@dataclass(frozen=True)
class Componentwise:
    """x R y iff x is at least as good as y on every axis (min: <=, max: >=)."""

    orientations: tuple

    def __post_init__(self):
        axes = tuple(self.orientations)
        if not axes or any(o not in (MIN, MAX) for o in axes):
            raise ConfigError("orientations must be a non-empty tuple of 'min'/'max'")
        object.__setattr__(self, "orientations", axes)


@dataclass(frozen=True)
class Cone:
    """2-d trade-off relation: x R y iff x2 <= y2 and y2 - x2 >= a*(x1 - y1)."""

    a: float

    def __post_init__(self):
        if not (self.a > 0):
            raise ConfigError("cone parameter a must be > 0")


@dataclass(frozen=True)
class IntervalQuery:
    """x R y iff x's value on `axis` is in [lo, hi] or no further from it than y's."""

    axis: int
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ConfigError("interval requires lo <= hi")


@dataclass(frozen=True)
class EqualityQuery:
    """x R y iff x's value on `axis` equals `value` (independent of y)."""

    axis: int
    value: float


@dataclass(frozen=True)
class InequalityConstraint:
    """Constraint-style relation for a `value <= 0` requirement on one axis.

    x R y iff x satisfies the constraint, or violates it no more than y does.
    """

    axis: int


@dataclass(frozen=True)
class EqualityBand:
    """Band relation for an equality constraint relaxed to `value in [lo, hi]`.

    x R y iff x is in the band, or x and y sit on the same side of the band
    with x no further out than y.  Points on opposite sides are incomparable.
    """

    axis: int
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ConfigError("band requires lo <= hi")


@dataclass(frozen=True)
class SuffixMin:
    """Componentwise-min over all axes from `offset` on (used as an objective block)."""

    offset: int

    def __post_init__(self):
        if self.offset < 0:
            raise ConfigError("offset must be >= 0")


@dataclass(frozen=True)
class Conjunction:
    """x R y iff every member relation holds."""

    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ConfigError("conjunction needs at least one member")
        object.__setattr__(self, "members", members)


@dataclass(frozen=True)
class Inverse:
    """x R y iff y R' x for the inner relation R'."""

    inner: "RelationSpec"


@dataclass(frozen=True)
class LexicographicCmop:
    """Constraints first, objectives second.

    x R y iff x is strictly better on the constraint part, or constraint-
    equivalent to y and at least as good on the objective part.
    """

    constraint_part: "RelationSpec"
    objective_part: "RelationSpec"


RelationSpec = Union[
    Componentwise,
    Cone,
    IntervalQuery,
    EqualityQuery,
    InequalityConstraint,
    EqualityBand,
    SuffixMin,
    Conjunction,
    Inverse,
    LexicographicCmop,
]


class ComparisonOutcome(enum.Enum):
    STRICTLY_BETTER = "strictly_better"
    STRICTLY_WORSE = "strictly_worse"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"


def check_dims(rel: RelationSpec, dim: int) -> None:
    """Raise DimensionMismatch when vectors of dimension `dim` cannot feed `rel`."""
    if isinstance(rel, Componentwise):
        if dim != len(rel.orientations):
            raise DimensionMismatch(
                f"componentwise relation expects dimension {len(rel.orientations)}, got {dim}"
            )
    elif isinstance(rel, Cone):
        if dim != 2:
            raise DimensionMismatch(f"cone relation expects dimension 2, got {dim}")
    elif isinstance(rel, (IntervalQuery, EqualityQuery, InequalityConstraint, EqualityBand)):
        if rel.axis >= dim:
            raise DimensionMismatch(f"axis {rel.axis} out of range for dimension {dim}")
    elif isinstance(rel, SuffixMin):
        if rel.offset >= dim:
            raise DimensionMismatch(
                f"objective block starting at axis {rel.offset} is empty for dimension {dim}"
            )
    elif isinstance(rel, Conjunction):
        for m in rel.members:
            check_dims(m, dim)
    elif isinstance(rel, Inverse):
        check_dims(rel.inner, dim)
    elif isinstance(rel, LexicographicCmop):
        check_dims(rel.constraint_part, dim)
        check_dims(rel.objective_part, dim)
    else:
        raise ConfigError(f"unknown relation kind: {type(rel).__name__}")


def _interval_dist(v: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return np.maximum(np.maximum(lo - v, v - hi), 0.0)


def holds_matrix(rel: RelationSpec, X: np.ndarray, Y: np.ndarray | None = None) -> np.ndarray:
    """Boolean matrix H with H[i, j] = (X[i] R Y[j]); Y defaults to X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = X if Y is None else np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch("x and y have different dimensions")
    check_dims(rel, X.shape[1])
    return _holds_matrix(rel, X, Y)


def _holds_matrix(rel, X, Y):
    if isinstance(rel, Componentwise):
        sign = np.array([1.0 if o == MIN else -1.0 for o in rel.orientations])
        A, B = X * sign, Y * sign
        return np.all(A[:, None, :] <= B[None, :, :], axis=-1)
    if isinstance(rel, SuffixMin):
        A, B = X[:, rel.offset:], Y[:, rel.offset:]
        return np.all(A[:, None, :] <= B[None, :, :], axis=-1)
    if isinstance(rel, Cone):
        x1, x2 = X[:, 0][:, None], X[:, 1][:, None]
        y1, y2 = Y[:, 0][None, :], Y[:, 1][None, :]
        return (x2 <= y2) & (y2 - x2 >= rel.a * (x1 - y1))
    if isinstance(rel, IntervalQuery):
        dx = _interval_dist(X[:, rel.axis], rel.lo, rel.hi)
        dy = _interval_dist(Y[:, rel.axis], rel.lo, rel.hi)
        return dx[:, None] <= dy[None, :]
    if isinstance(rel, EqualityQuery):
        ex = X[:, rel.axis] == rel.value
        return np.broadcast_to(ex[:, None], (X.shape[0], Y.shape[0])).copy()
    if isinstance(rel, InequalityConstraint):
        gx = X[:, rel.axis][:, None]
        gy = Y[:, rel.axis][None, :]
        return (gx <= 0) | (gx <= gy)
    if isinstance(rel, EqualityBand):
        hx = X[:, rel.axis][:, None]
        hy = Y[:, rel.axis][None, :]
        inside = (hx >= rel.lo) & (hx <= rel.hi)
        below = (hy <= hx) & (hx <= rel.lo)
        above = (rel.hi <= hx) & (hx <= hy)
        return inside | below | above
    if isinstance(rel, Conjunction):
        out = _holds_matrix(rel.members[0], X, Y)
        for m in rel.members[1:]:
            out &= _holds_matrix(m, X, Y)
        return out
    if isinstance(rel, Inverse):
        return _holds_matrix(rel.inner, Y, X).T
    if isinstance(rel, LexicographicCmop):
        c_xy = _holds_matrix(rel.constraint_part, X, Y)
        c_yx = _holds_matrix(rel.constraint_part, Y, X).T
        strict_c = c_xy & ~c_yx
        equiv_c = c_xy & c_yx
        f_xy = _holds_matrix(rel.objective_part, X, Y)
        return strict_c | (equiv_c & f_xy)
    raise ConfigError(f"unknown relation kind: {type(rel).__name__}")


def strict_matrix(rel: RelationSpec, X: np.ndarray) -> np.ndarray:
    """S[i, j] = (X[i] R* X[j]): i strictly preferable to j."""
    H = holds_matrix(rel, X)
    return H & ~H.T


def holds(rel: RelationSpec, x, y) -> bool:
    """Truth of x R y for two single vectors."""
    return bool(holds_matrix(rel, np.atleast_2d(x), np.atleast_2d(y))[0, 0])


def compare(rel: RelationSpec, x, y) -> ComparisonOutcome:
    """Four-way outcome of the ordered pair (x, y) under `rel`."""
    fwd = holds(rel, x, y)
    bwd = holds(rel, y, x)
    if fwd and bwd:
        return ComparisonOutcome.EQUIVALENT
    if fwd:
        return ComparisonOutcome.STRICTLY_BETTER
    if bwd:
        return ComparisonOutcome.STRICTLY_WORSE
    return ComparisonOutcome.INCOMPARABLE


def cmop_relation(ng: int, nh: int, eq_bounds=()) -> RelationSpec:
    """Constraints-before-objectives relation for evaluation rows (g.., h.., f..).

    Inequality axes expect `value <= 0`; equality axes expect the value inside
    the corresponding [a_j, b_j] band.  The objective block is everything after
    the constraint axes, minimized componentwise.
    """
    if ng < 0 or nh < 0:
        raise ConfigError("ng and nh must be >= 0")
    bounds = [tuple(b) for b in eq_bounds]
    if len(bounds) != nh:
        raise ConfigError(f"expected {nh} equality bounds, got {len(bounds)}")
    objective = SuffixMin(offset=ng + nh)
    members = [InequalityConstraint(axis=i) for i in range(ng)]
    members += [EqualityBand(axis=ng + j, lo=a, hi=b) for j, (a, b) in enumerate(bounds)]
    if not members:
        return objective
    return LexicographicCmop(constraint_part=Conjunction(tuple(members)), objective_part=objective)


# --- plain-text serialization -------------------------------------------------

def format_relation(rel: RelationSpec) -> str:
    if isinstance(rel, Componentwise):
        return "componentwise(" + ",".join(rel.orientations) + ")"
    if isinstance(rel, Cone):
        return f"cone(a={rel.a!r})"
    if isinstance(rel, IntervalQuery):
        return f"interval(axis={rel.axis},lo={rel.lo!r},hi={rel.hi!r})"
    if isinstance(rel, EqualityQuery):
        return f"equality(axis={rel.axis},value={rel.value!r})"
    if isinstance(rel, InequalityConstraint):
        return f"ineq(axis={rel.axis})"
    if isinstance(rel, EqualityBand):
        return f"eqband(axis={rel.axis},lo={rel.lo!r},hi={rel.hi!r})"
    if isinstance(rel, SuffixMin):
        return f"suffixmin(offset={rel.offset})"
    if isinstance(rel, Conjunction):
        return "and(" + ",".join(format_relation(m) for m in rel.members) + ")"
    if isinstance(rel, Inverse):
        return f"inverse({format_relation(rel.inner)})"
    if isinstance(rel, LexicographicCmop):
        return (
            "lexicographic("
            + format_relation(rel.constraint_part)
            + ","
            + format_relation(rel.objective_part)
            + ")"
        )
    raise ConfigError(f"unknown relation kind: {type(rel).__name__}")


def _split_args(body: str):
    """Split on top-level commas, respecting nested () and []."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ConfigError(f"unbalanced brackets in relation text: {body!r}")
        elif ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    if depth != 0:
        raise ConfigError(f"unbalanced brackets in relation text: {body!r}")
    tail = body[start:]
    if tail.strip() or not parts:
        parts.append(tail)
    return [p.strip() for p in parts if p.strip()]


def _kwargs(args, allowed):
    out = {}
    for a in args:
        if "=" not in a:
            raise ConfigError(f"expected key=value argument, got {a!r}")
        key, _, val = a.partition("=")
        key = key.strip()
        if key not in allowed:
            raise ConfigError(f"unexpected argument {key!r} (allowed: {sorted(allowed)})")
        try:
            out[key] = ast.literal_eval(val.strip())
        except (ValueError, SyntaxError) as exc:
            raise ConfigError(f"cannot parse value for {key!r}: {val.strip()!r}") from exc
    return out


def parse_relation(text: str) -> RelationSpec:
    """Parse relation text such as `componentwise(min,max)` or `cone(a=0.5)`."""
    text = text.strip()
    open_at = text.find("(")
    if open_at < 0 or not text.endswith(")"):
        raise ConfigError(f"relation text must look like name(...): {text!r}")
    name = text[:open_at].strip().lower()
    args = _split_args(text[open_at + 1 : -1])
    try:
        if name == "componentwise":
            return Componentwise(tuple(a.lower() for a in args))
        if name == "cone":
            return Cone(**_kwargs(args, {"a"}))
        if name == "interval":
            return IntervalQuery(**_kwargs(args, {"axis", "lo", "hi"}))
        if name == "equality":
            return EqualityQuery(**_kwargs(args, {"axis", "value"}))
        if name == "ineq":
            return InequalityConstraint(**_kwargs(args, {"axis"}))
        if name == "eqband":
            return EqualityBand(**_kwargs(args, {"axis", "lo", "hi"}))
        if name == "suffixmin":
            return SuffixMin(**_kwargs(args, {"offset"}))
        if name == "and":
            return Conjunction(tuple(parse_relation(a) for a in args))
        if name == "inverse":
            if len(args) != 1:
                raise ConfigError("inverse(...) takes exactly one relation")
            return Inverse(parse_relation(args[0]))
        if name == "lexicographic":
            if len(args) != 2:
                raise ConfigError("lexicographic(...) takes constraint and objective parts")
            return LexicographicCmop(parse_relation(args[0]), parse_relation(args[1]))
        if name == "cmop":
            kw = _kwargs(args, {"ng", "nh", "hbounds"})
            return cmop_relation(kw.get("ng", 0), kw.get("nh", 0), kw.get("hbounds", ()))
    except TypeError as exc:
        raise ConfigError(f"bad arguments for relation {name!r}: {exc}") from exc
    raise ConfigError(f"unknown relation name: {name!r}")
