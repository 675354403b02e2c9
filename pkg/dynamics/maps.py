"""Piecewise-linear interval maps and the multivalued extension of a map at its breakpoints.

Values of the map at partition points are never stored. Everything goes
through the branches, so a breakpoint has a left value and a right value.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Sequence

from .exceptions import ContextMismatchError, MapSpecError
from .scalars import ONE, ZERO, Scalar, as_scalar, common_context

logger = logging.getLogger(__name__)

MAP_TYPES = ("tent", "beta", "uniform_pl", "explicit")


class Direction(str, Enum):
    INCREASING = "+"
    DECREASING = "-"

    @classmethod
    def parse(cls, value: str, field_name: str = "directions") -> "Direction":
        token = str(value).strip().replace("−", "-")
        if token in ("+", "inc", "increasing"):
            return cls.INCREASING
        if token in ("-", "dec", "decreasing"):
            return cls.DECREASING
        raise MapSpecError(f"Unknown direction {value!r}; expected '+' or '-'", field_name)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with exact endpoints."""

    lo: Scalar
    hi: Scalar

    def __post_init__(self):
        object.__setattr__(self, "lo", as_scalar(self.lo))
        object.__setattr__(self, "hi", as_scalar(self.hi))
        if self.hi < self.lo:
            raise ValueError(f"Interval endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Scalar:
        return self.hi - self.lo

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: Scalar) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersection(self, other: "Interval") -> "Interval | None":
        """Nondegenerate intersection, or None."""
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo < hi:
            return Interval(lo, hi)
        return None

    def to_literal(self) -> list:
        return [self.lo.to_literal(), self.hi.to_literal()]

    def describe(self) -> str:
        return f"[{self.lo.describe()}, {self.hi.describe()}]"


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of nondegenerate closed intervals, sorted and merged."""

    intervals: tuple[Interval, ...] = ()

    @classmethod
    def of(cls, items: Iterable[Interval | tuple]) -> "IntervalSet":
        pieces = []
        for item in items:
            interval = item if isinstance(item, Interval) else Interval(*item)
            if not interval.is_degenerate:
                pieces.append(interval)
        pieces.sort(key=lambda iv: iv.lo)
        merged: list[Interval] = []
        for interval in pieces:
            if merged and interval.lo <= merged[-1].hi:
                if interval.hi > merged[-1].hi:
                    merged[-1] = Interval(merged[-1].lo, interval.hi)
            else:
                merged.append(interval)
        return cls(tuple(merged))

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls((Interval(ZERO, ONE),))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    @property
    def is_full(self) -> bool:
        return len(self.intervals) == 1 and self.intervals[0].lo == 0 and self.intervals[0].hi == 1

    @property
    def measure(self) -> Scalar:
        total = ZERO
        for interval in self.intervals:
            total = total + interval.length
        return total

    def endpoints(self) -> list[Scalar]:
        points = []
        for interval in self.intervals:
            points.extend((interval.lo, interval.hi))
        return points

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.of(self.intervals + other.intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        pieces = []
        for a in self.intervals:
            for b in other.intervals:
                meet = a.intersection(b)
                if meet is not None:
                    pieces.append(meet)
        return IntervalSet.of(pieces)

    def interior_intersects(self, other: "IntervalSet") -> bool:
        return bool(self.intersection(other))

    def issubset(self, other: "IntervalSet") -> bool:
        return all(any(b.contains_interval(a) for b in other.intervals) for a in self.intervals)

    def complement(self) -> "IntervalSet":
        """Closure of ``[0, 1]`` minus this set."""
        gaps = []
        cursor = ZERO
        for interval in self.intervals:
            gaps.append((cursor, interval.lo))
            cursor = interval.hi
        gaps.append((cursor, ONE))
        return IntervalSet.of(gaps)

    def to_literal(self) -> list:
        return [interval.to_literal() for interval in self.intervals]

    def describe(self) -> str:
        if not self.intervals:
            return "∅"
        return " ∪ ".join(interval.describe() for interval in self.intervals)


@dataclass(frozen=True)
class Branch:
    """Affine branch ``x -> slope * x + intercept`` on ``[lo, hi]``."""

    lo: Scalar
    hi: Scalar
    slope: Scalar
    intercept: Scalar

    def __call__(self, x: Scalar) -> Scalar:
        return self.slope * x + self.intercept

    @property
    def direction(self) -> Direction:
        return Direction.INCREASING if self.slope > 0 else Direction.DECREASING

    @property
    def increasing(self) -> bool:
        return self.direction is Direction.INCREASING

    @property
    def left_value(self) -> Scalar:
        return self(self.lo)

    @property
    def right_value(self) -> Scalar:
        return self(self.hi)

    @property
    def image(self) -> Interval:
        return self.image_of(self.lo, self.hi)

    def image_of(self, lo: Scalar, hi: Scalar) -> Interval:
        a, b = self(lo), self(hi)
        return Interval(a, b) if a <= b else Interval(b, a)

    def inverse(self, y: Scalar) -> Scalar:
        return (as_scalar(y) - self.intercept) / self.slope

    def preimage_of(self, interval: Interval) -> Interval | None:
        """Nondegenerate part of the domain mapped into ``interval``."""
        meet = self.image.intersection(interval)
        if meet is None:
            return None
        a, b = self.inverse(meet.lo), self.inverse(meet.hi)
        return Interval(a, b) if a <= b else Interval(b, a)

    def to_literal(self) -> dict:
        return {
            "slope": self.slope.to_literal(),
            "intercept": self.intercept.to_literal(),
            "direction": self.direction.value,
        }


@dataclass(frozen=True)
class PLMap:
    """Piecewise-linear map of ``[0, 1]`` with breakpoints ``0 = a0 < ... < an = 1``."""

    breakpoints: tuple[Scalar, ...]
    branches: tuple[Branch, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        points = tuple(as_scalar(a) for a in self.breakpoints)
        object.__setattr__(self, "breakpoints", points)
        if len(self.branches) < 1 or len(points) != len(self.branches) + 1:
            raise MapSpecError(
                f"Need n+1 breakpoints for n branches, got {len(points)} and {len(self.branches)}",
                "breakpoints",
            )
        try:
            common_context(list(points) + [v for b in self.branches for v in (b.slope, b.intercept)])
        except ContextMismatchError as e:
            raise MapSpecError(f"Map mixes unrelated irrational numbers: {e}", "breakpoints") from e
        if points[0] != 0 or points[-1] != 1:
            raise MapSpecError(f"Breakpoints must run from 0 to 1, got {points[0]} .. {points[-1]}", "breakpoints")
        for i in range(len(points) - 1):
            if not points[i] < points[i + 1]:
                raise MapSpecError(f"Breakpoints not strictly ascending at index {i + 1}", f"breakpoints[{i + 1}]")
        for i, branch in enumerate(self.branches):
            where = f"branches[{i}]"
            if branch.lo != points[i] or branch.hi != points[i + 1]:
                raise MapSpecError("Branch domain does not match the breakpoints", where)
            if not branch.slope:
                raise MapSpecError("Branch slope must be nonzero", f"{where}.slope")
            image = branch.image
            if image.lo < 0 or image.hi > 1:
                raise MapSpecError(f"Branch image {image.describe()} escapes [0, 1]", where)
        for i in range(len(self.branches) - 1):
            left, right = self.branches[i], self.branches[i + 1]
            if left.slope == right.slope and left.right_value == right.left_value:
                raise MapSpecError(
                    f"Branches {i} and {i + 1} continue each other; merge them into one branch",
                    f"branches[{i + 1}]",
                )

    # ---------- structure ----------
    @property
    def n(self) -> int:
        return len(self.branches)

    @property
    def interior_breakpoints(self) -> tuple[Scalar, ...]:
        return self.breakpoints[1:-1]

    @property
    def context(self):
        return common_context(list(self.breakpoints) + [b.slope for b in self.branches])

    @property
    def directions(self) -> tuple[Direction, ...]:
        return tuple(b.direction for b in self.branches)

    def uniform_slope(self) -> Scalar | None:
        """The common ``|slope|`` when the map is uniformly piecewise linear."""
        s = abs(self.branches[0].slope)
        if all(abs(b.slope) == s for b in self.branches):
            return s
        return None

    def breakpoint_index(self, x: Scalar) -> int | None:
        for i, a in enumerate(self.breakpoints):
            if a == x:
                return i
        return None

    def branch_index(self, x: Scalar) -> int:
        """Branch used by the single-valued map: right-continuous inside, left limit at 1."""
        x = as_scalar(x)
        if x < 0 or x > 1:
            raise ValueError(f"Point outside [0, 1]: {x}")
        if x == 1:
            return self.n - 1
        for i in range(self.n - 1, -1, -1):
            if self.breakpoints[i] <= x:
                return i
        return 0

    def value(self, x: Scalar) -> Scalar:
        """Single-valued orbit convention used for critical orbits."""
        return self.branches[self.branch_index(x)](x)

    def to_literal(self) -> dict:
        return {
            "type": "explicit",
            "breakpoints": [a.to_literal() for a in self.breakpoints],
            "branches": [
                {"slope": b.slope.to_literal(), "intercept": b.intercept.to_literal()} for b in self.branches
            ],
        }


@dataclass(frozen=True)
class MapClassification:
    continuous: bool
    surjective_hat: bool
    essentially_injective: bool

    def to_dict(self) -> dict:
        return {
            "continuous": self.continuous,
            "surjective_hat": self.surjective_hat,
            "essentially_injective": self.essentially_injective,
        }


# ---------- builders ----------
def _branches_from_lines(breakpoints: Sequence[Scalar], lines: Sequence[tuple[Scalar, Scalar]]) -> tuple[Branch, ...]:
    return tuple(
        Branch(breakpoints[i], breakpoints[i + 1], as_scalar(slope), as_scalar(intercept))
        for i, (slope, intercept) in enumerate(lines)
    )


def tent_map(s: Any) -> PLMap:
    """Restricted tent map: peak 1 at ``c = 1 - 1/s``, ``T(1) = 0``, slopes ``+s`` then ``-s``."""
    s = as_scalar(s)
    if not (1 < s <= 2):
        raise MapSpecError(f"Tent parameter must satisfy 1 < s <= 2, got {s.describe()}", "s")
    c = ONE - ONE / s
    points = (ZERO, c, ONE)
    return PLMap(points, _branches_from_lines(points, [(s, 2 - s), (-s, s)]), name=f"tent({s.describe()})")


def beta_map(beta: Any) -> PLMap:
    """``x -> beta * x mod 1`` with the left limit taken at 1."""
    beta = as_scalar(beta)
    if not beta > 1:
        raise MapSpecError(f"Beta must exceed 1, got {beta.describe()}", "beta")
    full = beta.floor()
    if beta == full:
        full -= 1
    points = [ZERO] + [Scalar(k) / beta for k in range(1, full + 1)] + [ONE]
    lines = [(beta, Scalar(-k)) for k in range(full + 1)]
    return PLMap(tuple(points), _branches_from_lines(points, lines), name=f"beta({beta.describe()})")


def uniform_pl_map(s: Any, breakpoints: Sequence[Any], directions: Sequence[Any], anchor: dict) -> PLMap:
    """Continuous map with slopes ``+-s``, fixed by one anchor point on one branch."""
    s = as_scalar(s)
    if not s > 0:
        raise MapSpecError(f"Slope factor must be positive, got {s.describe()}", "s")
    points = tuple(as_scalar(a) for a in breakpoints)
    if len(directions) != len(points) - 1:
        raise MapSpecError(
            f"Need one direction per branch: {len(directions)} directions for {len(points) - 1} branches",
            "directions",
        )
    slopes = [
        s if Direction.parse(d, f"directions[{i}]") is Direction.INCREASING else -s
        for i, d in enumerate(directions)
    ]
    try:
        k = int(anchor["branch"])
        ax, ay = as_scalar(anchor["x"]), as_scalar(anchor["y"])
    except (KeyError, TypeError) as e:
        raise MapSpecError(f"Anchor needs x, y and branch: {e}", "anchor") from e
    if not 0 <= k < len(slopes):
        raise MapSpecError(f"Anchor branch {k} out of range", "anchor.branch")
    intercepts: list[Scalar | None] = [None] * len(slopes)
    intercepts[k] = ay - slopes[k] * ax
    for i in range(k + 1, len(slopes)):
        joint = points[i]
        intercepts[i] = slopes[i - 1] * joint + intercepts[i - 1] - slopes[i] * joint
    for i in range(k - 1, -1, -1):
        joint = points[i + 1]
        intercepts[i] = slopes[i + 1] * joint + intercepts[i + 1] - slopes[i] * joint
    return PLMap(points, _branches_from_lines(points, list(zip(slopes, intercepts))), name="uniform_pl")


def explicit_map(breakpoints: Sequence[Any], branches: Sequence[dict]) -> PLMap:
    points = tuple(as_scalar(a) for a in breakpoints)
    lines = []
    for i, spec in enumerate(branches):
        try:
            lines.append((as_scalar(spec["slope"]), as_scalar(spec["intercept"])))
        except KeyError as e:
            raise MapSpecError(f"Branch is missing {e}", f"branches[{i}]") from e
        if "direction" in spec:
            expected = Direction.parse(spec["direction"], f"branches[{i}].direction")
            actual = Direction.INCREASING if lines[-1][0] > 0 else Direction.DECREASING
            if expected is not actual:
                raise MapSpecError("Direction does not match the slope sign", f"branches[{i}].direction")
    if len(points) != len(lines) + 1:
        raise MapSpecError(
            f"Need n+1 breakpoints for n branches, got {len(points)} and {len(lines)}", "breakpoints"
        )
    return PLMap(points, _branches_from_lines(points, lines), name="explicit")


def _parse_numbers(values: Any, field_name: str) -> list[Scalar]:
    if not isinstance(values, (list, tuple)):
        raise MapSpecError("Expected a list of numbers", field_name)
    return [Scalar.from_literal(v, f"{field_name}[{i}]") for i, v in enumerate(values)]


def build_map(spec: dict) -> PLMap:
    """Validate a MapSpec document and build the map.

    Parameters
    ----------
    spec: dict
        One of ``{"type": "tent", "s": ...}``, ``{"type": "beta", "beta": ...}``,
        ``{"type": "uniform_pl", "s", "breakpoints", "directions", "anchor"}`` or
        ``{"type": "explicit", "breakpoints", "branches"}``.

    Returns
    -------
    PLMap
    """
    if not isinstance(spec, dict):
        raise MapSpecError("Map specification must be a JSON object", "")
    kind = spec.get("type")
    if kind not in MAP_TYPES:
        raise MapSpecError(f"Unknown map type {kind!r}; expected one of {', '.join(MAP_TYPES)}", "type")
    try:
        if kind == "tent":
            return tent_map(Scalar.from_literal(spec.get("s"), "s"))
        if kind == "beta":
            return beta_map(Scalar.from_literal(spec.get("beta"), "beta"))
        if kind == "uniform_pl":
            anchor = spec.get("anchor")
            if not isinstance(anchor, dict):
                raise MapSpecError("Anchor must be an object with x, y, branch", "anchor")
            anchor = {
                "x": Scalar.from_literal(anchor.get("x"), "anchor.x"),
                "y": Scalar.from_literal(anchor.get("y"), "anchor.y"),
                "branch": anchor.get("branch", 0),
            }
            return uniform_pl_map(
                Scalar.from_literal(spec.get("s"), "s"),
                _parse_numbers(spec.get("breakpoints"), "breakpoints"),
                spec.get("directions") or [],
                anchor,
            )
        branches = spec.get("branches")
        if not isinstance(branches, list):
            raise MapSpecError("Expected a list of branches", "branches")
        parsed = [
            {
                **b,
                "slope": Scalar.from_literal(b.get("slope"), f"branches[{i}].slope"),
                "intercept": Scalar.from_literal(b.get("intercept"), f"branches[{i}].intercept"),
            }
            for i, b in enumerate(branches)
        ]
        return explicit_map(_parse_numbers(spec.get("breakpoints"), "breakpoints"), parsed)
    except ContextMismatchError as e:
        raise MapSpecError(f"Map mixes unrelated irrational numbers: {e}", "type") from e


def flip_conjugate(tau: PLMap) -> PLMap:
    """Conjugate by the decreasing homeomorphism ``x -> 1 - x``."""
    points = tuple(ONE - a for a in reversed(tau.breakpoints))
    lines = [(b.slope, ONE - b.slope - b.intercept) for b in reversed(tau.branches)]
    return PLMap(points, _branches_from_lines(points, lines), name=f"flip({tau.name})")


# ---------- multivalued extension ----------
def hat_image_point(tau: PLMap, x: Any) -> tuple[Scalar, ...]:
    """Left and right limits of the map at ``x`` (one value off the interior breakpoints)."""
    x = as_scalar(x)
    if x < 0 or x > 1:
        raise ValueError(f"Point outside [0, 1]: {x.describe()}")
    i = tau.breakpoint_index(x)
    if i is None or i == 0 or i == tau.n:
        return (tau.value(x),)
    left, right = tau.branches[i - 1](x), tau.branches[i](x)
    if left == right:
        return (left,)
    return tuple(sorted((left, right)))


def hat_image_set(tau: PLMap, S: IntervalSet) -> IntervalSet:
    pieces = []
    for interval in S:
        for branch in tau.branches:
            lo = max(interval.lo, branch.lo)
            hi = min(interval.hi, branch.hi)
            if lo < hi:
                pieces.append(branch.image_of(lo, hi))
    return IntervalSet.of(pieces)


def hat_preimage_set(tau: PLMap, S: IntervalSet) -> IntervalSet:
    pieces = []
    for interval in S:
        for branch in tau.branches:
            pulled = branch.preimage_of(interval)
            if pulled is not None:
                pieces.append(pulled)
    return IntervalSet.of(pieces)


def classify(tau: PLMap) -> MapClassification:
    continuous = all(
        tau.branches[i].right_value == tau.branches[i + 1].left_value for i in range(tau.n - 1)
    )
    images = [b.image for b in tau.branches]
    surjective = IntervalSet.of(images).is_full
    overlapping = any(
        images[i].intersection(images[j]) is not None
        for i in range(len(images))
        for j in range(i + 1, len(images))
    )
    return MapClassification(continuous, surjective, not overlapping)
