"""The disconnected space X: side-tagged points, order intervals and step functions.

Points of X that sit over a breakpoint orbit come in two copies ``x-`` and
``x+``. A ``StepFunction`` is constant on finitely many order intervals
``I(c_{j-1}, c_j) = [c_{j-1}+, c_j-]``, so every interior cut splits its value
into a left and a right copy.
"""
from __future__ import annotations

import logging
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from enum import IntEnum
from functools import total_ordering
from typing import Any, Iterable, Iterator, Sequence

from .defaults import ORBIT_BOUND
from .exceptions import AmbiguousPointError, MapSpecError, UnsupportedMapError
from .maps import Interval, IntervalSet, PLMap
from .scalars import ONE, ZERO, Scalar, as_scalar

logger = logging.getLogger(__name__)


class Side(IntEnum):
    MINUS = -1
    PLAIN = 0
    PLUS = 1

    @property
    def symbol(self) -> str:
        return {Side.MINUS: "-", Side.PLAIN: "", Side.PLUS: "+"}[self]

    @classmethod
    def parse(cls, symbol: str) -> "Side":
        table = {"-": cls.MINUS, "": cls.PLAIN, "+": cls.PLUS}
        if symbol not in table:
            raise ValueError(f"Unknown side tag: {symbol!r}")
        return table[symbol]

    def flipped(self) -> "Side":
        return Side(-self.value)


@total_ordering
@dataclass(frozen=True, eq=True)
class XPoint:
    """A point of X: a value in [0, 1] with a side tag.

    0 has no minus copy and 1 no plus copy; both endpoints are stored plain.
    """

    value: Scalar
    side: Side = Side.PLAIN

    def __post_init__(self):
        value = as_scalar(self.value)
        if value < 0 or value > 1:
            raise ValueError(f"Point outside [0, 1]: {value.describe()}")
        object.__setattr__(self, "value", value)
        side = Side(self.side)
        if value == 0 or value == 1:
            side = Side.PLAIN
        object.__setattr__(self, "side", side)

    @classmethod
    def minus(cls, value: Any) -> "XPoint":
        return cls(as_scalar(value), Side.MINUS)

    @classmethod
    def plus(cls, value: Any) -> "XPoint":
        return cls(as_scalar(value), Side.PLUS)

    def __lt__(self, other: "XPoint"):
        if not isinstance(other, XPoint):
            return NotImplemented
        if self.value == other.value:
            return self.side < other.side
        return self.value < other.value

    def to_literal(self) -> dict:
        return {"value": self.value.to_literal(), "side": self.side.symbol}

    def __str__(self):
        return f"{self.value.describe()}{self.side.symbol}"


@dataclass(frozen=True)
class OrderInterval:
    """Order interval ``[left, right]`` of X."""

    left: XPoint
    right: XPoint

    @classmethod
    def between(cls, b1: Any, b2: Any) -> "OrderInterval":
        """The clopen interval ``I(b1, b2) = [b1+, b2-]``."""
        return cls(XPoint.plus(b1), XPoint.minus(b2))

    @property
    def is_empty(self) -> bool:
        return self.right < self.left or self.left.value == self.right.value

    def contains(self, x: XPoint) -> bool:
        return self.left <= x <= self.right

    def projection(self) -> Interval | None:
        if self.is_empty:
            return None
        return Interval(self.left.value, self.right.value)


@dataclass(frozen=True)
class MeasureWeights:
    """Non-atomic probability measure given by masses on a finite partition of [0, 1].

    Without a map the cumulative distribution is linear inside each cell. With
    ``tau`` and ``s`` the cuts form a Markov partition of ``tau`` and the mass of
    ``[c_k, x]`` inside a cell is ``mu(tau [c_k, x]) / s``: the orbit of ``x`` is
    followed until it reaches a cut, or closes up and the resulting affine
    relation is solved.
    """

    cuts: tuple[Scalar, ...]
    masses: tuple[Scalar, ...]
    tau: PLMap | None = field(default=None, compare=False, repr=False)
    s: Scalar | None = field(default=None, compare=False)
    bound: int = field(default=ORBIT_BOUND, compare=False)

    def __post_init__(self):
        cuts = tuple(as_scalar(c) for c in self.cuts)
        masses = tuple(as_scalar(m) for m in self.masses)
        object.__setattr__(self, "cuts", cuts)
        object.__setattr__(self, "masses", masses)
        if len(cuts) != len(masses) + 1 or cuts[0] != 0 or cuts[-1] != 1:
            raise ValueError("Measure cuts must run from 0 to 1 with one mass per cell")
        if any(m < 0 for m in masses):
            raise ValueError(f"Negative mass in measure: {[m.describe() for m in masses]}")
        total = ZERO
        prefix = {ZERO: ZERO}
        for c, m in zip(cuts[1:], masses):
            total = total + m
            prefix[c] = total
        if total != 1:
            raise ValueError(f"Measure masses sum to {total.describe()}, not 1")
        if self.tau is not None:
            if self.s is None:
                raise ValueError("A measure pulled back through a map needs its scaling factor")
            object.__setattr__(self, "s", as_scalar(self.s))
        object.__setattr__(self, "_prefix", prefix)
        object.__setattr__(self, "_pulled", {})

    @classmethod
    def lebesgue(cls) -> "MeasureWeights":
        return cls((ZERO, ONE), (ONE,))

    @classmethod
    def scaling(cls, cuts: Sequence[Any], masses: Sequence[Any], tau: PLMap, s: Any,
                bound: int = ORBIT_BOUND) -> "MeasureWeights":
        """Cell masses on a Markov partition of ``tau``, refined by ``mu(tau J) = s mu(J)``."""
        return cls(tuple(cuts), tuple(masses), tau, as_scalar(s), bound)

    @property
    def is_lebesgue(self) -> bool:
        if self.tau is not None:
            return False
        return all(m == (self.cuts[k + 1] - self.cuts[k]) for k, m in enumerate(self.masses))

    @property
    def full_support(self) -> bool:
        return all(m > 0 for m in self.masses)

    def cdf(self, x: Any) -> Scalar:
        """``mu([0, x])``."""
        x = as_scalar(x)
        if x in self._prefix:
            return self._prefix[x]
        if self.tau is not None:
            return self._pulled_cdf(x)
        k = bisect_right(self.cuts, x) - 1
        lo, hi = self.cuts[k], self.cuts[k + 1]
        return self._prefix[lo] + self.masses[k] * (x - lo) / (hi - lo)

    def _known(self, x: Scalar) -> Scalar | None:
        if x in self._prefix:
            return self._prefix[x]
        return self._pulled.get(x)

    def _pulled_cdf(self, x: Scalar) -> Scalar:
        # F(y) = F(c_k) + e (F(tau y) - F(tau c_k)) with e = +-1/s on the cell [c_k, c_k+1] of y
        chain: list[tuple[Scalar, Scalar, Scalar]] = []
        seen: dict[Scalar, int] = {}
        y = x
        while True:
            tail = self._known(y)
            if tail is not None:
                break
            if y in seen:
                A, E = ZERO, ONE
                for _, a, e in reversed(chain[seen[y]:]):
                    A, E = a + e * A, e * E
                tail = A / (ONE - E)
                break
            if len(chain) >= self.bound:
                raise UnsupportedMapError(
                    f"Orbit of {x.describe()} neither reaches the partition nor closes within {self.bound} steps"
                )
            seen[y] = len(chain)
            k = bisect_right(self.cuts, y) - 1
            lo = self.cuts[k]
            branch = self.tau.branches[self.tau.branch_index(y)]
            start = self._prefix.get(branch(lo))
            if start is None:
                raise ValueError(f"Cuts are not a Markov partition: {branch(lo).describe()} is not a cut")
            e = ONE / self.s if branch.increasing else -ONE / self.s
            chain.append((y, self._prefix[lo] - e * start, e))
            y = branch(y)
        value = tail
        for point, a, e in reversed(chain):
            value = a + e * value
            self._pulled[point] = value
        return self._pulled[x]

    def measure(self, lo: Any, hi: Any) -> Scalar:
        return self.cdf(hi) - self.cdf(lo)

    def measure_set(self, S: IntervalSet) -> Scalar:
        total = ZERO
        for interval in S:
            total = total + self.measure(interval.lo, interval.hi)
        return total

    def to_literal(self) -> dict:
        return {
            "cuts": [c.to_literal() for c in self.cuts],
            "masses": [m.to_literal() for m in self.masses],
        }


@dataclass(frozen=True)
class StepFunction:
    """Function on X constant on the order intervals between consecutive cuts.

    Parameters
    ----------
    cuts: tuple of Scalar
        Interior cut values ``0 < c_1 < ... < c_k < 1``.
    values: tuple of Scalar
        ``k + 1`` values on ``I(0, c_1), I(c_1, c_2), ..., I(c_k, 1)``.
    """

    cuts: tuple[Scalar, ...]
    values: tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.values) != len(self.cuts) + 1:
            raise ValueError(f"Need {len(self.cuts) + 1} values for {len(self.cuts)} cuts, got {len(self.values)}")

    # ---------- construction ----------
    @classmethod
    def build(cls, cuts: Sequence[Any], values: Sequence[Any]) -> "StepFunction":
        """Validated, canonical step function."""
        cuts = [as_scalar(c) for c in cuts]
        values = [as_scalar(v) for v in values]
        if len(values) != len(cuts) + 1:
            raise ValueError(f"Need {len(cuts) + 1} values for {len(cuts)} cuts, got {len(values)}")
        for a, b in zip([ZERO] + cuts, cuts + [ONE]):
            if not a < b:
                raise ValueError(f"Cuts must be strictly ascending inside (0, 1): {a.describe()} !< {b.describe()}")
        return step_normalize(cls(tuple(cuts), tuple(values)))

    @classmethod
    def constant(cls, value: Any) -> "StepFunction":
        return cls((), (as_scalar(value),))

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls.constant(ZERO)

    @classmethod
    def indicator(cls, lo: Any, hi: Any, value: Any = 1) -> "StepFunction":
        """``value * chi_{I(lo, hi)}``."""
        return cls.from_pieces([(as_scalar(lo), as_scalar(hi), as_scalar(value))])

    @classmethod
    def indicator_set(cls, S: IntervalSet, value: Any = 1) -> "StepFunction":
        return cls.from_pieces([(iv.lo, iv.hi, as_scalar(value)) for iv in S])

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple[Scalar, Scalar, Scalar]]) -> "StepFunction":
        """Sum of ``value * chi_{I(lo, hi)}`` over the pieces."""
        deltas: dict[Scalar, Scalar] = defaultdict(lambda: ZERO)
        for lo, hi, value in pieces:
            if lo < hi and value:
                deltas[lo] = deltas[lo] + value
                deltas[hi] = deltas[hi] - value
        points = sorted(set(deltas) | {ZERO, ONE})
        values = []
        running = ZERO
        for p in points[:-1]:
            running = running + deltas.get(p, ZERO)
            values.append(running)
        return step_normalize(cls(tuple(points[1:-1]), tuple(values)))

    # ---------- inspection ----------
    def pieces(self) -> Iterator[tuple[Scalar, Scalar, Scalar]]:
        bounds = (ZERO,) + self.cuts + (ONE,)
        for j, value in enumerate(self.values):
            yield bounds[j], bounds[j + 1], value

    def is_zero(self) -> bool:
        return len(self.values) == 1 and not self.values[0]

    def is_integer_valued(self) -> bool:
        return all(v.is_integer() for v in self.values)

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)

    def support(self) -> IntervalSet:
        """Closure of the projection of the support."""
        return IntervalSet.of(Interval(lo, hi) for lo, hi, v in self.pieces() if v)

    def evaluate(self, x: XPoint) -> Scalar:
        for j, c in enumerate(self.cuts):
            if x.value < c:
                return self.values[j]
            if x.value == c:
                if x.side is Side.MINUS:
                    return self.values[j]
                if x.side is Side.PLUS:
                    return self.values[j + 1]
                raise AmbiguousPointError(f"Plain point {x} lies on the cut {c.describe()}; split it first")
        return self.values[-1]

    def min_on_support(self) -> Scalar | None:
        positive = [v for v in self.values if v]
        return min(positive) if positive else None

    # ---------- arithmetic ----------
    def combine(self, other: "StepFunction", op) -> "StepFunction":
        points = sorted(set(self.cuts) | set(other.cuts))
        bounds = [ZERO] + points + [ONE]
        values = []
        i = j = 0
        for k in range(len(bounds) - 1):
            hi = bounds[k + 1]
            while i < len(self.cuts) and self.cuts[i] < hi:
                i += 1
            while j < len(other.cuts) and other.cuts[j] < hi:
                j += 1
            values.append(op(self.values[i], other.values[j]))
        return step_normalize(StepFunction(tuple(points), tuple(values)))

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return self.combine(other, lambda a, b: a + b)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self.combine(other, lambda a, b: a - b)

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.cuts, tuple(-v for v in self.values))

    def scale(self, factor: Any) -> "StepFunction":
        factor = as_scalar(factor)
        if not factor:
            return StepFunction.zero()
        return StepFunction(self.cuts, tuple(v * factor for v in self.values))

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            return self.combine(other, lambda a, b: a * b)
        return self.scale(other)

    __rmul__ = __mul__

    def restrict(self, S: IntervalSet) -> "StepFunction":
        """``f * chi_S`` for a finite union of intervals with endpoints in I1."""
        pieces = []
        for lo, hi, value in self.pieces():
            for interval in S:
                meet = Interval(lo, hi).intersection(interval)
                if meet is not None:
                    pieces.append((meet.lo, meet.hi, value))
        return StepFunction.from_pieces(pieces)

    # ---------- literals ----------
    def to_literal(self) -> dict:
        cuts = [{"value": lo.to_literal(), "side": "+"} for lo, _, _ in self.pieces()]
        cuts.append({"value": "1", "side": "-"})
        return {"cuts": cuts, "values": [v.to_literal() for v in self.values]}

    @classmethod
    def from_literal(cls, literal: dict, field: str = "function") -> "StepFunction":
        try:
            cuts = literal["cuts"]
            values = literal["values"]
        except (KeyError, TypeError) as e:
            raise MapSpecError(f"Step function needs cuts and values: {e}", field) from e
        if len(cuts) != len(values) + 1:
            raise MapSpecError("Step function needs one more cut than values", f"{field}.cuts")
        points = [Scalar.from_literal(c["value"] if isinstance(c, dict) else c, f"{field}.cuts[{i}]")
                  for i, c in enumerate(cuts)]
        if points[0] != 0 or points[-1] != 1:
            raise MapSpecError("Step function cuts must start at 0 and end at 1", f"{field}.cuts")
        try:
            return cls.build(points[1:-1], [Scalar.from_literal(v, f"{field}.values[{i}]") for i, v in enumerate(values)])
        except ValueError as e:
            raise MapSpecError(str(e), f"{field}.cuts") from e

    def describe(self) -> str:
        return "; ".join(f"I({lo.describe()},{hi.describe()}): {v.describe()}" for lo, hi, v in self.pieces())


def step_normalize(f: StepFunction) -> StepFunction:
    """Merge adjacent order intervals carrying equal values."""
    cuts: list[Scalar] = []
    values: list[Scalar] = [f.values[0]]
    for cut, value in zip(f.cuts, f.values[1:]):
        if value == values[-1]:
            continue
        cuts.append(cut)
        values.append(value)
    if len(cuts) == len(f.cuts):
        return f
    return StepFunction(tuple(cuts), tuple(values))


def step_integrate(f: StepFunction, mu: MeasureWeights) -> Scalar:
    total = ZERO
    for lo, hi, value in f.pieces():
        if value:
            total = total + value * mu.measure(lo, hi)
    return total


def step_l1(f: StepFunction, mu: MeasureWeights) -> Scalar:
    total = ZERO
    for lo, hi, value in f.pieces():
        if value:
            total = total + abs(value) * mu.measure(lo, hi)
    return total


def step_supnorm(f: StepFunction) -> Scalar:
    return max(abs(v) for v in f.values)


def step_var(f: StepFunction) -> Scalar:
    total = ZERO
    for a, b in zip(f.values, f.values[1:]):
        total = total + abs(b - a)
    return total


def sigma_apply(tau: PLMap, x: XPoint) -> XPoint:
    """The lift of the map to X; decreasing branches swap the side tag."""
    i = tau.breakpoint_index(x.value)
    if i is not None and 0 < i < tau.n:
        if x.side is Side.PLAIN:
            raise AmbiguousPointError(f"Plain point {x} sits on the breakpoint {x.value.describe()}")
        branch = tau.branches[i - 1] if x.side is Side.MINUS else tau.branches[i]
    else:
        branch = tau.branches[tau.branch_index(x.value)]
    side = x.side if branch.increasing else x.side.flipped()
    return XPoint(branch(x.value), side)
