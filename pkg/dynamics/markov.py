"""Critical orbits, Markov partitions, Perron data, scaling measures, uniformization and entropy."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Sequence

import networkx as nx
import numpy as np
from mpmath import ceil, floor, log, mpf, workdps
from sympy import Matrix, Poly, factor_list, integer_nthroot

from .defaults import CYLINDER_DEPTH, MAXITER, ORBIT_BOUND, TOLERANCE
from .exceptions import CertificateError, NotTransitiveError, UnsupportedMapError
from .maps import Branch, Interval, IntervalSet, PLMap, classify, hat_image_point, hat_image_set
from .scalars import (
    ONE,
    T,
    ZERO,
    AlgebraicContext,
    Scalar,
    as_scalar,
    format_poly,
    nullspace,
    poly_coeffs,
    to_fraction,
)
from .transfer import TransferContext, transfer_apply
from .xspace import MeasureWeights, StepFunction

logger = logging.getLogger(__name__)


# ---------- critical orbits ----------
@dataclass(frozen=True)
class OrbitRecord:
    """Forward orbit of one seed; ``preperiod`` is the index where the first repeat re-enters."""

    seed: str
    iterates: tuple[Scalar, ...]
    preperiod: int | None = None

    @property
    def closed(self) -> bool:
        return self.preperiod is not None

    @property
    def period(self) -> int | None:
        if self.preperiod is None:
            return None
        return len(self.iterates) - self.preperiod

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "iterates": [x.to_literal() for x in self.iterates],
            "closed": self.closed,
            "preperiod": self.preperiod,
            "period": self.period,
        }


@dataclass(frozen=True)
class OrbitTable:
    records: tuple[OrbitRecord, ...]
    bound: int

    @property
    def closed(self) -> bool:
        return all(r.closed for r in self.records)

    def points(self) -> list[Scalar]:
        return sorted({x for r in self.records for x in r.iterates})

    def open_seeds(self) -> list[str]:
        return [r.seed for r in self.records if not r.closed]

    def record(self, seed: str) -> OrbitRecord:
        for r in self.records:
            if r.seed == seed:
                return r
        raise KeyError(seed)

    def to_dict(self) -> dict:
        return {"bound": self.bound, "closed": self.closed, "orbits": [r.to_dict() for r in self.records]}


def orbit(tau: PLMap, x: Any, bound: int, seed: str = "") -> OrbitRecord:
    """Iterate the single-valued map from ``x`` until a value repeats or ``bound`` steps pass."""
    x = as_scalar(x)
    seen: dict[Scalar, int] = {}
    iterates: list[Scalar] = []
    for _ in range(bound + 1):
        if x in seen:
            return OrbitRecord(seed, tuple(iterates), seen[x])
        seen[x] = len(iterates)
        iterates.append(x)
        x = tau.value(x)
    return OrbitRecord(seed, tuple(iterates), None)


def critical_orbits(tau: PLMap, bound: int = ORBIT_BOUND) -> OrbitTable:
    """Orbits of every breakpoint and of both one-sided branch values at each breakpoint."""
    if bound < 1:
        raise ValueError(f"Orbit bound must be positive: {bound}")
    seeds: list[tuple[str, Scalar]] = []
    for i, a in enumerate(tau.breakpoints):
        seeds.append((f"a{i}", a))
        values = hat_image_point(tau, a)
        if len(values) == 1:
            seeds.append((f"tau(a{i})", values[0]))
        else:
            left = tau.branches[i - 1](a)
            right = tau.branches[i](a)
            seeds.append((f"tau(a{i}-)", left))
            seeds.append((f"tau(a{i}+)", right))
    records = tuple(orbit(tau, x, bound, label) for label, x in seeds)
    for r in records:
        if not r.closed:
            logger.debug("Orbit of %s still open after %d steps", r.seed, bound)
    return OrbitTable(records, bound)


def eventual_image(tau: PLMap, bound: int = ORBIT_BOUND) -> tuple[IntervalSet, int]:
    """Iterate ``tau^(n)([0, 1])`` until it stops shrinking."""
    current = IntervalSet.full()
    for step in range(1, bound + 1):
        image = hat_image_set(tau, current)
        if image == current:
            return current, step - 1
        current = image
    return current, bound


# ---------- Markov data ----------
@dataclass(frozen=True)
class NotMarkovWithinBound:
    bound: int
    open_seeds: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"markov": False, "status": "not_markov_within_bound", "bound": self.bound,
                "open_seeds": list(self.open_seeds)}


@dataclass(frozen=True)
class MarkovData:
    """Markov partition ``B`` with cells ``E_i`` and the incidence matrix of the map."""

    points: tuple[Scalar, ...]
    incidence: tuple[tuple[int, ...], ...]
    irreducible: bool
    primitive: bool
    period: int | None
    orbits: OrbitTable | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return len(self.points) - 1

    @property
    def cells(self) -> list[Interval]:
        return [Interval(self.points[i], self.points[i + 1]) for i in range(self.size)]

    def matrix(self) -> np.ndarray:
        return np.array(self.incidence, dtype=object)

    def cell_index(self, lo: Scalar, hi: Scalar) -> list[int]:
        return [i for i, cell in enumerate(self.cells) if lo <= cell.lo and cell.hi <= hi]

    def vector_of(self, f: StepFunction) -> list[Scalar] | None:
        """Coordinates of ``f`` in the basis of cell indicators, or None when ``f`` cuts a cell."""
        inner = set(self.points[1:-1])
        if not set(f.cuts) <= inner:
            return None
        vector = []
        j = 0
        for cell in self.cells:
            while j < len(f.cuts) and f.cuts[j] <= cell.lo:
                j += 1
            vector.append(f.values[j])
        return vector

    def function_of(self, vector: Sequence[Any]) -> StepFunction:
        """``psi(v) = sum of v_i chi_{E_i}``."""
        return StepFunction.from_pieces(
            (cell.lo, cell.hi, as_scalar(v)) for cell, v in zip(self.cells, vector)
        )

    def to_dict(self) -> dict:
        return {
            "markov": True,
            "partition": [p.to_literal() for p in self.points],
            "incidence": [list(row) for row in self.incidence],
            "irreducible": self.irreducible,
            "primitive": self.primitive,
            "period": self.period,
        }


def primitivity_period(A: Sequence[Sequence[int]]) -> tuple[bool, int]:
    """Primitivity and period of an irreducible 0/1 matrix.

    Raises
    ------
    NotTransitiveError
        When the transition digraph is not strongly connected.
    """
    graph = nx.from_numpy_array(np.array(A, dtype=int), create_using=nx.DiGraph)
    if not nx.is_strongly_connected(graph):
        raise NotTransitiveError("Incidence matrix is reducible; the map is not transitive")
    levels = nx.single_source_shortest_path_length(graph, 0)
    period = 0
    for u, v in graph.edges():
        period = math.gcd(period, levels[u] + 1 - levels[v])
    period = abs(period)
    return period == 1, period


def cyclic_classes(A: Sequence[Sequence[int]], period: int) -> list[list[int]]:
    """Cyclic classes of an irreducible matrix; class 0 contains index 0 and edges go from class k to k+1."""
    graph = nx.from_numpy_array(np.array(A, dtype=int), create_using=nx.DiGraph)
    levels = nx.single_source_shortest_path_length(graph, 0)
    classes: list[list[int]] = [[] for _ in range(period)]
    for node in sorted(levels):
        classes[levels[node] % period].append(node)
    return classes


def detect_markov(tau: PLMap, bound: int = ORBIT_BOUND) -> MarkovData | NotMarkovWithinBound:
    """Markov partition from closed critical orbits, with the incidence matrix verified exactly.

    Raises
    ------
    UnsupportedMapError
        When the map is not eventually surjective.
    """
    image, _ = eventual_image(tau, bound)
    if not image.is_full:
        raise UnsupportedMapError(
            f"Map is not eventually surjective: images shrink to {image.describe()}"
        )
    orbits = critical_orbits(tau, bound)
    if not orbits.closed:
        return NotMarkovWithinBound(bound, tuple(orbits.open_seeds()))
    points = sorted(set(orbits.points()) | set(tau.breakpoints))
    cells = [Interval(points[i], points[i + 1]) for i in range(len(points) - 1)]
    rows = []
    for cell in cells:
        branch = tau.branches[tau.branch_index(cell.lo)]
        covered = branch.image_of(cell.lo, cell.hi)
        if covered.lo not in points or covered.hi not in points:
            raise CertificateError(f"Image {covered.describe()} of cell {cell.describe()} is not a union of cells")
        rows.append(tuple(int(covered.contains_interval(other)) for other in cells))
    try:
        primitive, period = primitivity_period(rows)
        irreducible = True
    except NotTransitiveError:
        primitive, period, irreducible = False, None, False
    logger.debug("Markov partition with %d cells, period %s", len(cells), period)
    return MarkovData(tuple(points), tuple(rows), irreducible, primitive, period, orbits)


# ---------- Perron data ----------
@dataclass(frozen=True)
class PerronData:
    charpoly: tuple[int, ...]
    s: Scalar
    right: tuple[Scalar, ...]
    left: tuple[Scalar, ...]

    def to_dict(self) -> dict:
        return {
            "charpoly": list(self.charpoly),
            "charpoly_text": format_poly(self.charpoly),
            "s": self.s.to_literal(),
            "s_approx": self.s.describe(),
            "right_eigenvector": [m.to_literal() for m in self.right],
            "left_eigenvector": [m.to_literal() for m in self.left],
        }


def characteristic_polynomial(A: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Little-endian integer characteristic polynomial ``det(tI - A)``."""
    poly = Matrix(A).charpoly(T)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _top_root(factor: Poly) -> Scalar | None:
    """Largest real root of an irreducible integer polynomial."""
    coeffs = poly_coeffs(factor)
    if len(coeffs) == 2:
        return Scalar(Fraction(-coeffs[0], coeffs[1]))
    intervals = factor.intervals()
    if not intervals:
        return None
    (lo, hi), _ = intervals[-1]
    return Scalar.generator(AlgebraicContext(coeffs, (to_fraction(lo), to_fraction(hi))))


def _larger(a: Scalar, b: Scalar) -> Scalar:
    if a.context == b.context or a.context is None and b.context is None:
        return a if a >= b else b
    width = Fraction(1, 2**16)
    while True:
        a_lo, a_hi = a.refine(width)
        b_lo, b_hi = b.refine(width)
        if a_lo > b_hi:
            return a
        if b_lo > a_hi:
            return b
        width /= 2**16


def perron_root(charpoly: Sequence[int]) -> Scalar:
    """Largest real root, as a rational or the generator of a new number field."""
    _, factors = factor_list(Poly(list(reversed(charpoly)), T).as_expr(), T)
    best = None
    for factor, _ in factors:
        poly = Poly(factor, T)
        if poly.degree() < 1:
            continue
        root = _top_root(poly)
        if root is not None:
            best = root if best is None else _larger(best, root)
    if best is None:
        raise ValueError(f"{format_poly(charpoly)} has no real roots")
    return best


def perron_data(A: Sequence[Sequence[int]]) -> PerronData:
    """Exact Perron root and eigenvectors of an irreducible nonnegative matrix.

    The right eigenvector is normalized to total 1 and the left one to ``left . right = 1``.
    """
    charpoly = characteristic_polynomial(A)
    s = perron_root(charpoly)
    q = len(A)

    def shifted(rows):
        return [[as_scalar(rows[i][j]) - (s if i == j else ZERO) for j in range(q)] for i in range(q)]

    right_basis = nullspace(shifted(A))
    left_basis = nullspace(shifted([[A[j][i] for j in range(q)] for i in range(q)]))
    if len(right_basis) != 1 or len(left_basis) != 1:
        raise ValueError(f"Perron root {s.describe()} is not simple; is the matrix irreducible?")
    right = right_basis[0]
    total = sum(right, ZERO)
    right = [v / total for v in right]
    left = left_basis[0]
    pairing = sum((l * r for l, r in zip(left, right)), ZERO)
    left = [v / pairing for v in left]
    for i in range(q):
        row = sum((as_scalar(A[i][j]) * right[j] for j in range(q)), ZERO)
        if row != s * right[i]:
            raise CertificateError("Right Perron eigenvector failed verification")
    return PerronData(charpoly, s, tuple(right), tuple(left))


# ---------- scaling measures ----------
@dataclass(frozen=True)
class ScalingMeasure:
    weights: MeasureWeights
    s: Scalar
    route: str
    markov: MarkovData | None = field(default=None, compare=False)
    perron: PerronData | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {"route": self.route, "s": self.s.to_literal(), "s_approx": self.s.describe(),
                "measure": self.weights.to_literal()}


def scaling_measure(tau: PLMap, bound: int = ORBIT_BOUND, markov: MarkovData | None = None) -> ScalingMeasure:
    """The unique scaling measure of a transitive map and its factor s.

    Raises
    ------
    NotTransitiveError
        When the map is certified not transitive.
    UnsupportedMapError
        For essentially injective maps and for non-Markov maps that are not uniformly piecewise linear.
    """
    if classify(tau).essentially_injective:
        raise UnsupportedMapError("Essentially injective map: scaling measures are invariant measures and need not be unique")
    s = tau.uniform_slope()
    if s is not None:
        from .decomposition import transitivity_check

        verdict = transitivity_check(tau)
        if verdict.status == "not_transitive":
            raise NotTransitiveError(f"Map is not transitive: invariant set {verdict.witness.describe()}")
        return ScalingMeasure(MeasureWeights.lebesgue(), s, "uniform")
    if markov is None:
        markov = detect_markov(tau, bound)
    if isinstance(markov, NotMarkovWithinBound):
        raise UnsupportedMapError(
            "Map is neither uniformly piecewise linear nor Markov within the bound; supply its uniform model"
        )
    if not markov.irreducible:
        raise NotTransitiveError("Incidence matrix is reducible; the map is not transitive")
    perron = perron_data(markov.incidence)
    weights = MeasureWeights.scaling(markov.points, perron.right, tau, perron.s, bound)
    return ScalingMeasure(weights, perron.s, "markov", markov, perron)


def markov_pullback_measure(tau: PLMap, measure: ScalingMeasure, lo: Any, hi: Any, depth: int = 64) -> Scalar:
    """Scaling measure of ``[lo, hi]`` computed by pushing forward until the endpoints land in the partition."""
    lo, hi = as_scalar(lo), as_scalar(hi)
    points = set(measure.weights.cuts)
    if lo in points and hi in points or measure.weights.is_lebesgue:
        return measure.weights.measure(lo, hi)
    if depth == 0:
        raise ValueError(f"Endpoints of [{lo.describe()}, {hi.describe()}] do not reach the partition")
    total = ZERO
    for branch in tau.branches:
        a, b = max(lo, branch.lo), min(hi, branch.hi)
        if a < b:
            image = branch.image_of(a, b)
            total = total + markov_pullback_measure(tau, measure, image.lo, image.hi, depth - 1) / measure.s
    return total


def uniformize(tau: PLMap, weights: MeasureWeights, s: Any) -> PLMap:
    """Conjugate by ``h(x) = mu([0, x])`` to the map with slopes ``+-s``."""
    s = as_scalar(s)
    if not weights.full_support:
        raise ValueError("Measure has a zero-mass interval; it has no full support")
    h = weights.cdf
    points = tuple(h(a) for a in tau.breakpoints)
    lines = []
    for i, branch in enumerate(tau.branches):
        slope = (h(branch.right_value) - h(branch.left_value)) / (points[i + 1] - points[i])
        if abs(slope) != s:
            raise CertificateError(f"Uniformized branch {i} has slope {slope.describe()}, expected +-{s.describe()}")
        lines.append((slope, h(branch.left_value) - slope * points[i]))
    branches = tuple(
        Branch(points[i], points[i + 1], slope, intercept) for i, (slope, intercept) in enumerate(lines)
    )
    return PLMap(points, branches, name=f"uniform({tau.name})")


# ---------- entropy ----------
def _decimal(scaled: int, digits: int) -> str:
    return str(Decimal(scaled).scaleb(-digits))


def log_bracket(lo: Fraction, hi: Fraction, digits: int = 15) -> tuple[str, str]:
    """Decimal strings ``a <= ln(lo)`` and ``b >= ln(hi)`` with ``digits`` places."""
    with workdps(digits + 20):
        scale = mpf(10) ** digits
        low = floor(log(mpf(lo.numerator) / lo.denominator) * scale)
        high = ceil(log(mpf(hi.numerator) / hi.denominator) * scale)
    return _decimal(int(low), digits), _decimal(int(high), digits)


@dataclass(frozen=True)
class EntropyResult:
    """Entropy ``h = ln s`` and a rational bracket ``[lower, upper]`` of the growth rate s."""

    method: str
    lower: Fraction
    upper: Fraction
    certified: bool
    s: Scalar | None = None
    iterations: int | None = None
    exhausted: bool = False
    counts: tuple[int, ...] = ()

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, value: Any) -> bool:
        lo, hi = as_scalar(value).refine(Fraction(1, 10**30))
        return self.lower <= lo and hi <= self.upper

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "growth": {"lower": str(self.lower), "upper": str(self.upper), "width": str(self.width)},
            "certified": self.certified,
        }
        if self.lower > 0:
            h_lower, h_upper = log_bracket(self.lower, self.upper)
            out["entropy"] = {"lower": h_lower, "upper": h_upper}
        if self.s is not None:
            out["s"] = self.s.to_literal()
            out["entropy_exact"] = f"ln({self.s.describe()})"
        if self.iterations is not None:
            out["iterations"] = self.iterations
            out["exhausted"] = self.exhausted
        if self.counts:
            out["cylinder_counts"] = list(self.counts)
        return out


def entropy_markov_exact(tau: PLMap, bound: int = ORBIT_BOUND, tol: Any = TOLERANCE) -> EntropyResult:
    markov = detect_markov(tau, bound)
    if isinstance(markov, NotMarkovWithinBound):
        raise UnsupportedMapError(f"Map is not Markov within {bound} steps")
    if not markov.irreducible:
        raise NotTransitiveError("Incidence matrix is reducible; the map is not transitive")
    s = perron_data(markov.incidence).s
    lo, hi = s.refine(to_fraction(tol))
    return EntropyResult("markov_exact", lo, hi, True, s=s)


def entropy_power_iteration(tau: PLMap, tol: Any = TOLERANCE, maxiter: int = MAXITER) -> EntropyResult:
    """Bracket the growth of ``L^n 1`` between the pointwise extremes of ``L^{n+1}1 / L^n 1``.

    The bracket holds for the spectral radius whenever ``L^n 1`` stays positive,
    which the surjectivity of the multivalued map guarantees.
    """
    tol = to_fraction(tol)
    ctx = TransferContext.of(tau)
    current = StepFunction.constant(1)
    best_lo, best_hi = None, None
    certified = classify(tau).surjective_hat
    for n in range(1, maxiter + 1):
        following = transfer_apply(ctx, current)
        if any(v <= 0 for v in current.values):
            certified = False
        ratio = following.combine(current, lambda b, a: b / a if a else ZERO)
        values = [v.as_fraction() for v in ratio.values]
        lo, hi = min(values), max(values)
        best_lo = lo if best_lo is None else max(best_lo, lo)
        best_hi = hi if best_hi is None else min(best_hi, hi)
        current = following
        if best_hi - best_lo <= tol:
            logger.debug("Power iteration converged after %d steps", n)
            return EntropyResult("power_iteration", best_lo, best_hi, certified, iterations=n)
    logger.warning("Power iteration exhausted %d iterations with bracket width %s", maxiter, best_hi - best_lo)
    return EntropyResult("power_iteration", best_lo, best_hi, certified, iterations=maxiter, exhausted=True)


def monotone_laps(tau: PLMap, n: int) -> list[Interval]:
    """Nonempty cylinders of length ``n``: maximal intervals following one itinerary of branches."""
    laps = [(Interval(b.lo, b.hi), b.slope, b.intercept) for b in tau.branches]
    for _ in range(n - 1):
        refined = []
        for interval, slope, intercept in laps:
            a, b = slope * interval.lo + intercept, slope * interval.hi + intercept
            image = Interval(min(a, b), max(a, b))
            for branch in tau.branches:
                meet = image.intersection(Interval(branch.lo, branch.hi))
                if meet is None:
                    continue
                x, y = (meet.lo - intercept) / slope, (meet.hi - intercept) / slope
                refined.append(
                    (Interval(min(x, y), max(x, y)), branch.slope * slope, branch.slope * intercept + branch.intercept)
                )
        laps = refined
    return sorted((interval for interval, _, _ in laps), key=lambda lap: lap.lo)


def cylinder_counts(tau: PLMap, n: int) -> list[int]:
    """``[c_1, ..., c_n]``."""
    return [len(monotone_laps(tau, k)) for k in range(1, n + 1)]


def _root_upper(c: int, k: int, digits: int = 12) -> Fraction:
    """Smallest multiple of ``10**-digits`` that is at least ``c ** (1/k)``."""
    scale = 10**digits
    root, exact = integer_nthroot(c * scale**k, k)
    return Fraction(root if exact else root + 1, scale)


def entropy_cylinder_count(tau: PLMap, n: int = CYLINDER_DEPTH) -> EntropyResult:
    """Upper bound ``min c_k^(1/k)`` on the growth (certified by submultiplicativity) and the estimate ``c_n / c_{n-1}``."""
    if n < 2:
        raise ValueError(f"Cylinder depth must be at least 2: {n}")
    counts = cylinder_counts(tau, n)
    upper = min(_root_upper(c, k) for k, c in enumerate(counts, start=1))
    lower = min(Fraction(counts[-1], counts[-2]), upper)
    return EntropyResult("cylinder_count", lower, upper, False, counts=tuple(counts))


def entropy(tau: PLMap, method: str = "markov_exact", **options) -> EntropyResult:
    """Dispatch on ``method`` in markov_exact, power_iteration, cylinder_count."""
    if method == "markov_exact":
        return entropy_markov_exact(tau, options.get("bound", ORBIT_BOUND), options.get("tol", TOLERANCE))
    if method == "power_iteration":
        return entropy_power_iteration(tau, options.get("tol", TOLERANCE), options.get("maxiter", MAXITER))
    if method == "cylinder_count":
        return entropy_cylinder_count(tau, options.get("n", CYLINDER_DEPTH))
    raise ValueError(f"Unknown entropy method: {method}")
