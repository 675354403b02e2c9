"""Presentations of the dimension triple (DG, DG+, L_*), its states, order and invariants.

Three presentation shapes are used:

* ``MarkovLimit``: the stationary inductive limit of ``Z^q`` under right
  multiplication by an integer matrix A, with classes ``[v, n]``;
* ``LaurentCyclic``: DG is ``Z[t, 1/t]`` acting on the generator ``[1]``,
  ``t`` acting as L_*;
* ``DirectSum``: finitely many components cycled by L_*.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from sympy import Matrix, factorint
from sympy.matrices.normalforms import hermite_normal_form

from .decomposition import ExactDecomposition, exact_decomposition, transitivity_check
from .defaults import ORBIT_BOUND, POSITIVITY_ITERATIONS
from .exceptions import CertificateError, NotTransitiveError, UnsupportedMapError
from .maps import PLMap, beta_map, classify, flip_conjugate, hat_image_point
from .markov import (
    MarkovData,
    NotMarkovWithinBound,
    characteristic_polynomial,
    cyclic_classes,
    detect_markov,
    orbit,
    perron_data,
    primitivity_period,
    scaling_measure,
    uniformize,
)
from .scalars import (
    ONE,
    ZERO,
    Scalar,
    as_scalar,
    evaluate_laurent,
    format_poly,
    int_poly,
    same_real_number,
    solve_linear,
)
from .transfer import TransferContext, transfer_apply
from .xspace import StepFunction, XPoint

logger = logging.getLogger(__name__)


# ---------- presentations ----------
@dataclass(frozen=True)
class MarkovLimit:
    """Stationary inductive limit ``Z^q -A-> Z^q -A-> ...``.

    ``weights`` is the state on the basis vectors; it is a right eigenvector
    ``A w = s w``. ``order`` is ``"matrix"`` when positivity follows the
    nonnegative matrix A, or ``"strict_state"`` when the order is known to be
    the strict order of the unique state.
    """

    A: tuple[tuple[int, ...], ...]
    weights: tuple[Scalar, ...]
    s: Scalar
    order: str = "matrix"
    basis: tuple[StepFunction, ...] = field(default=(), compare=False)

    kind = "markov_limit"

    def __post_init__(self):
        q = len(self.A)
        if any(len(row) != q for row in self.A) or len(self.weights) != q:
            raise ValueError(f"Presentation needs a square matrix and {q} weights")
        for i in range(q):
            row = sum((as_scalar(self.A[i][j]) * self.weights[j] for j in range(q)), ZERO)
            if row != self.s * self.weights[i]:
                raise ValueError("State weights are not an eigenvector of the presentation matrix")

    @property
    def q(self) -> int:
        return len(self.A)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.A, dtype=object)

    @property
    def charpoly(self) -> tuple[int, ...]:
        return characteristic_polynomial(self.A)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "A": [list(row) for row in self.A],
            "s": self.s.to_literal(),
            "s_approx": self.s.describe(),
            "weights": [w.to_literal() for w in self.weights],
            "charpoly": list(self.charpoly),
            "charpoly_text": format_poly(self.charpoly),
            "infinitesimals": infinitesimal_exists(self),
            "order": self.order,
        }


@dataclass(frozen=True)
class LaurentCyclic:
    """``DG = Z[t, 1/t] [generator]`` with ``t`` acting as L_*.

    ``order`` is ``"strict_eval"`` (positive iff ``p(s) > 0``) or ``"unordered"``
    when only the group is known.
    """

    s: Scalar
    generator: StepFunction
    order: str = "strict_eval"
    generic: bool = False

    kind = "laurent_cyclic"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "s": self.s.to_literal(),
            "s_approx": self.s.describe(),
            "order": self.order,
            "generic": self.generic,
            "generator": self.generator.to_literal(),
            "infinitesimals": infinitesimal_exists(self),
        }


@dataclass(frozen=True)
class DirectSum:
    """Components ``G_0, ..., G_{N-1}`` with L_* sending ``G_i`` onto ``G_{cycle[i]}``.

    ``masses`` are the measures of the parts, ``s`` the scaling factor of the whole map.
    """

    components: tuple
    cycle: tuple[int, ...]
    s: Scalar
    masses: tuple[Scalar, ...]

    kind = "direct_sum"

    def __post_init__(self):
        n = len(self.components)
        if sorted(self.cycle) != list(range(n)):
            raise ValueError(f"Cycle {self.cycle} is not a permutation of {n} components")
        seen, i = set(), 0
        while i not in seen:
            seen.add(i)
            i = self.cycle[i]
        if len(seen) != n:
            raise ValueError(f"Permutation {self.cycle} is not a single cycle")

    @property
    def N(self) -> int:
        return len(self.components)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "N": self.N,
            "cycle": list(self.cycle),
            "s": self.s.to_literal(),
            "masses": [m.to_literal() for m in self.masses],
            "components": [c.to_dict() for c in self.components],
            "infinitesimals": infinitesimal_exists(self),
        }


@dataclass(frozen=True)
class GAElement:
    """Class ``[v, n]`` in the inductive limit."""

    v: tuple[int, ...]
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        if self.n < 0:
            raise ValueError(f"Level must be nonnegative: {self.n}")

    def to_dict(self) -> dict:
        return {"v": list(self.v), "n": self.n}


@dataclass(frozen=True)
class LaurentElement:
    """``p(L_*) [generator]`` for the Laurent polynomial ``p = sum c_k t^k``."""

    terms: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, terms: dict[int, int]) -> "LaurentElement":
        return cls(tuple(sorted((int(k), int(c)) for k, c in terms.items() if c)))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def to_dict(self) -> dict:
        return {"terms": {str(k): c for k, c in self.terms}}


# ---------- inductive limit arithmetic ----------
def _check_length(T: MarkovLimit, x: GAElement):
    if len(x.v) != T.q:
        raise ValueError(f"Vector of length {len(x.v)} in a presentation of rank {T.q}")


def _apply(v: Sequence[int], A: np.ndarray, k: int) -> np.ndarray:
    w = np.array(list(v), dtype=object)
    for _ in range(k):
        w = w.dot(A)
    return w


def _matrix_power(A: np.ndarray, k: int) -> np.ndarray:
    result = np.identity(len(A), dtype=int).astype(object)
    for _ in range(k):
        result = result.dot(A)
    return result


def ga_equal(T: MarkovLimit, x: GAElement, y: GAElement) -> bool:
    """``[v1, n1] = [v2, n2]`` iff ``v1 A^(n2+q) = v2 A^(n1+q)``; the kernel chain of A stabilizes by q."""
    _check_length(T, x)
    _check_length(T, y)
    return matrix_limit_equal(T.matrix, x, y)


def matrix_limit_equal(A: np.ndarray, x: GAElement, y: GAElement, k: int | None = None) -> bool:
    """``v1 A^(n2+k) = v2 A^(n1+k)`` for a bare integer matrix; ``k`` defaults to its size."""
    k = len(A) if k is None else k
    left = _apply(x.v, A, y.n + k)
    right = _apply(y.v, A, x.n + k)
    return all(a == b for a, b in zip(left, right))


def ga_zero(T: MarkovLimit) -> GAElement:
    return GAElement((0,) * T.q, 0)


def ga_shift(T: MarkovLimit, x: GAElement) -> GAElement:
    """``L_* [v, n] = [v A, n]``."""
    return GAElement(tuple(_apply(x.v, T.matrix, 1)), x.n)


def ga_canonical(T: MarkovLimit, x: GAElement) -> GAElement:
    """Lower the level while ``v`` is ``w A`` for an integer vector ``w`` (A invertible)."""
    _check_length(T, x)
    A = Matrix(T.A)
    if A.det() == 0:
        return x
    inverse = A.inv()
    v, n = x.v, x.n
    while n > 0:
        w = Matrix([list(v)]) * inverse
        if not all(c.is_integer for c in w):
            break
        v, n = tuple(int(c) for c in w), n - 1
    return GAElement(v, n)


def ga_state(T, x) -> Scalar:
    """Value of the normalized scaled state."""
    if isinstance(T, MarkovLimit):
        _check_length(T, x)
        total = sum((as_scalar(vi) * w for vi, w in zip(x.v, T.weights)), ZERO)
        return total / T.s**x.n
    if isinstance(T, LaurentCyclic):
        return evaluate_laurent(x.as_dict(), T.s)
    if isinstance(T, DirectSum):
        total = ZERO
        for component, mass, part in zip(T.components, T.masses, x):
            total = total + mass * ga_state(component, part)
        return total
    raise TypeError(f"Unknown presentation: {type(T).__name__}")


def _structure(T: MarkovLimit) -> tuple[str, int | None]:
    if T.order == "strict_state":
        return "primitive", 1
    try:
        primitive, period = primitivity_period(T.A)
    except NotTransitiveError:
        return "reducible", None
    return ("primitive" if primitive else "periodic"), period


def _state_sign(T: MarkovLimit, x: GAElement) -> str:
    if ga_equal(T, x, ga_zero(T)):
        return "zero"
    sign = ga_state(T, x).sign()
    return {1: "positive", -1: "negative", 0: "incomparable"}[sign]


def _combine_signs(signs: Sequence[str]) -> str:
    if any(s == "incomparable" for s in signs):
        return "incomparable"
    nonzero = {s for s in signs if s != "zero"}
    if not nonzero:
        return "zero"
    if nonzero == {"positive"}:
        return "positive"
    if nonzero == {"negative"}:
        return "negative"
    return "incomparable"


def ga_positive(T, x, iterations: int = POSITIVITY_ITERATIONS) -> str:
    """Order of ``x`` against 0: positive, zero, negative, incomparable or undetermined.

    Primitive presentations carry the strict order of the unique state, so a
    nonzero element with state 0 is an incomparable infinitesimal. Periodic
    presentations are decided on each cyclic class. Reducible ones fall back
    to checking ``v A^k >= 0`` for ``k`` up to ``iterations``.
    """
    if isinstance(T, LaurentCyclic):
        if x.is_zero:
            return "zero"
        if T.order != "strict_eval":
            return "undetermined"
        sign = ga_state(T, x).sign()
        return {1: "positive", -1: "negative", 0: "incomparable"}[sign]
    if isinstance(T, DirectSum):
        return _combine_signs([ga_positive(c, part, iterations) for c, part in zip(T.components, x)])
    _check_length(T, x)
    structure, period = _structure(T)
    if structure == "primitive":
        return _state_sign(T, x)
    if structure == "periodic":
        signs = []
        for cls in cyclic_classes(T.A, period):
            part = GAElement(tuple(x.v[i] if i in cls else 0 for i in range(T.q)), x.n)
            signs.append(_state_sign(T, part))
        return _combine_signs(signs)
    if ga_equal(T, x, ga_zero(T)):
        return "zero"
    A = T.matrix
    w = np.array(list(x.v), dtype=object)
    for _ in range(iterations + 1):
        if all(c >= 0 for c in w):
            return "positive"
        if all(c <= 0 for c in w):
            return "negative"
        w = w.dot(A)
    logger.warning("Positivity undetermined after %d iterations of the presentation matrix", iterations)
    return "undetermined"


# ---------- infinitesimals ----------
def _reducible_after_t(coeffs: Sequence[int]) -> bool:
    coeffs = list(coeffs)
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) <= 2:
        return False
    return not int_poly(coeffs).is_irreducible


def infinitesimal_exists(T) -> bool:
    """Whether DG has nonzero infinitesimals.

    For a primitive matrix this happens iff its characteristic polynomial, with
    the largest power of t divided out, is reducible over Q. A sequence of
    integer coefficients (little-endian) is accepted in place of a presentation.
    """
    if isinstance(T, MarkovLimit):
        return _reducible_after_t(T.charpoly)
    if isinstance(T, LaurentCyclic):
        return not T.generic
    if isinstance(T, DirectSum):
        return any(infinitesimal_exists(c) for c in T.components)
    return _reducible_after_t([int(c) for c in T])


# ---------- state range ----------
@dataclass(frozen=True)
class SubgroupOfR:
    """``sum_i Z[s, 1/s] w_i`` inside the reals."""

    s: Scalar
    generators: tuple[Scalar, ...]
    backend: str
    denominator_primes: tuple[int, ...] = ()
    scale: Fraction | None = None
    lattice: tuple[Scalar, ...] = ()
    generic: bool = False

    def contains(self, x: Any) -> bool | None:
        """Membership test; None when the backend cannot decide."""
        x = as_scalar(x)
        if not x or any(x == g for g in self.generators):
            return True
        if self.backend == "rational_denominator":
            if not x.is_rational:
                return False
            quotient = x.as_fraction() / self.scale
            return all(p in self.denominator_primes for p in factorint(quotient.denominator))
        if self.backend == "unit_lattice":
            return _lattice_contains(self.lattice, x, self.s)
        return None

    def describe(self) -> str:
        if self.backend == "rational_denominator":
            ring = f"Z[1/{math.prod(self.denominator_primes)}]" if self.denominator_primes else "Z"
            return ring if self.scale == 1 else f"({self.scale}){ring}"
        if self.backend == "unit_lattice":
            return " + ".join(f"Z·({g.describe()})" for g in self.lattice)
        gens = ", ".join(g.describe() for g in self.generators)
        return f"Z[s,1/s]·{{{gens}}}"

    def to_dict(self) -> dict:
        out = {
            "backend": self.backend,
            "s": self.s.to_literal(),
            "generators": [g.to_literal() for g in self.generators],
            "description": self.describe(),
        }
        if self.backend == "rational_denominator":
            out["scale"] = str(self.scale)
            out["primes"] = list(self.denominator_primes)
        if self.backend == "unit_lattice":
            out["basis"] = [g.to_literal() for g in self.lattice]
        return out


def _rational_gcd(values: Sequence[Fraction]) -> Fraction:
    common = math.lcm(*(v.denominator for v in values))
    return Fraction(math.gcd(*(int(v * common) for v in values)), common)


def _lattice_basis(generators: Sequence[Scalar], s: Scalar) -> tuple[Scalar, ...]:
    degree = s.context.degree
    s_power = [ONE]
    for _ in range(degree - 1):
        s_power.append(s_power[-1] * s)
    spanning = [g * p for g in generators for p in s_power]
    coords = [g.coefficients(degree) for g in spanning]
    common = math.lcm(*(c.denominator for row in coords for c in row))
    M = Matrix(degree, len(spanning), lambda i, j: int(coords[j][i] * common))
    H = hermite_normal_form(M)
    basis = []
    for j in range(H.cols):
        column = [Fraction(int(H[i, j]), common) for i in range(degree)]
        if any(column):
            basis.append(Scalar.algebraic(column, s.context))
    return tuple(basis)


def _lattice_contains(basis: Sequence[Scalar], x: Scalar, s: Scalar) -> bool:
    if x.context not in (None, s.context):
        return False
    degree = s.context.degree
    columns = [b.coefficients(degree) for b in basis]
    target = x.coefficients(degree)
    rows = [[columns[j][i] for j in range(len(columns))] for i in range(degree)]
    solution = solve_linear(rows, target)
    if solution is None:
        return False
    return all(c.is_integer() for c in solution)


def _state_generators(T) -> tuple[Scalar, ...]:
    if isinstance(T, MarkovLimit):
        return tuple(T.weights)
    if isinstance(T, LaurentCyclic):
        return (ONE,)
    if isinstance(T, DirectSum):
        return tuple(
            mass * w for component, mass in zip(T.components, T.masses) for w in _state_generators(component)
        )
    raise TypeError(f"Unknown presentation: {type(T).__name__}")


def state_range(T, generic: bool = False) -> SubgroupOfR:
    """Range of the unnormalized state as a subgroup of the reals, with a membership backend."""
    return subgroup_of_reals(T.s, _state_generators(T), generic or getattr(T, "generic", False))


def subgroup_of_reals(s: Any, generators: Sequence[Any], generic: bool = False) -> SubgroupOfR:
    """``sum_i Z[s, 1/s] w_i`` with the membership backend matching the arithmetic of s."""
    s = as_scalar(s)
    generators = tuple(as_scalar(g) for g in generators)
    if not any(generators):
        raise ValueError("State range needs a nonzero generator")
    if generic:
        return SubgroupOfR(s, generators, "generic_symbolic", generic=True)
    if s.is_rational and all(g.is_rational for g in generators):
        q = s.as_fraction()
        primes = sorted(set(factorint(q.numerator)) | set(factorint(q.denominator)))
        scale = _rational_gcd([g.as_fraction() for g in generators if g])
        for p in primes:
            while scale.numerator % p == 0:
                scale /= p
            while scale.denominator % p == 0:
                scale *= p
        return SubgroupOfR(s, generators, "rational_denominator", tuple(primes), scale)
    if not s.is_rational and s.context.is_unit and all(g.context in (None, s.context) for g in generators):
        return SubgroupOfR(s, generators, "unit_lattice", lattice=_lattice_basis(generators, s))
    return SubgroupOfR(s, generators, "undecided")


# ---------- Markov presentations ----------
def markov_presentation(tau: PLMap, bound: int = ORBIT_BOUND, markov: MarkovData | None = None) -> MarkovLimit:
    """Inductive limit over the Markov partition with the Perron state.

    Raises
    ------
    UnsupportedMapError
        When the critical orbits do not close within ``bound``.
    NotTransitiveError
        When the incidence matrix is reducible.
    """
    if markov is None:
        markov = detect_markov(tau, bound)
    if isinstance(markov, NotMarkovWithinBound):
        raise UnsupportedMapError(f"Map is not Markov within {bound} steps")
    if not markov.irreducible:
        raise NotTransitiveError("Incidence matrix is reducible; the map is not transitive")
    perron = perron_data(markov.incidence)
    basis = tuple(StepFunction.indicator(cell.lo, cell.hi) for cell in markov.cells)
    return MarkovLimit(markov.incidence, perron.right, perron.s, "matrix", basis)


@dataclass(frozen=True)
class BetaPresentation:
    beta: Scalar
    itinerary: tuple[int, ...]
    preperiod: int | None
    p: int | None
    case: str | None
    minpoly: tuple[int, ...] | None
    B: tuple[tuple[int, ...], ...] | None
    state_basis: tuple[Scalar, ...]
    fallback: bool
    presentation: Any

    def to_dict(self) -> dict:
        out = {
            "beta": self.beta.to_literal(),
            "beta_approx": self.beta.describe(),
            "itinerary": list(self.itinerary),
            "fallback": self.fallback,
            "presentation": self.presentation.to_dict(),
            "state_basis": [v.to_literal() for v in self.state_basis],
        }
        if not self.fallback:
            out.update({
                "k": self.preperiod,
                "p": self.p,
                "case": self.case,
                "m": list(self.minpoly),
                "m_text": format_poly(self.minpoly),
                "B": [list(row) for row in self.B],
                "layout": "basis (I, L I, ..., L^(q-1) I); row i maps e_i to e_(i+1); last row holds c_0..c_(q-1) of m(t) = t^q - sum c_i t^i",
            })
        return out


def _beta_minimal_polynomial(itinerary: Sequence[int], k: int, p: int, case: str) -> tuple[int, ...]:
    """Little-endian coefficients of the minimal polynomial of L on ``Z[t] I(0, 1)``."""
    if case == "i":
        return (-itinerary[0], 1)
    if case == "iii":
        q = p - 1
        coeffs = [0] * (q + 1)
        coeffs[q] = 1
        for j in range(q):
            coeffs[q - 1 - j] -= itinerary[j]
        return tuple(coeffs)
    coeffs = [0] * (p + 1)
    coeffs[p] = 1
    for j in range(p):
        coeffs[p - 1 - j] -= itinerary[j]
    coeffs[k] -= 1
    for j in range(k):
        coeffs[k - 1 - j] += itinerary[j]
    return tuple(coeffs)


def beta_presentation(beta: Any, bound: int = ORBIT_BOUND) -> BetaPresentation:
    """Presentation of DG for the beta-transformation read off the orbit of 1.

    The matrix B is built from the verified identity ``psi(v B) = L psi(v)`` for
    ``psi(z) = sum z_i L^i I(0, 1)``; its characteristic polynomial is checked
    against the minimal polynomial from the itinerary.
    """
    beta = as_scalar(beta)
    if not beta > 1:
        raise ValueError(f"Beta must exceed 1, got {beta.describe()}")
    tau = beta_map(beta)
    ctx = TransferContext.of(tau)
    record = orbit(tau, ONE, bound, "1")
    itinerary = tuple((beta * x).floor() for x in record.iterates)
    if not record.closed:
        logger.debug("Orbit of 1 open after %d steps; using the Laurent presentation", bound)
        presentation = LaurentCyclic(beta, StepFunction.constant(1), "strict_eval")
        return BetaPresentation(beta, itinerary, None, None, None, None, None, (ONE,), True, presentation)
    p, k = len(record.iterates), record.preperiod
    if p == 1:
        case = "i"
    elif record.iterates[-1] == 0:
        case = "iii"
    else:
        case = "ii"
    m = _beta_minimal_polynomial(itinerary, k, p, case)
    q = len(m) - 1
    powers = [StepFunction.constant(1)]
    for _ in range(q):
        powers.append(transfer_apply(ctx, powers[-1]))
    c = _solve_combination(powers[:q], powers[q])
    if c is None or any(not ci.is_integer() for ci in c):
        raise CertificateError(f"L^{q} I(0,1) is not an integer combination of lower powers")
    rows = [tuple(int(i + 1 == j) for j in range(q)) for i in range(q - 1)]
    rows.append(tuple(int(ci.as_fraction()) for ci in c))
    B = tuple(rows)
    for i in range(q):
        image = sum((powers[j].scale(B[i][j]) for j in range(q) if B[i][j]), StepFunction.zero())
        if image != transfer_apply(ctx, powers[i]):
            raise CertificateError(f"psi(e_{i} B) differs from L psi(e_{i})")
    if characteristic_polynomial(B) != m:
        raise CertificateError(
            f"Characteristic polynomial {format_poly(characteristic_polynomial(B))} differs from {format_poly(m)}"
        )
    state_basis = tuple(beta**i for i in range(q))
    presentation = MarkovLimit(B, state_basis, beta, "strict_state", tuple(powers[:q]))
    return BetaPresentation(beta, itinerary, k, p, case, m, B, state_basis, False, presentation)


def _solve_combination(basis: Sequence[StepFunction], target: StepFunction) -> list[Scalar] | None:
    cuts = sorted(set(target.cuts).union(*(set(g.cuts) for g in basis)))
    probes = [ZERO] + cuts
    rows = [[g.evaluate(XPoint.plus(x)) for g in basis] for x in probes]
    rhs = [target.evaluate(XPoint.plus(x)) for x in probes]
    return solve_linear(rows, rhs)


def cyclic_detect(tau: PLMap, bound: int = ORBIT_BOUND) -> bool:
    """Some endpoint ``a`` has an orbit open within ``bound`` while the other breakpoints map into the breakpoints."""
    C = set(tau.breakpoints)
    for a in (ZERO, ONE):
        if orbit(tau, a, bound).closed:
            continue
        if all(set(hat_image_point(tau, c)) <= C for c in C if c != a):
            return True
    return False


def canonical_generators(tau: PLMap) -> tuple[list[StepFunction], list[StepFunction]]:
    """Indicators of the laps and of the jump intervals at discontinuities."""
    if not classify(tau).surjective_hat:
        raise UnsupportedMapError("Canonical generators need a surjective map")
    laps = [StepFunction.indicator(b.lo, b.hi) for b in tau.branches]
    jumps = []
    for i in range(1, tau.n):
        left, right = tau.branches[i - 1].right_value, tau.branches[i].left_value
        if left != right:
            jumps.append(StepFunction.indicator(min(left, right), max(left, right)))
    return laps, jumps


# ---------- unimodal maps and direct sums ----------
def _laurent_components(tau: PLMap, decomposition: ExactDecomposition, s: Scalar) -> list[LaurentCyclic]:
    return [
        LaurentCyclic(s**decomposition.N, StepFunction.indicator_set(part), "unordered")
        for part in decomposition.parts
    ]


def direct_sum_decompose(
    tau: PLMap, decomposition: ExactDecomposition | None = None, bound: int = ORBIT_BOUND
) -> DirectSum:
    """Direct sum over the exact pieces, each presenting ``sigma^N`` on its part with its own normalized state."""
    if decomposition is None:
        decomposition = exact_decomposition(tau, bound)
    N = decomposition.N
    cycle = tuple((i + 1) % N for i in range(N))
    markov = detect_markov(tau, bound)
    if isinstance(markov, MarkovData) and markov.irreducible:
        perron = perron_data(markov.incidence)
        A_N = _matrix_power(markov.matrix(), N)
        classes = cyclic_classes(markov.incidence, N)
        components, masses = [], []
        for cls in classes:
            mass = sum((perron.right[i] for i in cls), ZERO)
            block = tuple(tuple(int(A_N[i][j]) for j in cls) for i in cls)
            weights = tuple(perron.right[i] / mass for i in cls)
            basis = tuple(StepFunction.indicator(markov.cells[i].lo, markov.cells[i].hi) for i in cls)
            components.append(MarkovLimit(block, weights, perron.s**N, "matrix", basis))
            masses.append(mass)
        return DirectSum(tuple(components), cycle, perron.s, tuple(masses))
    measure = scaling_measure(tau, bound)
    if N == 1:
        presentation = markov_presentation(tau, bound, markov) if isinstance(markov, MarkovData) else (
            LaurentCyclic(measure.s, StepFunction.constant(1), "strict_eval")
        )
        return DirectSum((presentation,), (0,), measure.s, (ONE,))
    masses = tuple(measure.weights.measure_set(part) for part in decomposition.parts)
    return DirectSum(tuple(_laurent_components(tau, decomposition, measure.s)), cycle, measure.s, masses)


def dimension_presentation(
    tau: PLMap,
    bound: int = ORBIT_BOUND,
    generic: bool = False,
    decomposition: ExactDecomposition | None = None,
):
    """The presentation matching the structure of the map, or None when no route applies.

    Markov maps use the incidence matrix (a direct sum when the period exceeds 1),
    maps with N > 1 exact pieces a direct sum, and maps with a single open
    endpoint orbit the cyclic Laurent presentation.
    """
    if generic:
        s = scaling_measure(tau, bound).s
        return LaurentCyclic(s, StepFunction.constant(1), "strict_eval", generic=True)
    markov = detect_markov(tau, bound)
    if isinstance(markov, MarkovData):
        if not markov.irreducible:
            raise NotTransitiveError("Incidence matrix is reducible; the map is not transitive")
        if markov.period > 1:
            return direct_sum_decompose(tau, decomposition, bound)
        return markov_presentation(tau, bound, markov)
    if decomposition is None:
        decomposition = exact_decomposition(tau, bound)
    if decomposition.N > 1:
        return direct_sum_decompose(tau, decomposition, bound)
    if cyclic_detect(tau, bound):
        return LaurentCyclic(scaling_measure(tau, bound).s, StepFunction.constant(1), "strict_eval")
    logger.warning("No presentation route for %s within bound %d", tau.name or "map", bound)
    return None


def unimodal_presentation(tau: PLMap, bound: int = ORBIT_BOUND):
    """Presentation of a transitive unimodal map through its restricted tent model.

    Raises
    ------
    NotTransitiveError
        When the slope is below sqrt(2).
    """
    if tau.n != 2 or not classify(tau).continuous:
        raise UnsupportedMapError("Unimodal presentation needs a continuous map with two laps")
    measure = scaling_measure(tau, bound) if tau.uniform_slope() is None else None
    model = tau if measure is None else uniformize(tau, measure.weights, measure.s)
    s = model.uniform_slope()
    gap = (s * s - 2).sign()
    if gap < 0:
        raise NotTransitiveError(f"Slope {s.describe()} is below sqrt(2); the map is not transitive")
    if gap == 0:
        return direct_sum_decompose(model, bound=bound)
    markov = detect_markov(model, bound)
    if isinstance(markov, MarkovData):
        return markov_presentation(model, bound, markov)
    return LaurentCyclic(s, StepFunction.constant(1), "strict_eval")


# ---------- conjugacy ----------
@dataclass(frozen=True)
class ConjugacyResult:
    verdict: str
    reason: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason, **self.details}


def _values_at_breakpoints(tau: PLMap) -> list[Scalar]:
    return [tau.branches[0].left_value] + [b.right_value for b in tau.branches]


def _compare_increasing(tau1: PLMap, tau2: PLMap, bound: int) -> ConjugacyResult:
    if tau1.n != tau2.n:
        return ConjugacyResult("not_conjugate", "lap count", {"laps": [tau1.n, tau2.n]})
    if tau1.branches[0].direction is not tau2.branches[0].direction:
        return ConjugacyResult(
            "not_conjugate",
            "first-interval direction",
            {"directions": [tau1.branches[0].direction.value, tau2.branches[0].direction.value]},
        )
    for tau in (tau1, tau2):
        verdict = transitivity_check(tau)
        if verdict.status == "not_transitive":
            raise NotTransitiveError(f"{tau.name or 'map'} is not transitive: invariant set {verdict.witness.describe()}")
        if verdict.status == "undetermined":
            return ConjugacyResult("undetermined", "transitivity undetermined")
    try:
        m1, m2 = scaling_measure(tau1, bound), scaling_measure(tau2, bound)
    except UnsupportedMapError as e:
        return ConjugacyResult("undetermined", f"scaling measure unavailable: {e}")
    if not same_real_number(m1.s, m2.s):
        return ConjugacyResult(
            "not_conjugate", "scaling factor", {"s": [m1.s.describe(), m2.s.describe()]}
        )
    T1 = uniformize(tau1, m1.weights, m1.s)
    T2 = uniformize(tau2, m2.weights, m2.s)
    if not all(same_real_number(a, b) for a, b in zip(T1.breakpoints, T2.breakpoints)):
        return ConjugacyResult("not_conjugate", "breakpoint coordinates")
    if T1.directions != T2.directions:
        return ConjugacyResult("not_conjugate", "fold directions")
    if not all(same_real_number(a, b) for a, b in zip(_values_at_breakpoints(T1), _values_at_breakpoints(T2))):
        return ConjugacyResult("not_conjugate", "branch values")
    return ConjugacyResult(
        "conjugate_increasing", "uniformized maps coincide", {"s": m1.s.to_literal()}
    )


def conjugacy_compare(tau1: PLMap, tau2: PLMap, bound: int = ORBIT_BOUND, allow_decreasing: bool = False) -> ConjugacyResult:
    """Compare two continuous transitive maps through their uniformized models.

    With ``allow_decreasing`` a failed increasing comparison is retried after
    conjugating the first map by ``x -> 1 - x``.
    """
    for tau in (tau1, tau2):
        if not classify(tau).continuous:
            raise UnsupportedMapError("Conjugacy comparison needs continuous maps")
    result = _compare_increasing(tau1, tau2, bound)
    if result.verdict == "not_conjugate" and allow_decreasing:
        flipped = _compare_increasing(flip_conjugate(tau1), tau2, bound)
        if flipped.verdict == "conjugate_increasing":
            return ConjugacyResult("conjugate_decreasing", "flip by x -> 1 - x", flipped.details)
    return result


def laurent_function(ctx: TransferContext, element: LaurentElement, generator: StepFunction | None = None) -> StepFunction:
    """``p(L) generator`` for a polynomial (no negative powers)."""
    terms = element.as_dict()
    if any(k < 0 for k in terms):
        raise ValueError("Negative powers of L have no step-function representative")
    current = generator or StepFunction.constant(1)
    total = StepFunction.zero()
    for k in range(max(terms, default=-1) + 1):
        if terms.get(k):
            total = total + current.scale(terms[k])
        current = transfer_apply(ctx, current)
    return total
