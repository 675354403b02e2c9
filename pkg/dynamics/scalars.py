"""Exact scalars over Q and over Q(s) for one real algebraic generator s.

A ``Scalar`` is either a rational number or a polynomial in s of degree
below ``deg(minpoly)``. Irrational elements carry their ``AlgebraicContext``
(integer minimal polynomial plus a rational isolating interval for the root);
rationals carry none and coerce into any context.
"""
from __future__ import annotations

import logging
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, total_ordering
from typing import Any, Iterable, Sequence

import sympy
from sympy import Matrix, Poly, QQ, Rational, ZZ, factor_list, symbols
from sympy.polys.polyclasses import ANP

from .defaults import SIGN_MAX_BITS
from .exceptions import CertificateError, ContextMismatchError, MapSpecError, PrecisionLimitError

logger = logging.getLogger(__name__)

T = symbols("t")

# Root precisions tried by sign determination, in bits, up to SIGN_MAX_BITS.
SIGN_PRECISIONS = tuple(16 << k for k in range(SIGN_MAX_BITS.bit_length()) if 16 << k <= SIGN_MAX_BITS)


def to_fraction(value: Any) -> Fraction:
    """Convert ints, strings, sympy and ground-domain rationals to ``Fraction``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"Cannot use a boolean as a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(repr(value))
    numerator = getattr(value, "numerator", None)
    denominator = getattr(value, "denominator", None)
    if numerator is not None and denominator is not None:
        return Fraction(int(numerator), int(denominator))
    raise TypeError(f"Cannot convert {value!r} to a rational number")


def _qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


def _sympy_rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def int_poly(coeffs: Sequence[int]) -> Poly:
    """Integer polynomial in ``t`` from little-endian coefficients."""
    return Poly([int(c) for c in reversed(coeffs)], T, domain=ZZ)


def poly_coeffs(poly: Poly) -> tuple[int, ...]:
    """Little-endian integer coefficients of a primitive integer polynomial."""
    if poly.get_domain() != ZZ:
        _, poly = poly.clear_denoms(convert=True)
    _, poly = poly.primitive()
    coeffs = tuple(int(c) for c in reversed(poly.all_coeffs()))
    if coeffs and coeffs[-1] < 0:
        coeffs = tuple(-c for c in coeffs)
    return coeffs


def format_poly(coeffs: Sequence[int], var: str = "t") -> str:
    """Render little-endian integer coefficients as ``t^2 - t - 1``."""
    terms = []
    for power in range(len(coeffs) - 1, -1, -1):
        c = int(coeffs[power])
        if c == 0:
            continue
        magnitude = abs(c)
        if power == 0:
            body = str(magnitude)
        else:
            monomial = var if power == 1 else f"{var}^{power}"
            body = monomial if magnitude == 1 else f"{magnitude}{monomial}"
        if not terms:
            terms.append(body if c > 0 else f"-{body}")
        else:
            terms.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(terms) if terms else "0"


@lru_cache(maxsize=8192)
def _refine_root(minpoly: tuple[int, ...], lo: Fraction, hi: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    left, right = int_poly(minpoly).refine_root(
        _sympy_rational(lo), _sympy_rational(hi), eps=_sympy_rational(eps)
    )
    return to_fraction(left), to_fraction(right)


def _bracket_polynomial(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Horner evaluation of a little-endian polynomial over ``[lo, hi]``."""
    low = high = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        products = (low * lo, low * hi, high * lo, high * hi)
        low, high = min(products) + c, max(products) + c
    return low, high


@dataclass(frozen=True, eq=False)
class AlgebraicContext:
    """A real algebraic number s given by its minimal polynomial and an isolating interval.

    Parameters
    ----------
    minpoly: sequence of int
        Little-endian integer coefficients ``[c0, ..., cd]``; normalized to
        primitive form with positive leading coefficient.
    interval: pair of rationals
        ``(lo, hi)`` with ``lo < hi`` containing exactly one real root, with
        the polynomial of opposite signs at the endpoints.
    """

    minpoly: tuple[int, ...]
    interval: tuple[Fraction, Fraction]

    def __post_init__(self):
        coeffs = [int(c) for c in self.minpoly]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValueError(f"Minimal polynomial must have degree >= 1: {self.minpoly}")
        content = math.gcd(*coeffs)
        sign = 1 if coeffs[-1] > 0 else -1
        object.__setattr__(self, "minpoly", tuple(sign * c // content for c in coeffs))

        lo, hi = (to_fraction(v) for v in self.interval)
        if not lo < hi:
            raise ValueError(f"Isolating interval must satisfy lo < hi: [{lo}, {hi}]")
        object.__setattr__(self, "interval", (lo, hi))

        poly = self.poly
        if not poly.is_irreducible:
            raise ValueError(f"Minimal polynomial {poly.as_expr()} is not irreducible over Q")
        at_lo = poly.eval(_sympy_rational(lo))
        at_hi = poly.eval(_sympy_rational(hi))
        if at_lo == 0 or at_hi == 0:
            raise ValueError(f"Isolating interval endpoint is a root of {poly.as_expr()}")
        if (at_lo > 0) == (at_hi > 0):
            raise ValueError(
                f"{poly.as_expr()} has equal signs at both ends of [{lo}, {hi}]"
            )
        if poly.count_roots(_sympy_rational(lo), _sympy_rational(hi)) != 1:
            raise ValueError(f"[{lo}, {hi}] does not isolate a single root of {poly.as_expr()}")

    @cached_property
    def poly(self) -> Poly:
        return int_poly(self.minpoly)

    @cached_property
    def qq_poly(self) -> Poly:
        return Poly([Rational(c) for c in reversed(self.minpoly)], T, domain=QQ)

    @cached_property
    def modulus(self) -> list:
        """Monic big-endian modulus over QQ, as used by ``ANP``."""
        lead = self.minpoly[-1]
        return [QQ(c, lead) for c in reversed(self.minpoly)]

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @cached_property
    def root_index(self) -> int:
        """Number of real roots of the minimal polynomial below this one."""
        return int(self.poly.count_roots(None, _sympy_rational(self.interval[0])))

    @property
    def key(self) -> tuple:
        return (self.minpoly, self.root_index)

    @property
    def is_unit(self) -> bool:
        """Whether s is an algebraic integer unit (monic, constant term +-1)."""
        return self.minpoly[-1] == 1 and abs(self.minpoly[0]) == 1

    @property
    def is_integral(self) -> bool:
        return self.minpoly[-1] == 1

    def root_bracket(self, eps: Fraction) -> tuple[Fraction, Fraction]:
        lo, hi = self.interval
        if hi - lo <= eps:
            return lo, hi
        return _refine_root(self.minpoly, lo, hi, eps)

    def __eq__(self, other):
        if not isinstance(other, AlgebraicContext):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        lo, hi = self.interval
        return f"AlgebraicContext({format_poly(self.minpoly)}, [{lo}, {hi}])"

    def to_literal(self) -> dict:
        lo, hi = self.interval
        return {"minpoly": list(self.minpoly), "interval": [str(lo), str(hi)]}


def _join_contexts(*contexts: AlgebraicContext | None) -> AlgebraicContext | None:
    found = None
    for context in contexts:
        if context is None:
            continue
        if found is None:
            found = context
        elif context != found:
            raise ContextMismatchError(f"Scalars from different number fields: {found!r} and {context!r}")
    return found


@total_ordering
class Scalar:
    """Exact element of Q or Q(s).

    Rational values are stored as a ``Fraction``; irrational values as
    little-endian rational coefficients in s, reduced modulo the minimal
    polynomial. Equal values always have identical canonical forms.
    """

    __slots__ = ("rational", "coeffs", "context")

    def __init__(self, value: Any = 0):
        if isinstance(value, Scalar):
            self.rational, self.coeffs, self.context = value.rational, value.coeffs, value.context
            return
        self.rational = to_fraction(value)
        self.coeffs = None
        self.context = None

    # ---------- construction ----------
    @classmethod
    def _canonical(cls, fracs: list[Fraction], context: AlgebraicContext) -> "Scalar":
        while fracs and fracs[-1] == 0:
            fracs.pop()
        if len(fracs) <= 1:
            return cls(fracs[0] if fracs else 0)
        obj = cls.__new__(cls)
        obj.rational = None
        obj.coeffs = tuple(fracs)
        obj.context = context
        return obj

    @classmethod
    def algebraic(cls, coeffs: Iterable[Any], context: AlgebraicContext) -> "Scalar":
        """Element ``sum(coeffs[i] * s**i)`` of ``Q(s)``."""
        fracs = [to_fraction(c) for c in coeffs]
        if len(fracs) > context.degree:
            poly = Poly([_sympy_rational(c) for c in reversed(fracs)], T, domain=QQ)
            remainder = poly.rem(context.qq_poly)
            fracs = [to_fraction(c) for c in reversed(remainder.all_coeffs())]
        return cls._canonical(fracs, context)

    @classmethod
    def generator(cls, context: AlgebraicContext) -> "Scalar":
        """The root s itself."""
        if context.degree == 1:
            c0, c1 = context.minpoly
            return cls(Fraction(-c0, c1))
        return cls.algebraic([0, 1], context)

    @classmethod
    def _from_anp(cls, value: ANP, context: AlgebraicContext) -> "Scalar":
        fracs = [to_fraction(c) for c in reversed(value.to_list())]
        return cls._canonical(fracs, context)

    def _anp(self, context: AlgebraicContext) -> ANP:
        if self.context is None:
            rep = [_qq(self.rational)] if self.rational else []
        else:
            rep = [_qq(c) for c in reversed(self.coeffs)]
        return ANP(rep, context.modulus, QQ)

    # ---------- inspection ----------
    @property
    def is_rational(self) -> bool:
        return self.context is None

    def as_fraction(self) -> Fraction:
        if self.context is not None:
            raise ValueError(f"{self!r} is irrational")
        return self.rational

    def is_integer(self) -> bool:
        return self.context is None and self.rational.denominator == 1

    def coefficients(self, degree: int | None = None) -> list[Fraction]:
        """Little-endian coefficients in s, padded to ``degree`` entries."""
        if self.context is None:
            fracs = [self.rational]
        else:
            fracs = list(self.coeffs)
        if degree is not None:
            fracs = fracs + [Fraction(0)] * (degree - len(fracs))
        return fracs

    # ---------- arithmetic ----------
    def _binary(self, other: Any, op) -> "Scalar":
        other = as_scalar(other)
        if self.context is None and other.context is None:
            return Scalar(op(self.rational, other.rational))
        context = _join_contexts(self.context, other.context)
        return Scalar._from_anp(op(self._anp(context), other._anp(context)), context)

    def __add__(self, other):
        try:
            return self._binary(other, operator.add)
        except TypeError:
            return NotImplemented

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        try:
            return self._binary(other, operator.sub)
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return as_scalar(other)._binary(self, operator.sub)
        except TypeError:
            return NotImplemented

    def __mul__(self, other):
        try:
            return self._binary(other, operator.mul)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        if not other:
            raise ZeroDivisionError(f"Division of {self} by zero")
        return self._binary(other, operator.truediv)

    def __rtruediv__(self, other):
        try:
            return as_scalar(other) / self
        except TypeError:
            return NotImplemented

    def __neg__(self):
        if self.context is None:
            return Scalar(-self.rational)
        return Scalar._canonical([-c for c in self.coeffs], self.context)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return (Scalar(1) / self) ** (-exponent)
        if self.context is None:
            return Scalar(self.rational ** exponent)
        return Scalar._from_anp(self._anp(self.context) ** exponent, self.context)

    def __bool__(self):
        return self.context is not None or self.rational != 0

    # ---------- comparison ----------
    def sign(self) -> int:
        """Exact sign: -1, 0 or +1."""
        if self.context is None:
            return (self.rational > 0) - (self.rational < 0)
        for bits in SIGN_PRECISIONS:
            lo, hi = self.bracket(Fraction(1, 2**bits))
            if lo > 0:
                return 1
            if hi < 0:
                return -1
        raise PrecisionLimitError(f"Sign of {self!r} not separated from zero at {SIGN_PRECISIONS[-1]} bits")

    def bracket(self, eps: Fraction) -> tuple[Fraction, Fraction]:
        """Rational bracket of the value using a root bracket of width ``eps``."""
        if self.context is None:
            return self.rational, self.rational
        lo, hi = self.context.root_bracket(eps)
        return _bracket_polynomial(self.coeffs, lo, hi)

    def __eq__(self, other):
        try:
            other = as_scalar(other)
        except (TypeError, ValueError):
            return NotImplemented
        if self.context is None or other.context is None:
            return self.context is None and other.context is None and self.rational == other.rational
        return self.context == other.context and self.coeffs == other.coeffs

    def __lt__(self, other):
        try:
            return (self - as_scalar(other)).sign() < 0
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self.context is None:
            return hash(self.rational)
        return hash((self.coeffs, self.context.key))

    # ---------- conversion ----------
    def refine(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """Rational ``[lo, hi]`` containing the value with ``hi - lo <= width``."""
        width = to_fraction(width)
        if width <= 0:
            raise ValueError(f"Refinement width must be positive: {width}")
        if self.context is None:
            return self.rational, self.rational
        eps = width
        while True:
            lo, hi = self.bracket(eps)
            if hi - lo <= width:
                return lo, hi
            eps /= 16

    def floor(self) -> int:
        if self.context is None:
            return math.floor(self.rational)
        eps = Fraction(1, 2**16)
        while True:
            lo, hi = self.bracket(eps)
            if math.floor(lo) == math.floor(hi):
                return math.floor(lo)
            eps /= 2**16

    def __float__(self):
        lo, hi = self.refine(Fraction(1, 2**64))
        return float((lo + hi) / 2)

    def to_literal(self) -> str | dict:
        """JSON literal: ``"p/q"`` or the algebraic dict form."""
        if self.context is None:
            return str(self.rational)
        literal = self.context.to_literal()
        literal["value"] = [str(c) for c in self.coefficients(self.context.degree)]
        return literal

    def describe(self, digits: int = 6) -> str:
        if self.context is None:
            return str(self.rational)
        return f"≈{float(self):.{digits}f}"

    def __str__(self):
        if self.context is None:
            return str(self.rational)
        terms = " + ".join(
            f"({c})*s^{i}" if i else f"({c})" for i, c in enumerate(self.coeffs) if c
        )
        return f"{terms} [s: {format_poly(self.context.minpoly)}]"

    def __repr__(self):
        if self.context is None:
            return f"Scalar('{self.rational}')"
        return f"Scalar({self.describe()}, {self.context!r})"

    # ---------- literals ----------
    @classmethod
    def from_literal(cls, literal: Any, field: str = "value") -> "Scalar":
        """Parse the number literal grammar used by map specifications.

        Accepts ints, ``"p/q"`` and decimal strings, and
        ``{"minpoly": [c0, ..., cd], "interval": ["lo", "hi"], "value": [a0, ...]}``.
        A dict without ``"value"`` denotes the root itself.
        """
        if isinstance(literal, Scalar):
            return literal
        if isinstance(literal, dict):
            try:
                context = AlgebraicContext(
                    tuple(int(c) for c in literal["minpoly"]),
                    tuple(to_fraction(v) for v in literal["interval"]),
                )
            except KeyError as e:
                raise MapSpecError(f"Algebraic literal is missing {e}", field) from e
            except (TypeError, ValueError) as e:
                raise MapSpecError(f"Invalid algebraic literal: {e}", field) from e
            values = literal.get("value", [0, 1])
            try:
                return cls.algebraic([to_fraction(v) for v in values], context)
            except (TypeError, ValueError) as e:
                raise MapSpecError(f"Invalid algebraic coefficients {values!r}: {e}", field) from e
        try:
            return cls(literal)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise MapSpecError(f"Invalid number literal {literal!r}", field) from e


ZERO = Scalar(0)
ONE = Scalar(1)


def as_scalar(value: Any) -> Scalar:
    if isinstance(value, Scalar):
        return value
    return Scalar(value)


def common_context(values: Iterable[Scalar]) -> AlgebraicContext | None:
    """The single number field shared by ``values`` (None when all rational)."""
    return _join_contexts(*(as_scalar(v).context for v in values))


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Exact ``a op b`` for ``op`` in add, sub, mul, div."""
    operations = {
        "add": operator.add,
        "sub": operator.sub,
        "mul": operator.mul,
        "div": operator.truediv,
    }
    if op not in operations:
        raise ValueError(f"Unknown scalar operation: {op}")
    return operations[op](as_scalar(a), as_scalar(b))


def scalar_sign(a: Scalar) -> int:
    return as_scalar(a).sign()


def refine_interval(a: Scalar, width: Fraction) -> tuple[Fraction, Fraction]:
    return as_scalar(a).refine(width)


def evaluate_polynomial(coeffs: Sequence[Any], x: Scalar) -> Scalar:
    """Horner evaluation of little-endian coefficients at ``x``."""
    x = as_scalar(x)
    result = ZERO
    for c in reversed(list(coeffs)):
        result = result * x + as_scalar(c)
    return result


def evaluate_laurent(terms: dict[int, int], x: Scalar) -> Scalar:
    """Evaluate ``sum(c * x**k)`` for a Laurent polynomial given as ``{k: c}``."""
    x = as_scalar(x)
    result = ZERO
    for exponent, c in terms.items():
        if c:
            result = result + as_scalar(c) * x**exponent
    return result


def minimal_polynomial(a: Scalar) -> tuple[int, ...]:
    """Primitive integer minimal polynomial of ``a`` (little-endian)."""
    a = as_scalar(a)
    if a.context is None:
        q = a.rational
        return (-q.numerator, q.denominator)
    degree = a.context.degree
    s = Scalar.generator(a.context)
    columns = []
    power = ONE
    for _ in range(degree):
        columns.append([_sympy_rational(c) for c in (a * power).coefficients(degree)])
        power = power * s
    matrix = Matrix(degree, degree, lambda i, j: columns[j][i])
    charpoly = matrix.charpoly(T)
    _, factors = factor_list(charpoly.as_expr(), T)
    for factor, _ in factors:
        coeffs = poly_coeffs(Poly(factor, T))
        if not evaluate_polynomial(coeffs, a):
            return coeffs
    raise CertificateError(f"No factor of the characteristic polynomial vanishes at {a!r}")


def _isolated_root_index(a: Scalar, coeffs: tuple[int, ...]) -> int:
    poly = int_poly(coeffs)
    eps = Fraction(1, 2**16)
    while True:
        lo, hi = a.bracket(eps)
        if lo < hi and poly.eval(_sympy_rational(lo)) != 0 and poly.eval(_sympy_rational(hi)) != 0:
            if poly.count_roots(_sympy_rational(lo), _sympy_rational(hi)) == 1:
                return int(poly.count_roots(None, _sympy_rational(lo)))
        eps /= 2**16


def same_real_number(a: Scalar, b: Scalar) -> bool:
    """Equality of two scalars that may live in different number fields."""
    a, b = as_scalar(a), as_scalar(b)
    if a.context is None and b.context is None:
        return a.rational == b.rational
    if a.context is None or b.context is None:
        return False
    if a.context == b.context:
        return a == b
    coeffs = minimal_polynomial(a)
    if coeffs != minimal_polynomial(b):
        return False
    return _isolated_root_index(a, coeffs) == _isolated_root_index(b, coeffs)


# ---------- linear algebra over Scalars ----------
def row_reduce(rows: Sequence[Sequence[Any]]) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    matrix = [[as_scalar(v) for v in row] for row in rows]
    if not matrix:
        return [], []
    width = len(matrix[0])
    pivots: list[int] = []
    r = 0
    for col in range(width):
        pivot_row = next((i for i in range(r, len(matrix)) if matrix[i][col]), None)
        if pivot_row is None:
            continue
        matrix[r], matrix[pivot_row] = matrix[pivot_row], matrix[r]
        inverse = ONE / matrix[r][col]
        matrix[r] = [v * inverse for v in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][col]:
                factor = matrix[i][col]
                matrix[i] = [v - factor * w for v, w in zip(matrix[i], matrix[r])]
        pivots.append(col)
        r += 1
        if r == len(matrix):
            break
    return matrix, pivots


def nullspace(rows: Sequence[Sequence[Any]]) -> list[list[Scalar]]:
    """Basis of ``{x : rows @ x = 0}``."""
    if not rows:
        return []
    width = len(rows[0])
    reduced, pivots = row_reduce(rows)
    basis = []
    for free in (c for c in range(width) if c not in pivots):
        vector = [ZERO] * width
        vector[free] = ONE
        for r, col in enumerate(pivots):
            vector[col] = -reduced[r][free]
        basis.append(vector)
    return basis


def solve_linear(rows: Sequence[Sequence[Any]], rhs: Sequence[Any]) -> list[Scalar] | None:
    """One solution of ``rows @ x = rhs`` (free variables set to 0), or None."""
    width = len(rows[0]) if rows else 0
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = row_reduce(augmented)
    if width in pivots:
        return None
    solution = [ZERO] * width
    for r, col in enumerate(pivots):
        solution[col] = reduced[r][width]
    return solution
