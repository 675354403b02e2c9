"""Perron-Frobenius iteration: limits of ``(P^N)^k f``, the eigenfunctions phi_i and their cycle."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .decomposition import ExactDecomposition, exact_decomposition
from .defaults import MAXITER, ORBIT_BOUND, PF_CUT_CAP, TOLERANCE
from .exceptions import UnsupportedMapError
from .maps import PLMap
from .markov import MarkovData, NotMarkovWithinBound, ScalingMeasure, detect_markov, perron_data, scaling_measure
from .scalars import ONE, ZERO, Scalar, as_scalar, to_fraction
from .transfer import TransferContext, transfer_apply
from .xspace import MeasureWeights, StepFunction, step_integrate, step_l1, step_supnorm, step_var

logger = logging.getLogger(__name__)

UPPER_WIDTH = Fraction(1, 10**12)


def _upper(x: Scalar) -> Fraction:
    """Rational upper bound of a nonnegative scalar."""
    return x.refine(UPPER_WIDTH)[1]


@dataclass(frozen=True)
class PFReport:
    """Outcome of Perron-Frobenius iteration on one or several parts.

    ``error_traces[i]`` lists rational upper bounds of the sup distance between
    successive iterates for ``phi[i]``. ``coarsening_error`` is the total sup
    error added by collapsing cuts; it is zero for fully exact runs.
    """

    N: int
    s: Scalar
    phi: tuple[StepFunction, ...]
    parts: tuple[int, ...]
    error_traces: tuple[tuple[Fraction, ...], ...]
    support_min: tuple[Scalar | None, ...]
    iterations: tuple[int, ...]
    converged: bool
    tol: Fraction
    coarsening_error: Fraction = Fraction(0)
    mass_preserved: bool = True
    variation_constant: Fraction = Fraction(0)
    exact: bool = False

    @property
    def error_trace(self) -> tuple[Fraction, ...]:
        return self.error_traces[0] if self.error_traces else ()

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "s": self.s.to_literal(),
            "exact": self.exact,
            "converged": self.converged,
            "tol": str(self.tol),
            "parts": list(self.parts),
            "phi": [f.to_literal() for f in self.phi],
            "support_min": [m.to_literal() if m is not None else None for m in self.support_min],
            "iterations": list(self.iterations),
            "error_traces": [[str(e) for e in trace] for trace in self.error_traces],
            "coarsening_error": str(self.coarsening_error),
            "mass_preserved": self.mass_preserved,
            "variation_constant": str(self.variation_constant),
        }


@dataclass
class _Run:
    iterate: StepFunction
    trace: list[Fraction] = field(default_factory=list)
    coarsening_error: Fraction = Fraction(0)
    mass_preserved: bool = True
    variation_constant: Fraction = Fraction(0)
    converged: bool = False


def coarsen(f: StepFunction, weights: MeasureWeights, cap: int) -> tuple[StepFunction, Fraction]:
    """Keep every k-th cut of ``f`` and replace it on each merged cell by its mu-average.

    The integral against ``mu`` is unchanged. Returns the coarse function and a
    rational bound on the sup distance to ``f``.
    """
    if len(f.cuts) <= cap:
        return f, Fraction(0)
    stride = -(-len(f.cuts) // cap)
    keep = set(f.cuts[stride - 1::stride])
    pieces, error = [], Fraction(0)
    cell: list[tuple[Scalar, Scalar, Scalar]] = []
    for lo, hi, value in f.pieces():
        cell.append((lo, hi, value))
        if hi in keep or hi == 1:
            a, b = cell[0][0], cell[-1][1]
            mass = weights.measure(a, b)
            total = sum((v * weights.measure(x, y) for x, y, v in cell), ZERO)
            average = total / mass if mass else cell[0][2]
            spread = max(abs(v - average) for _, _, v in cell)
            error = max(error, _upper(spread))
            pieces.append((a, b, average))
            cell = []
    return StepFunction.from_pieces(pieces), error


def _part_of(decomposition: ExactDecomposition, f: StepFunction) -> int:
    support = f.support()
    for i, part in enumerate(decomposition.parts):
        if support.issubset(part):
            return i
    raise ValueError(f"Support {support.describe()} straddles the parts of the decomposition")


def pf_limit(
    tau: PLMap,
    f: StepFunction,
    tol: Any = TOLERANCE,
    maxiter: int = MAXITER,
    measure: ScalingMeasure | None = None,
    decomposition: ExactDecomposition | None = None,
    cut_cap: int = PF_CUT_CAP,
    bound: int = ORBIT_BOUND,
) -> tuple[StepFunction, PFReport]:
    """Iterate ``P^N`` on ``f`` until successive iterates are within ``tol`` in sup norm.

    Parameters
    ----------
    tau: PLMap
        A transitive map.
    f: StepFunction
        Supported inside one part of the exact decomposition.
    tol: rational
    maxiter: int
        Applications of ``P^N`` allowed; the report says ``converged=False`` past it.
    cut_cap: int
        Cut count beyond which iterates are coarsened.

    Returns
    -------
    (StepFunction, PFReport)
        The last iterate, an estimate of ``mu(f) phi_i``, and the report.
    """
    tol = to_fraction(tol)
    if tol < 0:
        raise ValueError(f"Tolerance must be nonnegative: {tol}")
    if measure is None:
        measure = scaling_measure(tau, bound)
    if decomposition is None:
        decomposition = exact_decomposition(tau, bound)
    N = decomposition.N
    if f.is_zero():
        report = PFReport(N, measure.s, (f,), (0,), ((),), (None,), (0,), True, tol, exact=True)
        return f, report
    part = _part_of(decomposition, f)
    run = _iterate(TransferContext.of(tau), f, measure, N, tol, maxiter, cut_cap)
    report = PFReport(
        N,
        measure.s,
        (run.iterate,),
        (part,),
        (tuple(run.trace),),
        (run.iterate.min_on_support(),),
        (len(run.trace),),
        run.converged,
        tol,
        run.coarsening_error,
        run.mass_preserved,
        run.variation_constant,
    )
    return run.iterate, report


def _iterate(
    ctx: TransferContext, f: StepFunction, measure: ScalingMeasure, N: int, tol: Fraction, maxiter: int, cut_cap: int
) -> _Run:
    factor = ONE / measure.s**N
    mass = step_integrate(f, measure.weights)
    scale = _upper(step_var(f) + step_l1(f, measure.weights))
    run = _Run(f)
    current = f
    for k in range(1, maxiter + 1):
        following = current
        for _ in range(N):
            following = transfer_apply(ctx, following)
        following = following.scale(factor)
        following, error = coarsen(following, measure.weights, cut_cap)
        if error:
            logger.debug("Coarsened iterate %d, sup error %s", k, error)
            run.coarsening_error += error
        if step_integrate(following, measure.weights) != mass:
            run.mass_preserved = False
        if scale:
            run.variation_constant = max(run.variation_constant, _upper(step_var(following)) / scale)
        distance = _upper(step_supnorm(following - current))
        run.trace.append(distance)
        current = following
        if distance <= tol:
            run.converged = True
            break
    run.iterate = current
    if not run.converged:
        logger.warning("PF iteration not within %s after %d steps", tol, maxiter)
    if run.coarsening_error:
        logger.warning("PF iterates coarsened; added sup error %s", run.coarsening_error)
    return run


def pf_eigenfunctions(
    tau: PLMap,
    tol: Any = TOLERANCE,
    maxiter: int = MAXITER,
    measure: ScalingMeasure | None = None,
    decomposition: ExactDecomposition | None = None,
    cut_cap: int = PF_CUT_CAP,
    bound: int = ORBIT_BOUND,
) -> PFReport:
    """``phi_i`` as the limit from ``chi_{X_i} / mu(X_i)`` for every part."""
    tol = to_fraction(tol)
    if measure is None:
        measure = scaling_measure(tau, bound)
    if decomposition is None:
        decomposition = exact_decomposition(tau, bound)
    ctx = TransferContext.of(tau)
    runs = []
    for part in decomposition.parts:
        f = StepFunction.indicator_set(part, ONE / measure.weights.measure_set(part))
        runs.append(_iterate(ctx, f, measure, decomposition.N, tol, maxiter, cut_cap))
    return PFReport(
        decomposition.N,
        measure.s,
        tuple(r.iterate for r in runs),
        tuple(range(decomposition.N)),
        tuple(tuple(r.trace) for r in runs),
        tuple(r.iterate.min_on_support() for r in runs),
        tuple(len(r.trace) for r in runs),
        all(r.converged for r in runs),
        tol,
        sum((r.coarsening_error for r in runs), Fraction(0)),
        all(r.mass_preserved for r in runs),
        max(r.variation_constant for r in runs),
    )


# ---------- exact fixed points ----------
def pf_fixed_point_exact(markov: MarkovData, measure: ScalingMeasure, s: Any = None) -> StepFunction:
    """``h = sum v_j chi_{E_j}`` for the left Perron vector ``v``, normalized to ``mu(h) = 1``.

    ``P h = h`` since ``L chi_{E_j} = sum_k A_jk chi_{E_k}``.
    """
    if not markov.irreducible:
        raise UnsupportedMapError("Incidence matrix is reducible")
    perron = perron_data(markov.incidence)
    if s is not None and as_scalar(s) != perron.s:
        raise ValueError(f"Scaling factor {as_scalar(s).describe()} differs from the Perron root {perron.s.describe()}")
    masses = [measure.weights.measure(cell.lo, cell.hi) for cell in markov.cells]
    pairing = sum((v * m for v, m in zip(perron.left, masses)), ZERO)
    return markov.function_of([v / pairing for v in perron.left])


def pf_exact_report(
    tau: PLMap, bound: int = ORBIT_BOUND, decomposition: ExactDecomposition | None = None
) -> PFReport:
    """Exact ``phi_i = N h`` on ``X_i`` from the fixed point of a Markov map."""
    markov = detect_markov(tau, bound)
    if isinstance(markov, NotMarkovWithinBound):
        raise UnsupportedMapError(f"Exact eigenfunctions need a Markov partition within bound {bound}")
    measure = scaling_measure(tau, bound, markov)
    if decomposition is None:
        decomposition = exact_decomposition(tau, bound)
    h = pf_fixed_point_exact(markov, measure)
    phi = tuple(h.restrict(part).scale(decomposition.N) for part in decomposition.parts)
    return PFReport(
        decomposition.N,
        measure.s,
        phi,
        tuple(range(decomposition.N)),
        tuple(() for _ in phi),
        tuple(f.min_on_support() for f in phi),
        tuple(0 for _ in phi),
        True,
        Fraction(0),
        exact=True,
    )


# ---------- cycle verification ----------
@dataclass(frozen=True)
class CycleVerdict:
    passed: bool
    checks: dict
    failures: tuple[str, ...] = ()
    distances: tuple[Fraction, ...] = ()

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": dict(self.checks),
            "failures": list(self.failures),
            "distances": [str(d) for d in self.distances],
        }


def pf_verify_cycle(
    tau: PLMap,
    report: PFReport,
    tol: Any = TOLERANCE,
    decomposition: ExactDecomposition | None = None,
    bound: int = ORBIT_BOUND,
) -> CycleVerdict:
    """Check ``P phi_i = phi_{i+1 mod N}`` within ``tol``, one eigenfunction per part and positivity on the supports.

    With ``tol = 0`` the cycle must hold exactly.
    """
    tol = to_fraction(tol)
    if decomposition is None:
        decomposition = exact_decomposition(tau, bound)
    N = decomposition.N
    ctx = TransferContext.of(tau)
    failures = []
    checks = {"count": len(report.phi) == N}
    if not checks["count"]:
        failures.append(f"count: {len(report.phi)} eigenfunctions for {N} parts")
        return CycleVerdict(False, checks, tuple(failures))

    distances = []
    for i, phi in enumerate(report.phi):
        image = transfer_apply(ctx, phi).scale(ONE / report.s)
        gap = step_supnorm(image - report.phi[(i + 1) % N])
        if tol == 0:
            distances.append(Fraction(0) if not gap else _upper(gap))
            ok = not gap
        else:
            distances.append(_upper(gap))
            ok = gap < as_scalar(tol)
        if not ok:
            failures.append(f"cycle: |P phi_{i} - phi_{(i + 1) % N}| = {gap.describe()}")
    checks["cycle"] = not any(f.startswith("cycle") for f in failures)

    supports_ok = True
    positive = True
    for i, phi in enumerate(report.phi):
        support = phi.support()
        if support != decomposition.parts[i]:
            supports_ok = False
            failures.append(f"support: phi_{i} lives on {support.describe()}, part is {decomposition.parts[i].describe()}")
        low = phi.min_on_support()
        if low is None or not low > as_scalar(tol):
            positive = False
            failures.append(f"positivity: phi_{i} has minimum {low.describe() if low is not None else '0'} on its support")
    checks["support"] = supports_ok
    checks["positivity"] = positive
    return CycleVerdict(not failures, checks, tuple(failures), tuple(distances))
