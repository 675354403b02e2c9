"""Transfer map L, the Perron-Frobenius operator P = L/s and equivalence in DG."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .defaults import EQUIVALENCE_BOUND, LAURENT_DEGREE
from .maps import Interval, PLMap
from .scalars import ONE, Scalar, as_scalar, solve_linear
from .xspace import OrderInterval, StepFunction, XPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransferContext:
    """Branch domains J_i, their images and the affine inverse branches of a map."""

    map: PLMap
    domains: tuple[OrderInterval, ...]
    images: tuple[Interval, ...]

    @classmethod
    def of(cls, tau: PLMap) -> "TransferContext":
        domains = tuple(OrderInterval.between(b.lo, b.hi) for b in tau.branches)
        images = tuple(b.image for b in tau.branches)
        return cls(tau, domains, images)

    def inverse(self, i: int, y: Any) -> Scalar:
        return self.map.branches[i].inverse(y)


def transfer_apply(ctx: TransferContext, f: StepFunction) -> StepFunction:
    """``(Lf)(x) = sum of f(y) over sigma(y) = x``."""
    pieces = []
    for lo, hi, value in f.pieces():
        if not value:
            continue
        for branch in ctx.map.branches:
            a = max(lo, branch.lo)
            b = min(hi, branch.hi)
            if a < b:
                image = branch.image_of(a, b)
                pieces.append((image.lo, image.hi, value))
    return StepFunction.from_pieces(pieces)


def transfer_power(ctx: TransferContext, f: StepFunction, n: int) -> StepFunction:
    for _ in range(n):
        f = transfer_apply(ctx, f)
    return f


def pf_apply(ctx: TransferContext, f: StepFunction, s: Any) -> StepFunction:
    s = as_scalar(s)
    if not s > 0:
        raise ValueError(f"Scaling factor must be positive: {s.describe()}")
    return transfer_apply(ctx, f).scale(ONE / s)


@dataclass(frozen=True)
class EquivalenceResult:
    verdict: str
    steps: int | None = None
    certificate: str | None = None
    infinitesimal: bool | None = None
    bound: int | None = None

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict}
        if self.verdict == "equal":
            out["n"] = self.steps
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.infinitesimal is not None:
            out["infinitesimal"] = self.infinitesimal
        if self.bound is not None:
            out["bound"] = self.bound
        return out


def _markov_kernel_verdict(markov, h: StepFunction, done: int) -> EquivalenceResult | None:
    vector = markov.vector_of(h)
    if vector is None:
        return None
    A = np.array(markov.incidence, dtype=object)
    v = np.array([int(x.as_fraction()) for x in vector], dtype=object)
    for j in range(1, len(vector) + 1):
        v = v.dot(A)
        if not any(v):
            return EquivalenceResult("equal", done + j, certificate="markov_kernel")
    return EquivalenceResult("distinct", certificate="markov_kernel")


def _laurent_verdict(ctx: TransferContext, h: StepFunction, degree: int) -> EquivalenceResult | None:
    """Write ``h`` as ``p(L) 1``; a nonzero ``p`` is a nonzero class when DG is free on the powers of L."""
    basis = [StepFunction.constant(1)]
    for _ in range(degree):
        basis.append(transfer_apply(ctx, basis[-1]))
    cuts = sorted(set(h.cuts).union(*(set(g.cuts) for g in basis)))
    probes = [as_scalar(0)] + cuts
    rows = [[g.evaluate(XPoint.plus(x)) for g in basis] for x in probes]
    rhs = [h.evaluate(XPoint.plus(x)) for x in probes]
    coefficients = solve_linear(rows, rhs)
    if coefficients is None:
        return None
    if any(coefficients):
        return EquivalenceResult("distinct", certificate="laurent_cyclic", infinitesimal=None)
    return None


def dg_equivalent(
    ctx: TransferContext,
    f: StepFunction,
    g: StepFunction,
    bound: int = EQUIVALENCE_BOUND,
    state: Callable[[StepFunction], Scalar] | None = None,
    markov=None,
    laurent_degree: int | None = LAURENT_DEGREE,
) -> EquivalenceResult:
    """Decide ``L^n f = L^n g`` for some ``n``.

    Parameters
    ----------
    ctx: TransferContext
    f, g: StepFunction
        Integer-valued step functions.
    bound: int
        Number of applications of L tried.
    state: callable, optional
        The unique scaled state; a nonzero value on ``f - g`` certifies ``distinct``.
    markov: MarkovData, optional
        Once ``L^k (f - g)`` lives on the Markov partition, the incidence
        matrix decides the question.
    laurent_degree: int or None
        When the map is cyclic (``cyclic_detect``), DG is free over the Laurent
        polynomials on ``[1]``; try to write ``f - g`` as ``p(L) 1`` with
        ``deg p`` up to this value. None skips the certificate.

    Returns
    -------
    EquivalenceResult
    """
    if not (f.is_integer_valued() and g.is_integer_valued()):
        raise ValueError("Equivalence in DG is defined for integer-valued functions")
    h = f - g
    if h.is_zero():
        return EquivalenceResult("equal", 0)
    state_zero = None
    if state is not None:
        value = state(h)
        if value:
            return EquivalenceResult("distinct", certificate="state", infinitesimal=False)
        state_zero = True
    for k in range(bound + 1):
        if k:
            h = transfer_apply(ctx, h)
            if h.is_zero():
                return EquivalenceResult("equal", k)
        if markov is not None:
            verdict = _markov_kernel_verdict(markov, h, k)
            if verdict is not None:
                return EquivalenceResult(
                    verdict.verdict, verdict.steps, verdict.certificate, state_zero if verdict.verdict == "distinct" else None
                )
    if laurent_degree is not None:
        from .dimension import cyclic_detect

        if not cyclic_detect(ctx.map, bound):
            logger.info("Laurent certificate skipped: DG is not known to be cyclic and free")
        else:
            verdict = _laurent_verdict(ctx, f - g, laurent_degree)
            if verdict is not None:
                return EquivalenceResult("distinct", certificate=verdict.certificate, infinitesimal=state_zero)
    logger.warning("DG equivalence undetermined after %d applications of L", bound)
    return EquivalenceResult("undetermined", bound=bound, infinitesimal=state_zero)
