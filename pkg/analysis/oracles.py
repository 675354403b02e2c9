"""Brute-force checks used to derive and cross-check reported values."""
from __future__ import annotations

import itertools
import logging
from typing import Iterator

import numpy as np

from dynamics.defaults import CYLINDER_DEPTH, ORBIT_BOUND
from dynamics.dimension import GAElement, MarkovLimit, ga_positive
from dynamics.exceptions import NotTransitiveError, UnsupportedMapError
from dynamics.maps import PLMap
from dynamics.markov import (
    NotMarkovWithinBound,
    cylinder_counts,
    detect_markov,
    entropy_cylinder_count,
    perron_data,
    primitivity_period,
    scaling_measure,
)
from dynamics.pf import pf_fixed_point_exact
from dynamics.scalars import ONE, ZERO, solve_linear
from dynamics.transfer import TransferContext, pf_apply, transfer_apply
from dynamics.xspace import StepFunction

logger = logging.getLogger(__name__)

WITNESS_DEPTH = 12


# ---------- inductive-limit equality ----------
def zero_one_matrices(q: int, max_entries: int | None = None) -> Iterator[np.ndarray]:
    """Irreducible q x q zero-one matrices, optionally with at most ``max_entries`` ones."""
    for bits in itertools.product((0, 1), repeat=q * q):
        if max_entries is not None and sum(bits) > max_entries:
            continue
        rows = [list(bits[i * q:(i + 1) * q]) for i in range(q)]
        try:
            primitivity_period(rows)
        except NotTransitiveError:
            continue
        yield np.array(rows, dtype=object)


def _images(A: np.ndarray, vectors: list[tuple[int, ...]], depth: int) -> dict[tuple[int, ...], list[tuple]]:
    """``v A^k`` for k = 0 .. depth."""
    images = {}
    for v in vectors:
        w = np.array(v, dtype=object)
        row = [tuple(w)]
        for _ in range(depth):
            w = w.dot(A)
            row.append(tuple(w))
        images[v] = row
    return images


def _witnessed_sign(row: list[tuple]) -> str | None:
    """Sign shown by the first ``v A^k`` in ``row`` that is zero or of one sign."""
    for w in row:
        if not any(w):
            return "zero"
        if all(c >= 0 for c in w):
            return "positive"
        if all(c <= 0 for c in w):
            return "negative"
    return None


def _presentation(A: np.ndarray) -> MarkovLimit:
    rows = tuple(tuple(int(a) for a in row) for row in A.tolist())
    perron = perron_data(rows)
    return MarkovLimit(rows, perron.right, perron.s)


def ga_search(max_q: int = 2, max_entries: int | None = None, depth: int = WITNESS_DEPTH) -> dict:
    """Compare the ``k = q`` rules for equality and order with a search for witnesses ``k <= depth``.

    Every pair ``[v, 0]``, ``[w, 1]`` with entries of v and w in {-1, 0, 1} is tested:
    they are equal iff ``v A^(1+k) = w A^k`` for some k. The rule uses only ``k = q``.
    Every ``[v, 0]`` is also ordered by ``ga_positive`` and checked against the
    first ``v A^k`` that is zero or of one sign. A sign the search does not reach
    within ``depth`` is counted as unwitnessed, not as a mismatch.

    Parameters
    ----------
    max_q: int
        Largest matrix size; every size from 1 up is enumerated.
    max_entries: int
        Skip matrices with more ones than this.
    depth: int
        Largest witness exponent tried by the search.
    """
    if max_q < 1 or max_q > 3:
        raise ValueError(f"Matrix size must be between 1 and 3: {max_q}")
    matrices = pairs = equal = 0
    mismatches, sign_mismatches = [], []
    signs = {"positive": 0, "negative": 0, "zero": 0, "incomparable": 0, "undetermined": 0}
    unwitnessed = 0
    for q in range(1, max_q + 1):
        vectors = list(itertools.product((-1, 0, 1), repeat=q))
        for A in zero_one_matrices(q, max_entries):
            matrices += 1
            images = _images(A, vectors, depth + 1)
            for v, w in itertools.product(vectors, repeat=2):
                pairs += 1
                searched = any(images[v][k + 1] == images[w][k] for k in range(depth + 1))
                ruled = images[v][q + 1] == images[w][q]
                equal += searched
                if searched != ruled:
                    mismatches.append({"A": A.tolist(), "v": list(v), "w": list(w)})
            T = _presentation(A)
            for v in vectors:
                claimed = ga_positive(T, GAElement(v))
                signs[claimed] += 1
                witnessed = _witnessed_sign(images[v][:depth + 1])
                if witnessed is None:
                    unwitnessed += claimed in ("positive", "negative")
                elif witnessed != claimed:
                    sign_mismatches.append({"A": A.tolist(), "v": list(v), "claimed": claimed, "witnessed": witnessed})
    logger.info(
        "ga-search: %d matrices, %d pairs, %d mismatches, %d sign mismatches",
        matrices, pairs, len(mismatches), len(sign_mismatches),
    )
    return {
        "oracle": "ga-search",
        "max_q": max_q,
        "max_entries": max_entries,
        "depth": depth,
        "matrices": matrices,
        "pairs": pairs,
        "equal_pairs": equal,
        "mismatches": mismatches,
        "signs": signs,
        "sign_mismatches": sign_mismatches,
        "sign_unwitnessed": unwitnessed,
        "agrees": not mismatches and not sign_mismatches,
    }


# ---------- Perron-Frobenius fixed point ----------
def pf_solve(tau: PLMap, bound: int = ORBIT_BOUND) -> dict:
    """Solve ``P h = h`` with ``mu(h) = 1`` on the cell indicators and compare with the Perron vector.

    The transfer matrix here is built by applying the operator to each cell
    indicator, not read off the incidence matrix.

    Raises
    ------
    UnsupportedMapError
        When the map has no Markov partition within ``bound`` or is not transitive.
    """
    markov = detect_markov(tau, bound)
    if isinstance(markov, NotMarkovWithinBound):
        raise UnsupportedMapError(f"pf-solve needs a Markov partition within bound {bound}")
    measure = scaling_measure(tau, bound, markov)
    ctx = TransferContext.of(tau)
    q = markov.size
    columns, incidence_agrees = [], True
    for j, cell in enumerate(markov.cells):
        chi = StepFunction.indicator(cell.lo, cell.hi)
        image = markov.vector_of(transfer_apply(ctx, chi))
        if image is None or [int(x.as_fraction()) for x in image] != list(markov.incidence[j]):
            incidence_agrees = False
        columns.append(markov.vector_of(pf_apply(ctx, chi, measure.s)))
    masses = [measure.weights.measure(cell.lo, cell.hi) for cell in markov.cells]
    rows = [[columns[j][k] - (ONE if j == k else ZERO) for j in range(q)] for k in range(q)]
    solution = solve_linear(rows + [masses], [ZERO] * q + [ONE])
    expected = markov.vector_of(pf_fixed_point_exact(markov, measure))
    return {
        "oracle": "pf-solve",
        "s": measure.s.to_literal(),
        "partition": [p.to_literal() for p in markov.points],
        "incidence_agrees": incidence_agrees,
        "solution": [v.to_literal() for v in solution] if solution is not None else None,
        "perron_vector": [v.to_literal() for v in expected],
        "agrees": solution is not None and list(solution) == list(expected),
    }


# ---------- lap counts ----------
def cylinders(tau: PLMap, depth: int = CYLINDER_DEPTH) -> dict:
    """Exact ``c_n`` table and the entropy bracket it certifies."""
    counts = cylinder_counts(tau, depth)
    result = entropy_cylinder_count(tau, depth) if depth >= 2 else None
    return {
        "oracle": "cylinders",
        "depth": depth,
        "counts": counts,
        "entropy": result.to_dict() if result is not None else None,
    }
