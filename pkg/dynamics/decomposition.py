"""Transitivity, mixing and exactness checks and the cyclic decomposition into exact pieces.

Every verdict comes from bounded exact interval-set iteration under the
multivalued map. A check that runs out of steps reports ``"undetermined"``
and never guesses.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .defaults import INTERVAL_SET_CAP, MAX_PERIOD, ORBIT_BOUND, SEED_LEVEL, TRANSITIVITY_BOUND
from .exceptions import NotTransitiveError, UnsupportedMapError
from .maps import Interval, IntervalSet, PLMap, classify, hat_image_point, hat_image_set
from .markov import MarkovData, cyclic_classes, detect_markov
from .scalars import Scalar
from .xspace import OrderInterval

logger = logging.getLogger(__name__)


# ---------- seeds ----------
def seed_points(tau: PLMap, level: int = SEED_LEVEL) -> list[Scalar]:
    """Breakpoints together with their first ``level`` multivalued images."""
    points = set(tau.breakpoints)
    frontier = set(tau.breakpoints)
    for _ in range(level):
        frontier = {y for x in frontier for y in hat_image_point(tau, x)} - points
        if not frontier:
            break
        points |= frontier
    return sorted(points)


def seed_intervals(tau: PLMap, level: int = SEED_LEVEL) -> list[IntervalSet]:
    points = seed_points(tau, level)
    return [IntervalSet.of([(a, b)]) for a, b in zip(points, points[1:])]


def _image_power(tau: PLMap, S: IntervalSet, n: int) -> IntervalSet:
    for _ in range(n):
        S = hat_image_set(tau, S)
    return S


# ---------- transitivity ----------
@dataclass(frozen=True)
class TransitivityVerdict:
    """``status`` is ``"transitive"``, ``"not_transitive"`` or ``"undetermined"``.

    ``witness`` is a closed invariant proper subset with nonempty interior when
    the map is not transitive. ``steps`` is the longest covering chain over all seeds.
    """

    status: str
    witness: IntervalSet | None = None
    certificate: str | None = None
    steps: int | None = None
    seeds: int = 0
    bound: int | None = None

    def to_dict(self) -> dict:
        out = {"status": self.status, "seeds": self.seeds}
        if self.witness is not None:
            out["witness"] = self.witness.to_literal()
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.steps is not None:
            out["steps"] = self.steps
        if self.bound is not None:
            out["bound"] = self.bound
        return out


def _cumulative_chain(tau: PLMap, seed: IntervalSet, bound: int, cap: int) -> tuple[str, IntervalSet, int]:
    """Grow ``W <- W | tau(W)`` from the seed; returns ``("full" | "stable" | "open", W, steps)``."""
    W = seed
    for step in range(1, bound + 1):
        grown = W.union(hat_image_set(tau, W))
        if grown.is_full:
            return "full", grown, step
        if grown == W:
            return "stable", W, step
        if len(grown) > cap:
            logger.warning("Interval set grew past %d components after %d steps", cap, step)
            return "open", grown, step
        W = grown
    return "open", W, bound


def transitivity_check(
    tau: PLMap,
    bound: int = TRANSITIVITY_BOUND,
    level: int = SEED_LEVEL,
    cap: int = INTERVAL_SET_CAP,
) -> TransitivityVerdict:
    """Strong transitivity by covering ``[0, 1]`` from every seed gap.

    Parameters
    ----------
    tau: PLMap
    bound: int
        Steps of the cumulative image chain tried per seed.
    level: int
        Orbit depth of the points whose gaps are the seeds.
    cap: int
        Largest number of components an intermediate interval set may have.

    Returns
    -------
    TransitivityVerdict
    """
    if bound < 1:
        raise ValueError(f"Transitivity bound must be positive: {bound}")
    seeds = seed_intervals(tau, level)
    longest = 0
    open_seed = None
    for seed in seeds:
        outcome, W, steps = _cumulative_chain(tau, seed, bound, cap)
        if outcome == "stable":
            logger.debug("Seed %s stabilizes to %s", seed.describe(), W.describe())
            return TransitivityVerdict("not_transitive", witness=W, steps=steps, seeds=len(seeds))
        if outcome == "open":
            open_seed = open_seed or seed
            continue
        longest = max(longest, steps)
    if open_seed is not None:
        logger.warning("Transitivity undetermined: chain from %s open after %d steps", open_seed.describe(), bound)
        return TransitivityVerdict("undetermined", seeds=len(seeds), bound=bound)
    return TransitivityVerdict("transitive", certificate="seed_cover", steps=longest, seeds=len(seeds))


# ---------- mixing ----------
@dataclass(frozen=True)
class MixingVerdict:
    status: str
    witness: tuple[IntervalSet, IntervalSet] | None = None
    bound: int | None = None

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.witness is not None:
            out["witness"] = [part.to_literal() for part in self.witness]
        if self.bound is not None:
            out["bound"] = self.bound
        return out


def _forward_chain(tau: PLMap, seed: IntervalSet, bound: int, cap: int) -> tuple[str, list[IntervalSet]]:
    """Iterate ``F <- tau(F)`` until it covers, repeats or runs out of steps.

    Returns ``("full", [])``, ``("cycle", sets of the eventual cycle)`` or ``("open", [])``.
    """
    seen: dict[IntervalSet, int] = {}
    history: list[IntervalSet] = []
    F = seed
    for _ in range(bound + 1):
        if F.is_full:
            return "full", []
        if F in seen:
            return "cycle", history[seen[F]:]
        if len(F) > cap:
            break
        seen[F] = len(history)
        history.append(F)
        F = hat_image_set(tau, F)
    return "open", []


def mixing_check(
    tau: PLMap,
    bound: int = TRANSITIVITY_BOUND,
    level: int = SEED_LEVEL,
    cap: int = INTERVAL_SET_CAP,
) -> MixingVerdict:
    """Topological mixing over the seed gaps.

    A seed whose forward images reach ``[0, 1]`` meets every open set from then
    on. A seed whose images fall into an exact cycle is mixing with a second
    seed iff every set of the cycle meets it.
    """
    seeds = seed_intervals(tau, level)
    undecided = False
    for seed in seeds:
        outcome, cycle = _forward_chain(tau, seed, bound, cap)
        if outcome == "full":
            continue
        if outcome == "open":
            undecided = True
            continue
        for other in seeds:
            if not all(F.interior_intersects(other) for F in cycle):
                return MixingVerdict("not_mixing", witness=(seed, other))
    if undecided:
        logger.warning("Mixing undetermined after %d steps", bound)
        return MixingVerdict("undetermined", bound=bound)
    return MixingVerdict("mixing")


# ---------- exact decomposition ----------
@dataclass(frozen=True)
class ExactDecomposition:
    """Parts ``K_0, ..., K_{N-1}`` with the map carrying ``K_i`` onto ``K_{i+1 mod N}``.

    Part 0 contains 0.
    """

    N: int
    parts: tuple[IntervalSet, ...]
    certified: bool
    route: str
    checks: dict = field(default_factory=dict, compare=False)

    @property
    def cycle(self) -> tuple[int, ...]:
        return tuple((i + 1) % self.N for i in range(self.N))

    def clopen_parts(self) -> list[list[OrderInterval]]:
        """The clopen sets ``X_i`` of X as unions of order intervals."""
        return [[OrderInterval.between(iv.lo, iv.hi) for iv in part] for part in self.parts]

    def part_of(self, interval: Interval) -> int | None:
        target = IntervalSet.of([interval])
        for i, part in enumerate(self.parts):
            if target.issubset(part):
                return i
        return None

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "parts": [part.to_literal() for part in self.parts],
            "certified": self.certified,
            "route": self.route,
            "cycle": list(self.cycle),
            "checks": dict(self.checks),
        }


def _parts_are_cyclic(tau: PLMap, parts: list[IntervalSet]) -> bool:
    N = len(parts)
    union = IntervalSet()
    for i, part in enumerate(parts):
        if not part:
            return False
        for other in parts[i + 1:]:
            if part.interior_intersects(other):
                return False
        union = union.union(part)
    if not union.is_full:
        return False
    return all(hat_image_set(tau, parts[i]) == parts[(i + 1) % N] for i in range(N))


def _closure_under_power(tau: PLMap, seed: IntervalSet, N: int, bound: int, cap: int) -> IntervalSet | None:
    W = seed
    for _ in range(bound):
        grown = W.union(_image_power(tau, W, N))
        if grown == W:
            return W
        if len(grown) > cap:
            return None
        W = grown
    return None


def _parts_from_seed(tau: PLMap, seed: IntervalSet, N: int, bound: int, cap: int) -> list[IntervalSet] | None:
    """Close the seed under the N-th power and push it around; None unless the images form a cyclic partition."""
    K = _closure_under_power(tau, seed, N, bound, cap)
    if K is None:
        return None
    parts = [K]
    for _ in range(N - 1):
        parts.append(hat_image_set(tau, parts[-1]))
    if not _parts_are_cyclic(tau, parts):
        return None
    shift = next(i for i, part in enumerate(parts) if any(iv.lo == 0 for iv in part))
    return parts[shift:] + parts[:shift]


def _interval_route(
    tau: PLMap, bound: int, level: int, cap: int, max_period: int
) -> tuple[int, list[IntervalSet]]:
    seeds = seed_intervals(tau, level)
    candidates = [seeds[0], seeds[-1], min(seeds, key=lambda S: S.measure)]
    best: tuple[int, list[IntervalSet]] = (1, [IntervalSet.full()])
    tried = []
    for seed in candidates:
        if seed in tried:
            continue
        tried.append(seed)
        for N in range(max_period, best[0], -1):
            parts = _parts_from_seed(tau, seed, N, bound, cap)
            if parts is not None:
                logger.debug("Seed %s yields %d cyclic parts", seed.describe(), N)
                best = (N, parts)
                break
    return best


def _markov_route(markov: MarkovData) -> tuple[int, list[IntervalSet]]:
    N = markov.period
    cells = markov.cells
    parts = [IntervalSet.of(cells[i] for i in cls) for cls in cyclic_classes(markov.incidence, N)]
    return N, parts


def exact_decomposition(
    tau: PLMap,
    bound: int = ORBIT_BOUND,
    transitivity_bound: int = TRANSITIVITY_BOUND,
    level: int = SEED_LEVEL,
    cap: int = INTERVAL_SET_CAP,
    max_period: int = MAX_PERIOD,
) -> ExactDecomposition:
    """The unique cyclic partition into parts on which the N-th power is exact.

    Markov maps read N and the parts off the cyclic classes of the incidence
    matrix. Otherwise the largest N up to ``max_period`` for which a seed's
    closure under the N-th power is carried cyclically around a partition of
    ``[0, 1]`` is taken.

    Raises
    ------
    UnsupportedMapError
        For essentially injective maps.
    NotTransitiveError
        When the map is certified not transitive.
    """
    if classify(tau).essentially_injective:
        raise UnsupportedMapError(
            "Essentially injective map: it need not leave any proper closed subset invariant, so no decomposition exists"
        )
    verdict = transitivity_check(tau, transitivity_bound, level, cap)
    if verdict.status == "not_transitive":
        raise NotTransitiveError(f"Map is not transitive: invariant set {verdict.witness.describe()}")
    markov = detect_markov(tau, bound)
    if isinstance(markov, MarkovData) and markov.irreducible:
        route = "markov"
        N, parts = _markov_route(markov)
    else:
        route = "interval"
        N, parts = _interval_route(tau, transitivity_bound, level, cap, max_period)
    checks = verify_decomposition(tau, parts, transitivity_bound, level, cap)
    certified = verdict.status == "transitive" and all(checks.values())
    if not certified:
        logger.warning("Decomposition with N=%d not certified: %s", N, checks)
    return ExactDecomposition(N, tuple(parts), certified, route, checks)


def verify_decomposition(
    tau: PLMap,
    parts: list[IntervalSet] | tuple[IntervalSet, ...],
    bound: int = TRANSITIVITY_BOUND,
    level: int = SEED_LEVEL,
    cap: int = INTERVAL_SET_CAP,
) -> dict[str, bool]:
    """Check the defining properties of the decomposition exactly.

    ``cover``: the parts cover ``[0, 1]``; ``disjoint``: interiors are pairwise
    disjoint; ``cyclic``: part i is carried onto part i+1 mod N; ``exact``:
    the N-th power carries every seed gap inside a part onto the whole part.
    """
    parts = list(parts)
    N = len(parts)
    union = IntervalSet()
    for part in parts:
        union = union.union(part)
    disjoint = all(
        not parts[i].interior_intersects(parts[j]) for i in range(N) for j in range(i + 1, N)
    )
    cyclic = all(hat_image_set(tau, parts[i]) == parts[(i + 1) % N] for i in range(N))
    checks = {
        "cover": union.is_full,
        "disjoint": disjoint,
        "cyclic": cyclic,
        "exact": cyclic and _power_exact_on_parts(tau, parts, bound, level, cap),
    }
    return checks


def _power_exact_on_parts(tau: PLMap, parts: list[IntervalSet], bound: int, level: int, cap: int) -> bool:
    N = len(parts)
    for seed in seed_intervals(tau, level):
        home = next((part for part in parts if seed.issubset(part)), None)
        if home is None:
            continue
        F = seed
        for _ in range(bound):
            F = _image_power(tau, F, N)
            if F == home or len(F) > cap:
                break
        if F != home:
            logger.debug("Seed %s does not cover its part %s", seed.describe(), home.describe())
            return False
    return True


@dataclass(frozen=True)
class ExactnessVerdict:
    status: str
    N: int | None = None
    decomposition: ExactDecomposition | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.N is not None:
            out["N"] = self.N
        return out


def exactness_check(
    tau: PLMap,
    bound: int = ORBIT_BOUND,
    transitivity_bound: int = TRANSITIVITY_BOUND,
    decomposition: ExactDecomposition | None = None,
) -> ExactnessVerdict:
    """``exact`` for a certified single piece, ``not_exact`` with the number of pieces otherwise."""
    if decomposition is None:
        decomposition = exact_decomposition(tau, bound, transitivity_bound)
    if decomposition.N > 1 and decomposition.checks.get("cyclic"):
        return ExactnessVerdict("not_exact", decomposition.N, decomposition)
    if decomposition.N == 1 and decomposition.certified:
        return ExactnessVerdict("exact", 1, decomposition)
    return ExactnessVerdict("undetermined", decomposition.N, decomposition)
