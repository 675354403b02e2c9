"""Processing pipeline for stored interval maps."""
from __future__ import annotations

import logging

from analysis.services import get_option
from dynamics.decomposition import exact_decomposition
from dynamics.dimension import dimension_presentation, infinitesimal_exists
from dynamics.exceptions import UnsupportedMapError
from dynamics.maps import build_map, classify
from dynamics.markov import MarkovData, detect_markov, entropy, log_bracket

from .models import IntervalMap

logger = logging.getLogger(__name__)


def process_interval_map(interval_map: IntervalMap) -> None:
    """Compute and store the derived properties of a map.

    Parameters
    ----------
    interval_map: IntervalMap
        The map to process; its specification is read from ``spec`` or the uploaded file.

    Raises
    ------
    RuntimeError
        If the specification is invalid or the map cannot be analyzed.
    """
    try:
        spec = interval_map.load_spec()
        tau = build_map(spec)
        bound = get_option("ORBIT_BOUND")

        classification = classify(tau)
        interval_map.map_type = spec.get("type", interval_map.map_type)
        interval_map.spec = spec
        interval_map.branch_count = tau.n
        interval_map.is_continuous = classification.continuous
        interval_map.is_surjective = classification.surjective_hat

        markov = detect_markov(tau, bound)
        interval_map.is_markov = isinstance(markov, MarkovData)
        method = "markov_exact" if interval_map.is_markov and markov.irreducible else "power_iteration"
        result = entropy(tau, method, bound=bound, tol=get_option("TOLERANCE"), maxiter=get_option("MAXITER"))
        interval_map.slope_factor = result.s.to_literal() if result.s is not None else None
        if result.lower > 0:
            interval_map.entropy_lower, interval_map.entropy_upper = log_bracket(result.lower, result.upper)

        try:
            decomposition = exact_decomposition(tau, bound, get_option("TRANSITIVITY_BOUND"))
            interval_map.period_n = decomposition.N
            presentation = dimension_presentation(tau, bound, decomposition=decomposition)
            interval_map.has_infinitesimals = (
                infinitesimal_exists(presentation) if presentation is not None else None
            )
        except UnsupportedMapError as e:
            logger.info("No decomposition for %s: %s", interval_map.name, e)
            interval_map.period_n = None
            interval_map.has_infinitesimals = None

        interval_map.save()
        logger.info("Processed map %s (%d laps, markov=%s)", interval_map.name, tau.n, interval_map.is_markov)
    except Exception as e:
        logger.error("Error processing map %s: %s", interval_map.name, e)
        raise RuntimeError(f"Failed to process map {interval_map.name}: {e}")
