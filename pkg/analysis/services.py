"""Report building for the analysis commands, the JSON API and stored analysis runs."""
from __future__ import annotations

import dataclasses
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

from django.conf import settings

from dynamics import defaults
from dynamics.decomposition import exact_decomposition, exactness_check, mixing_check, transitivity_check
from dynamics.dimension import (
    beta_presentation,
    conjugacy_compare,
    dimension_presentation,
    infinitesimal_exists,
    state_range,
)
from dynamics.exceptions import MapSpecError, UnsupportedMapError
from dynamics.maps import PLMap, build_map, classify
from dynamics.markov import (
    MarkovData,
    detect_markov,
    entropy,
    perron_data,
    scaling_measure,
)
from dynamics.pf import pf_eigenfunctions, pf_exact_report, pf_verify_cycle
from dynamics.scalars import Scalar, to_fraction

from .models import AnalysisRun

logger = logging.getLogger(__name__)

COMMANDS = ("analyze", "entropy", "markov", "dimension", "decompose", "pf", "compare")
ENTROPY_METHODS = ("markov_exact", "power_iteration", "cylinder_count")


# ---------- configuration ----------
def get_option(name: str, override: Any = None) -> Any:
    """An analysis default from ``settings.DYNAMICS``, unless overridden."""
    if override is not None:
        value = override
    else:
        value = getattr(settings, "DYNAMICS", {}).get(name, getattr(defaults, name))
    if name == "TOLERANCE":
        try:
            value = to_fraction(value)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise MapSpecError(f"Invalid tolerance {value!r}", "tol") from e
        if value <= 0:
            raise MapSpecError(f"Tolerance must be positive: {value}", "tol")
        return value
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise MapSpecError(f"{name} must be a positive integer, got {value!r}", name.lower())
    return value


def resolve_options(**overrides) -> dict:
    """All bounds and tolerances for one run; JSON-safe."""
    return {
        "bound": get_option("ORBIT_BOUND", overrides.get("bound")),
        "tol": str(get_option("TOLERANCE", overrides.get("tol"))),
        "maxiter": get_option("MAXITER", overrides.get("maxiter")),
        "depth": get_option("CYLINDER_DEPTH", overrides.get("depth")),
        "transitivity_bound": get_option("TRANSITIVITY_BOUND", overrides.get("transitivity_bound")),
        "cut_cap": get_option("PF_CUT_CAP", overrides.get("cut_cap")),
        "generic": bool(overrides.get("generic", False)),
        "allow_decreasing": bool(overrides.get("allow_decreasing", False)),
        "pf": bool(overrides.get("pf", False)),
    }


def load_map_spec(path: str | Path) -> dict:
    """Read a JSON map specification from disk.

    Raises
    ------
    MapSpecError
        If the file is missing or is not valid JSON.
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as e:
        raise MapSpecError(f"Map file not found: {path}", "map") from e
    except json.JSONDecodeError as e:
        raise MapSpecError(f"Invalid JSON in {path}: line {e.lineno}: {e.msg}", "map") from e


def build_named_map(spec: dict, default_name: str = "") -> PLMap:
    tau = build_map(spec)
    return dataclasses.replace(tau, name=str(spec.get("name") or default_name or spec.get("type")))


# ---------- report sections ----------
def markov_section(tau: PLMap, opts: dict) -> dict:
    markov = detect_markov(tau, opts["bound"])
    out = markov.to_dict()
    if isinstance(markov, MarkovData):
        out["orbits"] = markov.orbits.to_dict()
        if markov.irreducible:
            out["perron"] = perron_data(markov.incidence).to_dict()
    return out


def scaling_section(tau: PLMap, opts: dict) -> dict:
    return scaling_measure(tau, opts["bound"]).to_dict()


def entropy_section(tau: PLMap, opts: dict, methods: tuple[str, ...] = ENTROPY_METHODS) -> list[dict]:
    results = []
    for method in methods:
        try:
            result = entropy(
                tau, method, bound=opts["bound"], tol=Fraction(opts["tol"]), maxiter=opts["maxiter"], n=opts["depth"]
            )
            results.append(result.to_dict())
        except UnsupportedMapError as e:
            results.append({"method": method, "status": "unsupported", "reason": str(e)})
    return results


def decomposition_section(tau: PLMap, opts: dict) -> dict:
    transitivity = transitivity_check(tau, opts["transitivity_bound"])
    out = {"transitivity": transitivity.to_dict()}
    decomposition = exact_decomposition(tau, opts["bound"], opts["transitivity_bound"])
    out["decomposition"] = decomposition.to_dict()
    out["exactness"] = exactness_check(tau, decomposition=decomposition).to_dict()
    out["mixing"] = mixing_check(tau, opts["transitivity_bound"]).to_dict()
    return out


def dimension_section(tau: PLMap, spec: dict, opts: dict) -> dict:
    out = {}
    if spec.get("type") == "beta" and not opts["generic"]:
        beta = beta_presentation(tau.uniform_slope(), opts["bound"])
        out["beta"] = beta.to_dict()
        presentation = beta.presentation
    else:
        presentation = dimension_presentation(tau, opts["bound"], opts["generic"])
    if presentation is None:
        out.update({"status": "undetermined", "bound": opts["bound"]})
        return out
    out["presentation"] = presentation.to_dict()
    out["state_range"] = state_range(presentation, opts["generic"]).to_dict()
    out["infinitesimals"] = infinitesimal_exists(presentation)
    return out


def pf_section(tau: PLMap, opts: dict) -> dict:
    tol = Fraction(opts["tol"])
    measure = scaling_measure(tau, opts["bound"])
    decomposition = exact_decomposition(tau, opts["bound"], opts["transitivity_bound"])
    report = pf_eigenfunctions(tau, tol, opts["maxiter"], measure, decomposition, opts["cut_cap"])
    out = {
        "report": report.to_dict(),
        "cycle": pf_verify_cycle(tau, report, tol, decomposition).to_dict(),
    }
    markov = measure.markov or detect_markov(tau, opts["bound"])
    if isinstance(markov, MarkovData) and markov.irreducible:
        exact = pf_exact_report(tau, opts["bound"], decomposition)
        out["exact"] = exact.to_dict()
        out["exact_cycle"] = pf_verify_cycle(tau, exact, 0, decomposition).to_dict()
    return out


def _guarded(section, *args) -> Any:
    """Run one section of the full pipeline, recording inapplicable analyses instead of failing."""
    try:
        return section(*args)
    except UnsupportedMapError as e:
        logger.warning("%s skipped: %s", section.__name__, e)
        return {"status": "unsupported", "reason": str(e)}


def analyze_report(tau: PLMap, spec: dict, opts: dict) -> dict:
    markov = _guarded(markov_section, tau, opts)
    methods = ("markov_exact", "cylinder_count") if markov.get("markov") else ("power_iteration", "cylinder_count")
    report = {
        "classification": classify(tau).to_dict(),
        "markov": markov,
        "entropy": entropy_section(tau, opts, methods),
        "scaling_measure": _guarded(scaling_section, tau, opts),
        "decomposition": _guarded(decomposition_section, tau, opts),
        "dimension": _guarded(dimension_section, tau, spec, opts),
    }
    if opts["pf"]:
        report["pf"] = _guarded(pf_section, tau, opts)
    return report


def build_report(command: str, spec: dict, spec2: dict | None = None, **overrides) -> dict:
    """The deterministic report of one analysis command.

    Parameters
    ----------
    command: str
        One of ``COMMANDS``.
    spec, spec2: dict
        Map specifications; ``spec2`` only for ``compare``.
    overrides:
        ``bound``, ``tol``, ``maxiter``, ``generic``, ``allow_decreasing`` and the other keys of ``resolve_options``.

    Raises
    ------
    MapSpecError
        For invalid specifications or options.
    UnsupportedMapError
        When the command does not apply to the map.
    """
    if command not in COMMANDS:
        raise ValueError(f"Unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    opts = resolve_options(**overrides)
    tau = build_named_map(spec, "map")
    report: dict[str, Any] = {"command": command, "options": opts, "map": tau.to_literal(), "name": tau.name}
    logger.debug("Building %s report for %s", command, tau.name)
    if command == "analyze":
        report.update(analyze_report(tau, spec, opts))
    elif command == "entropy":
        report["entropy"] = entropy_section(tau, opts)
    elif command == "markov":
        report["classification"] = classify(tau).to_dict()
        report["markov"] = markov_section(tau, opts)
        report["scaling_measure"] = _guarded(scaling_section, tau, opts)
    elif command == "dimension":
        report["dimension"] = dimension_section(tau, spec, opts)
    elif command == "decompose":
        report.update(decomposition_section(tau, opts))
    elif command == "pf":
        report["pf"] = pf_section(tau, opts)
    elif command == "compare":
        if spec2 is None:
            raise MapSpecError("compare needs a second map", "map2")
        tau2 = build_named_map(spec2, "map2")
        report["map2"] = tau2.to_literal()
        report["conjugacy"] = conjugacy_compare(tau, tau2, opts["bound"], opts["allow_decreasing"]).to_dict()
    return report


# ---------- stored runs ----------
def create_analysis_run(interval_map, command: str = "analyze", **overrides) -> AnalysisRun:
    """Run ``command`` on a stored map and keep the report.

    Raises
    ------
    RuntimeError
        If the report cannot be built.
    """
    try:
        report = build_report(command, interval_map.load_spec(), **overrides)
    except (ValueError, UnsupportedMapError) as e:
        raise RuntimeError(f"Failed to analyze {interval_map.name}: {e}") from e
    return AnalysisRun.objects.create(
        interval_map=interval_map, command=command, options=report["options"], report=report
    )


def record_report(spec: dict, report: dict) -> AnalysisRun:
    """Store a report built from a command-line run, creating the map entry by name if needed."""
    from map_library.models import IntervalMap

    interval_map, created = IntervalMap.objects.get_or_create(
        name=report["name"], defaults={"map_type": spec.get("type", "explicit"), "spec": spec}
    )
    if created:
        logger.info("Created map entry %s", interval_map.name)
    return AnalysisRun.objects.create(
        interval_map=interval_map, command=report["command"], options=report["options"], report=report
    )


# ---------- text rendering ----------
def _is_algebraic_literal(value: Any) -> bool:
    return isinstance(value, dict) and "minpoly" in value and "interval" in value


def _is_bracket(value: Any) -> bool:
    return isinstance(value, dict) and set(value) >= {"lower", "upper"} and len(value) <= 3


def render_text(report: Any, indent: int = 0) -> str:
    """Human-readable rendering; algebraic numbers and certified brackets carry "≈"."""
    pad = "  " * indent
    if _is_algebraic_literal(report):
        return Scalar.from_literal(report).describe()
    if _is_bracket(report):
        return f"≈[{report['lower']}, {report['upper']}]"
    if isinstance(report, dict):
        lines = []
        for key in sorted(report):
            value = report[key]
            if isinstance(value, (dict, list)) and not (_is_algebraic_literal(value) or _is_bracket(value)):
                lines.append(f"{pad}{key}:")
                lines.append(render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {render_text(value, 0)}")
        return "\n".join(lines)
    if isinstance(report, list):
        if all(not isinstance(v, (dict, list)) or _is_algebraic_literal(v) for v in report):
            return pad + "[" + ", ".join(render_text(v, 0) for v in report) + "]"
        return "\n".join(f"{pad}-\n{render_text(v, indent + 1)}" for v in report)
    return str(report)
