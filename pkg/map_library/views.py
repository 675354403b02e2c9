import json
import logging

from django.http import JsonResponse
from django.views.decorators.csrf import csrf_exempt
from django.views.decorators.http import require_GET, require_POST

from analysis.services import COMMANDS, build_report
from dynamics.exceptions import MapSpecError, UnsupportedMapError

from .models import IntervalMap

logger = logging.getLogger(__name__)

OPTION_KEYS = ("bound", "tol", "maxiter", "depth", "transitivity_bound", "cut_cap", "generic", "allow_decreasing", "pf")


@require_GET
def get_map_library(request):
    """API endpoint listing stored maps and their derived properties."""
    try:
        map_type = request.GET.get('map_type', '')

        maps = IntervalMap.objects.all()
        if map_type:
            maps = maps.filter(map_type=map_type)

        maps_data = []
        for interval_map in maps:
            maps_data.append({
                'id': str(interval_map.id),
                'name': interval_map.name,
                'map_type': interval_map.map_type,
                'branch_count': interval_map.branch_count,
                'is_markov': interval_map.is_markov,
                'slope_factor': interval_map.slope_factor,
                'entropy': interval_map.get_entropy_display(),
                'period_n': interval_map.period_n,
                'has_infinitesimals': interval_map.has_infinitesimals,
            })

        return JsonResponse({'maps': maps_data, 'success': True})

    except Exception as e:
        logger.exception("Map library listing failed")
        return JsonResponse({'error': str(e)}, status=500)


@csrf_exempt
@require_POST
def analyze_map(request):
    """Run one analysis command on a posted map specification.

    Body: ``{"command": "analyze", "map": {...}, "map2": {...}, "options": {...}}``.
    """
    try:
        payload = json.loads(request.body or b'{}')
    except json.JSONDecodeError as e:
        return JsonResponse({'error': f'Invalid JSON: {e}', 'field': 'body'}, status=400)

    command = payload.get('command', 'analyze')
    if command not in COMMANDS:
        return JsonResponse({'error': f'Unknown command {command!r}', 'field': 'command'}, status=400)
    spec = payload.get('map')
    if not isinstance(spec, dict):
        return JsonResponse({'error': 'A map specification object is required', 'field': 'map'}, status=400)
    options = payload.get('options') or {}
    overrides = {key: options[key] for key in OPTION_KEYS if key in options}

    try:
        report = build_report(command, spec, payload.get('map2'), **overrides)
    except MapSpecError as e:
        return JsonResponse({'error': str(e), 'field': e.field}, status=400)
    except UnsupportedMapError as e:
        return JsonResponse({'error': str(e)}, status=422)
    except ValueError as e:
        return JsonResponse({'error': str(e), 'field': None}, status=400)
    except Exception as e:
        logger.exception("Analysis failed")
        return JsonResponse({'error': str(e)}, status=500)

    return JsonResponse({'report': report, 'success': True})
