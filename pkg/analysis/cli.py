"""Programmatic entry point for the analysis commands."""
from __future__ import annotations

import os
import sys
from typing import Sequence

SUBCOMMANDS = ("analyze", "entropy", "markov", "dimension", "decompose", "pf", "compare", "oracle")


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    """Dispatch ``argv`` to a management command and return the exit code (0, 2 or 3)."""
    from django.core.management import call_command
    from django.core.management.base import CommandError

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if not argv or argv[0] not in SUBCOMMANDS:
        stderr.write(f"usage: pmaps {{{','.join(SUBCOMMANDS)}}} --map FILE [options]\n")
        return 2
    try:
        call_command(argv[0], *argv[1:], stdout=stdout)
    except CommandError as e:
        stderr.write(f"{e}\n")
        # argparse failures come back with the default code 1
        return 2 if e.returncode == 1 else e.returncode
    return 0


def main() -> None:
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "pmaps.settings")
    import django

    django.setup()
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
