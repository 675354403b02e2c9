"""Exact invariants of piecewise monotonic interval maps.

The package is plain Python and does not import Django; the ``analysis``
app reads its defaults from ``settings.DYNAMICS`` and passes them in.
"""
