from django.db import models

from map_library.models import IntervalMap


class AnalysisRun(models.Model):
    """A stored report produced by one of the analysis commands."""

    interval_map = models.ForeignKey(
        IntervalMap, on_delete=models.CASCADE, related_name="analysis_runs"
    )
    command = models.CharField(max_length=32, default="analyze", help_text="Command that produced the report")
    options = models.JSONField(default=dict, blank=True, help_text="Bounds and tolerances used")
    report = models.JSONField(default=dict, blank=True, help_text="Deterministic JSON report")
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = "Analysis run"
        verbose_name_plural = "Analysis runs"
        ordering = ['-created_at']

    def __str__(self) -> str:
        return f"{self.command} of {self.interval_map.name}"
