from django.contrib import admin

from .models import AnalysisRun


@admin.register(AnalysisRun)
class AnalysisRunAdmin(admin.ModelAdmin):
    """Admin representation of :class:`~analysis.models.AnalysisRun`."""

    list_display = ("id", "interval_map", "command", "created_at")
    list_filter = ("command", "created_at")
    readonly_fields = ("interval_map", "command", "options", "report", "created_at")
