import logging

from django.contrib import admin

from .models import IntervalMap

logger = logging.getLogger(__name__)


@admin.register(IntervalMap)
class IntervalMapAdmin(admin.ModelAdmin):
    """Admin interface for IntervalMap model."""

    list_display = [
        'name',
        'map_type',
        'is_processed',
        'branch_count',
        'is_markov',
        'get_entropy_display',
        'period_n',
        'created_at',
    ]

    list_filter = [
        'map_type',
        'is_markov',
        'is_continuous',
        'has_infinitesimals',
        'created_at',
    ]

    search_fields = ['name']

    readonly_fields = [
        'id',
        'branch_count',
        'is_continuous',
        'is_surjective',
        'is_markov',
        'slope_factor',
        'entropy_lower',
        'entropy_upper',
        'period_n',
        'has_infinitesimals',
        'is_processed',
        'created_at',
        'updated_at',
    ]

    fieldsets = (
        ('Basic Information', {
            'fields': ('id', 'name', 'map_type')
        }),
        ('Specification', {
            'fields': ('spec', 'source_spec'),
            'description': 'Either a JSON document or an uploaded JSON file'
        }),
        ('Derived Properties (Read-only)', {
            'fields': (
                'is_processed', 'branch_count', 'is_continuous', 'is_surjective', 'is_markov',
                'slope_factor', 'entropy_lower', 'entropy_upper', 'period_n', 'has_infinitesimals',
            ),
            'classes': ('collapse',)
        }),
        ('Timestamps', {
            'fields': ('created_at', 'updated_at'),
            'classes': ('collapse',)
        })
    )

    actions = ['regenerate_derived_properties', 'generate_analysis_report']

    def is_processed(self, obj):
        return obj.is_processed
    is_processed.boolean = True
    is_processed.short_description = "Processed"

    def get_entropy_display(self, obj):
        return obj.get_entropy_display()
    get_entropy_display.short_description = "Entropy"

    def regenerate_derived_properties(self, request, queryset):
        """Admin action to regenerate derived properties."""
        from .services import process_interval_map

        count = 0
        for interval_map in queryset:
            try:
                process_interval_map(interval_map)
                count += 1
            except RuntimeError as e:
                self.message_user(request, f"Error processing {interval_map.name}: {e}", level='ERROR')

        self.message_user(request, f"Successfully regenerated properties for {count} map(s).")

    def generate_analysis_report(self, request, queryset):
        """Store a full analysis run for exactly one selected map."""
        from analysis.services import create_analysis_run

        if queryset.count() != 1:
            self.message_user(request, "Select exactly one map to analyze.", level='ERROR')
            return
        interval_map = queryset.first()
        try:
            run = create_analysis_run(interval_map)
        except RuntimeError as e:
            self.message_user(request, str(e), level='ERROR')
            return
        self.message_user(request, f"Analysis run {run.pk} stored for {interval_map.name}.", level='SUCCESS')

    regenerate_derived_properties.short_description = "Regenerate derived properties"
    generate_analysis_report.short_description = "Generate analysis report"

    def save_model(self, request, obj, form, change):
        """Process the map on first save."""
        is_new = obj._state.adding
        super().save_model(request, obj, form, change)

        if is_new and (obj.spec or obj.source_spec):
            from .services import process_interval_map

            try:
                process_interval_map(obj)
                self.message_user(request, f"Map '{obj.name}' stored and processed successfully!", level='SUCCESS')
            except RuntimeError as e:
                logger.exception("Error processing map %s", obj.name)
                self.message_user(request, f"Error processing map '{obj.name}': {e}", level='ERROR')
