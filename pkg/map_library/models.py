import json
import uuid

from django.db import models

from dynamics.maps import MAP_TYPES


class IntervalMap(models.Model):
    """A stored piecewise monotonic map and the properties derived from it."""

    MAP_TYPE_CHOICES = [
        ('tent', 'Tent map'),
        ('beta', 'Beta transformation'),
        ('uniform_pl', 'Uniformly piecewise linear'),
        ('explicit', 'Explicit branches'),
    ]

    # Primary identifier
    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)

    # Basic information
    name = models.CharField(max_length=200, help_text="Name of the map")
    map_type = models.CharField(
        max_length=20,
        choices=MAP_TYPE_CHOICES,
        default='explicit',
        help_text="Kind of map specification",
    )
    spec = models.JSONField(
        null=True,
        blank=True,
        help_text="Map specification document (numbers as exact string literals)",
    )
    source_spec = models.FileField(
        upload_to="maps/specs/",
        null=True,
        blank=True,
        help_text="Uploaded JSON map specification",
    )

    # Derived properties (read-only, computed from the map)
    branch_count = models.PositiveIntegerField(null=True, blank=True, help_text="Number of laps")
    is_continuous = models.BooleanField(null=True, blank=True, help_text="Whether the branches join up")
    is_surjective = models.BooleanField(null=True, blank=True, help_text="Whether the branch images cover [0, 1]")
    is_markov = models.BooleanField(null=True, blank=True, help_text="Whether the critical orbits close within the bound")
    slope_factor = models.JSONField(null=True, blank=True, help_text="Exact scaling factor s")
    entropy_lower = models.CharField(max_length=64, blank=True, default='', help_text="Lower bracket of log s")
    entropy_upper = models.CharField(max_length=64, blank=True, default='', help_text="Upper bracket of log s")
    period_n = models.PositiveIntegerField(null=True, blank=True, help_text="Number of exact pieces N")
    has_infinitesimals = models.BooleanField(null=True, blank=True, help_text="Whether DG has nonzero infinitesimals")

    # Timestamps
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        verbose_name = "Interval map"
        verbose_name_plural = "Interval maps"
        ordering = ['name']

    def __str__(self):
        return self.name

    @property
    def is_processed(self):
        """Check if the derived properties have been computed."""
        return self.branch_count is not None

    def load_spec(self) -> dict:
        """The map specification, read from the uploaded file when the field is empty."""
        if self.spec:
            return self.spec
        if self.source_spec:
            self.source_spec.open('rb')
            try:
                return json.loads(self.source_spec.read().decode('utf-8'))
            finally:
                self.source_spec.close()
        raise ValueError(f"Map {self.name} has neither a spec nor an uploaded spec file")

    def get_entropy_display(self):
        if self.entropy_lower and self.entropy_upper:
            return f"[{self.entropy_lower}, {self.entropy_upper}]"
        return "Not computed"

    def clean(self):
        from django.core.exceptions import ValidationError

        if self.map_type not in MAP_TYPES:
            raise ValidationError({'map_type': f"Unknown map type {self.map_type}"})
