from django.apps import AppConfig


class MapLibraryConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'map_library'
    verbose_name = 'Interval map library'
