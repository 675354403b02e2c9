from django.urls import path
from . import views

app_name = 'map_library'

urlpatterns = [
    path('api/maps/', views.get_map_library, name='get_map_library'),
    path('api/analyze/', views.analyze_map, name='analyze_map'),
]
