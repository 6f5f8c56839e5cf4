from django.apps import AppConfig


class IncidenceConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'incidence'
