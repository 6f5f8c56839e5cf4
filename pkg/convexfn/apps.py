from django.apps import AppConfig


class ConvexfnConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'convexfn'
