from django.apps import AppConfig


class SetcoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'setcore'
