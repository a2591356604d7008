from django.apps import AppConfig


class LpInterfaceConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'lp_interface'
    verbose_name = 'Linear programs'
