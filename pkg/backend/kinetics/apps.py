from django.apps import AppConfig


class KineticsConfig(AppConfig):
    name = 'kinetics'
    verbose_name = 'Кинетика обменов'
