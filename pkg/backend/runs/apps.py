"""Пакет запусков из командной строки.
"""
from django.apps import AppConfig


class RunsConfig(AppConfig):
    name = 'runs'
    verbose_name = 'Воспроизводимые запуски'
