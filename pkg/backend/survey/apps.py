from django.apps import AppConfig


class SurveyConfig(AppConfig):
    name = 'survey'
    verbose_name = 'Опросы и оценка гравитационной модели'
