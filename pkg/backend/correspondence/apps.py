from django.apps import AppConfig


class CorrespondenceConfig(AppConfig):
    name = 'correspondence'
    verbose_name = 'Матрица корреспонденций'
