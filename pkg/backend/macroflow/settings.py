from pathlib import Path

from decouple import Csv, config

DEBUG = config('DEBUG', default=False, cast=bool)

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='string_from_.env')

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost', cast=Csv())

INSTALLED_APPS = [
    'rest_framework',
    'correspondence.apps.CorrespondenceConfig',
    'kinetics.apps.KineticsConfig',
    'routes.apps.RoutesConfig',
    'survey.apps.SurveyConfig',
    'runs.apps.RunsConfig',
]

# Расчёты не хранят состояния между запусками.
DATABASES = {}

LANGUAGE_CODE = 'ru'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

MACROFLOW_OUTPUT_DIR = Path(
    config('MACROFLOW_OUTPUT_DIR', default=str(BASE_DIR / 'runs_output'))
)

MACROFLOW_LOG_LEVEL = config(
    'MACROFLOW_LOG_LEVEL', default='DEBUG' if DEBUG else 'INFO'
)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        app: {
            'level': MACROFLOW_LOG_LEVEL,
            'handlers': ['console', ],
            'propagate': False,
        }
        for app in ('correspondence', 'kinetics', 'routes', 'survey', 'runs')
    },
}
