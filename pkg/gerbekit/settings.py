"""
Django settings for gerbekit project.

Generated by 'django-admin startproject' using Django 5.2.4.

The project has no database and no HTTP surface; Django provides settings,
management commands, logging and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = config('GERBEKIT_SECRET_KEY', default='gerbekit-local-only-no-sessions-are-signed')

DEBUG = config('GERBEKIT_DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Third party apps
    'rest_framework',

    # Local apps
    'gerbes',
]

MIDDLEWARE = []

DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# REST Framework settings (serializers only, used for exchange-format validation)
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}


# Numerical defaults. Each entry may be overridden from the environment.
GERBEKIT = {
    'COCYCLE_TOLERANCE': config('GERBEKIT_COCYCLE_TOLERANCE', default=1e-8, cast=float),
    'COCYCLE_SAMPLES': config('GERBEKIT_COCYCLE_SAMPLES', default=50, cast=int),
    'HOLONOMY_TOLERANCE': config('GERBEKIT_HOLONOMY_TOLERANCE', default=1e-6, cast=float),
    'QUADRATURE_DEGREE': config('GERBEKIT_QUADRATURE_DEGREE', default=2, cast=int),
    'QUADRATURE_REFINE_TOLERANCE': config('GERBEKIT_QUADRATURE_REFINE_TOLERANCE', default=1e-7, cast=float),
    'QUADRATURE_MAX_DEPTH': config('GERBEKIT_QUADRATURE_MAX_DEPTH', default=2, cast=int),
    'FINITE_DIFFERENCE_STEP': config('GERBEKIT_FINITE_DIFFERENCE_STEP', default=1e-3, cast=float),
    'CIRCLE_NODES': config('GERBEKIT_CIRCLE_NODES', default=32, cast=int),
    'CS_GRID': config('GERBEKIT_CS_GRID', default=32, cast=int),
    'CS_CUBIC_COEFFICIENT': config('GERBEKIT_CS_CUBIC_COEFFICIENT', default='2/3'),
    'SEED': config('GERBEKIT_SEED', default=0, cast=int),
    'THREADS': config('GERBEKIT_THREADS', default=1, cast=int),
    'REPORT_TIMINGS': config('GERBEKIT_REPORT_TIMINGS', default=False, cast=bool),
}


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'gerbes': {
            'handlers': ['console'],
            'level': config('GERBEKIT_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        },
    },
}
