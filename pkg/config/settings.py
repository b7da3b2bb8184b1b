"""
Django settings for the clocksync project.

The project hosts the resilient network clock synchronization toolkit: the
``synchronization`` app provides the services and the management commands
(bound, min_graph, sync, simulate, tier, gen). There is no web surface.

For more information on this file, see
https://docs.djangoproject.com/en/5.0/topics/settings/
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals; commands never sign anything.
SECRET_KEY = config('SECRET_KEY', default='clocksync-local-development-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Local apps
    "synchronization",
]

MIDDLEWARE = []


# Database
# https://docs.djangoproject.com/en/5.0/ref/settings/#databases
# Nothing is persisted; the default only keeps Django's checks satisfied.

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.0/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Logging

NCS_LOG_LEVEL = config('NCS_LOG_LEVEL', default='WARNING')

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {name} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "synchronization": {
            "handlers": ["console"],
            "level": NCS_LOG_LEVEL,
            "propagate": False,
        },
    },
}


# Clock Synchronization Settings

# Worker processes for simulation campaigns (0 = one per CPU core)
NCS_THREADS = config('NCS_THREADS', default=0, cast=int)

# Residual threshold eta for noisy-mode detection
NCS_DEFAULT_ETA = config('NCS_DEFAULT_ETA', default=2.0, cast=float)

# Noise model defaults: Gaussian sigma, fault magnitude range, true offset range
NCS_DEFAULT_SIGMA = config('NCS_DEFAULT_SIGMA', default=1.0, cast=float)
NCS_FAULT_MIN = config('NCS_FAULT_MIN', default=2.0, cast=float)
NCS_FAULT_MAX = config('NCS_FAULT_MAX', default=8.0, cast=float)
NCS_OFFSET_RANGE = config('NCS_OFFSET_RANGE', default=10.0, cast=float)

# Minimum-graph search
NCS_MIN_GRAPH_LIMIT = config('NCS_MIN_GRAPH_LIMIT', default=16, cast=int)
NCS_MIN_GRAPH_MAX_NODES = config('NCS_MIN_GRAPH_MAX_NODES', default=9, cast=int)

# Resilience sweeps: exhaustive placements up to the cap, sampled beyond
NCS_SWEEP_EXHAUSTIVE_CAP = config('NCS_SWEEP_EXHAUSTIVE_CAP', default=2000, cast=int)
NCS_SWEEP_SAMPLE_SIZE = config('NCS_SWEEP_SAMPLE_SIZE', default=200, cast=int)
