"""
Django settings for the energylab workbench.

The project is driven from the command line (``python manage.py energylab``);
there are no HTTP views. Every knob below can be overridden from the
environment or from a ``.env`` file in the project root.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / ".env")


SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "energylab-local-key")

DEBUG = os.getenv("DJANGO_DEBUG", "False") == "True"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',

    "rest_framework",

    "numeric",
    "setcore",
    "energy",
    "convexfn",
    "regularize",
    "incidence",
    "claims",
    "generators",
    "workbench",
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv("ENERGYLAB_DB_PATH", str(BASE_DIR / 'db.sqlite3')),
    }
}


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging

ENERGYLAB_LOG_LEVEL = os.getenv("ENERGYLAB_LOG_LEVEL", "INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {"format": "{asctime} {levelname} {name}: {message}", "style": "{"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "verbose"},
    },
    "loggers": {
        app: {"handlers": ["console"], "level": ENERGYLAB_LOG_LEVEL, "propagate": False}
        for app in (
            "numeric",
            "setcore",
            "energy",
            "convexfn",
            "regularize",
            "incidence",
            "claims",
            "generators",
            "workbench",
        )
    },
}


# Workbench

ENERGYLAB_TOLERANCE = float(os.getenv("ENERGYLAB_TOLERANCE", "1e-9"))
ENERGYLAB_THREADS = max(1, int(os.getenv("ENERGYLAB_THREADS", "1")))
ENERGYLAB_DEFAULT_SEED = int(os.getenv("ENERGYLAB_DEFAULT_SEED", "0x5EED"), 0)
ENERGYLAB_ORACLE_LIMIT = int(os.getenv("ENERGYLAB_ORACLE_LIMIT", "12"))
ENERGYLAB_MAX_PRECISION = int(os.getenv("ENERGYLAB_MAX_PRECISION", "4096"))
