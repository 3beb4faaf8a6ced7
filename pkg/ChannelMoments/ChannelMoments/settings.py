import os

from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Nothing is served or signed; the key only satisfies Django's startup checks.
SECRET_KEY = os.environ.get('SECRET_KEY', 'channel-moments-local')

DEBUG = os.getenv('DJANGO_DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


INSTALLED_APPS = [
    'rest_framework',

    'tensor_core',
    'channel_management',
    'haar_integration',
    'theorem_verification',
    'report_management',
]


# No models are persisted; every domain type is an in-memory value.
DATABASES = {}


REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': (
        'rest_framework.renderers.JSONRenderer',
    ),
    'DEFAULT_PARSER_CLASSES': (
        'rest_framework.parsers.JSONParser',
    ),
    # reject NaN/Inf on output
    'STRICT_JSON': True,
}


CHANNEL_MOMENTS = {
    # caps the Monte Carlo worker pool
    'THREADS': int(os.getenv('CHANNEL_MOMENTS_THREADS', os.cpu_count() or 1)),
    'DEFAULT_SAMPLES': int(os.getenv('CHANNEL_MOMENTS_SAMPLES', 200000)),
    'DEFAULT_SEED': int(os.getenv('CHANNEL_MOMENTS_SEED', 0)),
    'EXACT_TOLERANCE': float(os.getenv('CHANNEL_MOMENTS_TOL', 1e-10)),
    'BOUND_TOLERANCE': float(os.getenv('CHANNEL_MOMENTS_BOUND_TOL', 1e-8)),
    'SIGMA': float(os.getenv('CHANNEL_MOMENTS_SIGMA', 5.0)),
    # complex entries held by Monte Carlo chunks in flight (about 64 MiB); never changes results
    'CHUNK_ELEMENTS': int(os.getenv('CHANNEL_MOMENTS_CHUNK_ELEMENTS', 2 ** 22)),
}


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.getenv('CHANNEL_MOMENTS_LOG_LEVEL', 'WARNING'),
    },
}


# Internationalization
# https://docs.djangoproject.com/en/5.0/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True
