from decouple import config
from pathlib import Path
from django.utils.translation import gettext_lazy as _

BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
# El simulador no expone servicios HTTP, pero Django exige una clave.
SECRET_KEY = config(
    'SECRET_KEY',
    default='django-insecure-remote-entanglement-simulator-dev-key',
)

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'networks',
]

# Sin base de datos: todos los estados se calculan en memoria
DATABASES = {}

LANGUAGE_CODE = 'es'

TIME_ZONE = 'America/Bogota'

USE_I18N = True

USE_TZ = True

LANGUAGES = [
    ('es', _('Spanish')),
    ('en', _('English')),
]

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ============================================================================
# DJANGO REST FRAMEWORK (solo serializers + JSONRenderer para la salida CLI)
# ============================================================================

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': (
        'rest_framework.renderers.JSONRenderer',
    ),
    # Los símbolos ↓ ↑ Ψ Φ se emiten tal cual en UTF-8
    'UNICODE_JSON': True,
    'COMPACT_JSON': True,
}

# ============================================================================
# CONFIGURACIÓN DEL SIMULADOR (HU1: protocolos de entrelazamiento remoto)
# ============================================================================

ENTANGLEMENT = {
    # Cota de dimensión para el permanente (Ryser es O(2^n · n))
    'PERMANENT_MAX_DIM': config('PERMANENT_MAX_DIM', default=20, cast=int),
    # Semilla por defecto del modo sample
    'DEFAULT_SEED': config('ENTANGLEMENT_DEFAULT_SEED', default=2024, cast=int),
    # Oráculo de sumas de permutaciones en verify_oracles
    'VERIFY_RANDOM_MATRICES': config('VERIFY_RANDOM_MATRICES', default=200, cast=int),
    'VERIFY_MAX_RANDOM_DIM': config('VERIFY_MAX_RANDOM_DIM', default=6, cast=int),
    # Workers de joblib para los puntos del barrido (1 = secuencial)
    'SWEEP_N_JOBS': config('SWEEP_N_JOBS', default=1, cast=int),
}

# Configuración de logging: stdout queda libre para la salida JSON/CSV
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {asctime} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose' if DEBUG else 'simple',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'networks': {
            'handlers': ['console'],
            'level': 'DEBUG' if DEBUG else config('NETWORKS_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        },
    },
}
