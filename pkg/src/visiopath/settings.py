"""
Настройки проекта VisioPath
Планировщик траекторий (DDP + событийный MPC) и микросимулятор движения
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# ============================= БАЗОВЫЕ НАСТРОЙКИ =============================

# Базовый директория проекта (корневая папка проекта)
BASE_DIR = Path(__file__).resolve().parent.parent

# Загрузка переменных окружения из файла .env
ENV_PATH = BASE_DIR / '.env'
load_dotenv(dotenv_path=ENV_PATH)

# Секретный ключ (веб-интерфейса нет, ключ нужен только самому Django)
SECRET_KEY = os.environ.get('SECRET_KEY', 'visiopath-local-only')

# Режим отладки
DEBUG = os.environ.get('DEBUG', '').lower() in ['true', '1', 'yes']

ALLOWED_HOSTS = []


# ============================== ПРИЛОЖЕНИЯ ===================================

# Кастомные приложения проекта
LOCAL_APPS = [
    'common',
    'planner',
    'perception',
    'traffic',
    'harness',
]

INSTALLED_APPS = LOCAL_APPS


# =============================== БАЗА ДАННЫХ =================================

# Моделей нет; sqlite оставлен только для служебных команд Django
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / os.environ.get('DATABASE_NAME', 'db.sqlite3'),
    }
}


# =========================== ИНТЕРНАЦИОНАЛИЗАЦИЯ =============================

LANGUAGE_CODE = 'ru'
TIME_ZONE = 'Europe/Moscow'
USE_I18N = True
USE_TZ = True


# ============================ МОДЕЛЬ ДВИЖЕНИЯ ================================

# Все значения по умолчанию продублированы в dataclass-конфигурациях
# (метод from_settings() читает переопределения из этого словаря)
VISIOPATH = {
    # Параметры эго-автомобиля, м и м/с²
    'VEHICLE': {
        'length': 4.5,
        'width': 1.8,
        'u_x_max': 3.0,
        'u_x_min': -6.0,
        'u_y_cap': 3.0,
        'T': 0.1,
    },

    # Прямая многополосная дорога
    'ROAD': {
        'lane_width': 3.2,
        'lane_count': 4,
        'segment_length': 2000.0,
    },

    # Веса функции стоимости
    'COST': {
        'p1': 0.5,
        'p2': 0.5,
        'p3': 1.0,
        'p4': 2.0,
        'v_des': 15.0,
    },

    # Потенциальные поля препятствий
    'POTENTIAL': {
        'tau': 1.0,
        'weight': 50.0,
    },

    # Решатель DDP
    'SOLVER': {
        'mu_min': 1e-6,
        'mu_max': 1e6,
        'gamma': 5.0,
        'step_sizes': [1.0, 0.5, 0.1, 0.05, 0.01],
        'epsilon_1': 1e-3,
        'max_iterations': 100,
    },

    # Слой проверки безопасности
    'SAFETY': {
        'horizon': 3.0,
        'ttc_min': 2.0,
        'd_lat_min': 0.5,
        'T': 0.1,
    },

    # Событийный MPC
    'MPC': {
        'horizon_steps': 30,
        'dt_min': 1.0,
        'deviation_threshold': 2.0,
        'obstacle_cap': 6,
        'escalation_attempts': 3,
        'max_iterations': 50,
    },

    # Профиль скорости
    'SPEED': {
        'v_nominal': 20.0,
        'ramp_step': 0.5,
        'ramp_interval': 4.0,
        'follow_near': 20.0,
        'follow_far': 50.0,
        'leader_factor': 0.95,
        'command_delta': 1.0,
    },

    # Восприятие
    'PERCEPTION': {
        'n_max': 15,
        'sensing_range': 150.0,
        'vlm_url': os.environ.get('VISIOPATH_VLM_URL', ''),
        'vlm_key': os.environ.get('VISIOPATH_VLM_KEY', ''),
        'vlm_timeout': float(os.environ.get('VISIOPATH_VLM_TIMEOUT', '2.0')),
        'max_attempts': 2,
    },

    # Окружающий поток
    'TRAFFIC': {
        'tau_follow': 1.2,
        'standstill_gap': 2.0,
        'spawn_gap': 15.0,
        'warmup': 50.0,
    },
}


# ========================== НАСТРОЙКИ ЛОГИРОВАНИЯ ============================

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
            'level': 'WARNING',
        },
        'file': {
            'class': 'logging.FileHandler',
            'filename': BASE_DIR / 'logs/visiopath.log',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': os.getenv('DJANGO_LOG_LEVEL', 'INFO'),
        },
        'common': {
            'handlers': ['console', 'file'],
            'level': os.getenv('VISIOPATH_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'planner': {
            'handlers': ['console', 'file'],
            'level': os.getenv('VISIOPATH_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'perception': {
            'handlers': ['console', 'file'],
            'level': os.getenv('VISIOPATH_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'traffic': {
            'handlers': ['console', 'file'],
            'level': os.getenv('VISIOPATH_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'harness': {
            'handlers': ['console', 'file'],
            'level': os.getenv('VISIOPATH_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}

# Создаем папку для логов
(BASE_DIR / 'logs').mkdir(exist_ok=True)

# ============================= ПРОЧИЕ НАСТРОЙКИ ==============================

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
