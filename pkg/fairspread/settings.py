import environ


# fairspread/settings.py
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Initialize environment variables (an optional .env at the project root)
env = environ.Env(
    DEBUG=(bool, False),
    FAIRSPREAD_WORKERS=(int, 1),
    FAIRSPREAD_LOG_LEVEL=(str, 'INFO'),
)
environ.Env.read_env(env_file=BASE_DIR / '.env')


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = env('SECRET_KEY', default='fairspread-local-only-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = env('DEBUG')

ALLOWED_HOSTS = ['127.0.0.1', 'localhost']


# Application definition

INSTALLED_APPS = [
    # Third-party apps
    'jazzmin',
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',

    'rest_framework',

    # library modules
    'graph_core.apps.GraphCoreConfig',
    'diffusion.apps.DiffusionConfig',
    'solutions.apps.SolutionsConfig',
    'lp_interface.apps.LpInterfaceConfig',
    'algorithms.apps.AlgorithmsConfig',
    'fixtures.apps.FixturesConfig',
    'harness.apps.HarnessConfig',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'fairspread.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]


# Database
# Run history only; sqlite unless DATABASE_URL says otherwise
DATABASES = {
    'default': env.db('DATABASE_URL', default=f"sqlite:///{BASE_DIR / 'fairspread.sqlite3'}"),
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Static files (admin only)
STATIC_URL = 'static/'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Library defaults. Every function taking one of these as an argument
# treats None as "use the value configured here".
FAIRSPREAD = {
    'WORKERS': env('FAIRSPREAD_WORKERS'),
    'ALGORITHM_SAMPLES': env.int('FAIRSPREAD_ALGORITHM_SAMPLES', default=1000),
    'EVALUATION_SAMPLES': env.int('FAIRSPREAD_EVALUATION_SAMPLES', default=100),
    'INDEPENDENT_DRAWS': env.int('FAIRSPREAD_INDEPENDENT_DRAWS', default=150),
    'ENUMERATION_CAP': env.int('FAIRSPREAD_ENUMERATION_CAP', default=20),
    'LP_TOLERANCE': env.float('FAIRSPREAD_LP_TOLERANCE', default=1e-6),
    'MULT_WEIGHT_STEP': env.float('FAIRSPREAD_MULT_WEIGHT_STEP', default=0.1),
    'LOG_LEVEL': env('FAIRSPREAD_LOG_LEVEL'),
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
        app: {
            'handlers': ['console'],
            'level': FAIRSPREAD['LOG_LEVEL'],
            'propagate': False,
        }
        for app in (
            'graph_core', 'diffusion', 'solutions', 'lp_interface',
            'algorithms', 'fixtures', 'harness',
        )
    },
}


JAZZMIN_SETTINGS = {
    "site_title": "Fairspread Admin",
    "site_header": "Fairspread Experiments",
    "site_brand": "Fairspread",
    "welcome_sign": "Experiment run history",
    "search_model": ["harness.ExperimentRun"],
    "user_avatar": None,

    "topmenu_links": [
        {"name": "Home", "url": "admin:index", "permissions": ["auth.view_user"]},
    ],

    "changeform_format": "horizontal_tabs",
}

JAZZMIN_UI_TWEAKS = {
    "brand_colour": "navbar-success",
    "accent": "accent-teal",
    "navbar": "navbar-dark",
    "sidebar": "sidebar-dark-info",
    "theme": "default",
}
