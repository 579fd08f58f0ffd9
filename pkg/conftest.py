import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'visiopath.settings')
django.setup()
