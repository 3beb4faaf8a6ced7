import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ChannelMoments.settings')
django.setup()
