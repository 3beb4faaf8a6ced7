from django.apps import AppConfig


class HaarIntegrationConfig(AppConfig):
    name = 'haar_integration'
