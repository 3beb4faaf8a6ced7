from django.apps import AppConfig


class TensorCoreConfig(AppConfig):
    name = 'tensor_core'
