from django.apps import AppConfig


class TheoremVerificationConfig(AppConfig):
    name = 'theorem_verification'
