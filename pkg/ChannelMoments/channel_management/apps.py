from django.apps import AppConfig


class ChannelManagementConfig(AppConfig):
    name = 'channel_management'
