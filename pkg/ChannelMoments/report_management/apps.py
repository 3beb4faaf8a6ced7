from django.apps import AppConfig


class ReportManagementConfig(AppConfig):
    name = 'report_management'
