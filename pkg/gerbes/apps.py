from django.apps import AppConfig


class GerbesConfig(AppConfig):
    name = 'gerbes'
    verbose_name = 'Deligne cocycles, holonomy and Chern-Simons checks'
