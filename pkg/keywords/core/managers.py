from django.db import models

from . import querysets


class BaseModelManager(models.Manager.from_queryset(querysets.BaseModelQuerySet)):
    """
    Base Model Manager used in the project, Used in all models
    """
