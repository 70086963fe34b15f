from django.db import models


class ArchiveMixin:
    """
    Mixin for archive instance of model
    """

    def unarchived(self):
        return self.filter(is_archived=False)


class BaseModelQuerySet(models.QuerySet, ArchiveMixin):
    """
    Base Queryset used in this project
    """
