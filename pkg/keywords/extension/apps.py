from django.apps import AppConfig


class ExtensionConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "keywords.extension"
    verbose_name = "Keyword Extension"
