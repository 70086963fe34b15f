from django.db import models

from keywords.core.models import BaseModel


class EvaluationRun(BaseModel):
    """
    A recorded evaluation of one or more decoder configurations.

    ``manifest`` holds the input digests and configuration grid, ``report``
    the metric tables as produced by the evaluate command.
    """

    STATUS_CHOICES = [
        ("pending", "Pending"),
        ("running", "Running"),
        ("completed", "Completed"),
        ("failed", "Failed"),
    ]

    name = models.CharField(max_length=255)
    status = models.CharField(
        max_length=20,
        choices=STATUS_CHOICES,
        default="pending",
    )
    query_count = models.IntegerField(
        default=0,
        help_text="Number of evaluated queries",
    )
    manifest = models.JSONField(default=dict, blank=True)
    report = models.JSONField(default=dict, blank=True)
    error_log = models.TextField(blank=True, default="")
    processing_time = models.FloatField(
        null=True,
        blank=True,
        help_text="Processing time in seconds",
    )

    class Meta:
        ordering = ["-created_at"]
        verbose_name = "Evaluation Run"
        verbose_name_plural = "Evaluation Runs"

    def __str__(self):
        return f"{self.name} - {self.status}"

    def mark_running(self):
        self.status = "running"
        self.save(update_fields=["status", "updated_at"])

    def mark_completed(self, report, processing_time):
        self.status = "completed"
        self.report = report
        self.processing_time = processing_time
        self.save(update_fields=["status", "report", "processing_time", "updated_at"])

    def mark_failed(self, error):
        self.status = "failed"
        self.error_log = str(error)
        self.save(update_fields=["status", "error_log", "updated_at"])
