"""
Django Admin Configuration

Read-only history of recorded evaluation runs.
"""

import json

from django.contrib import admin
from django.utils.html import format_html

from keywords.extension.models import EvaluationRun


@admin.register(EvaluationRun)
class EvaluationRunAdmin(admin.ModelAdmin):
    list_display = [
        "name",
        "created_at",
        "status_badge",
        "query_count",
        "processing_time_display",
    ]

    list_filter = [
        "status",
        "created_at",
    ]

    search_fields = ["name"]

    readonly_fields = [
        "name",
        "status",
        "query_count",
        "processing_time",
        "manifest_display",
        "report_display",
        "error_log",
        "created_at",
    ]

    fieldsets = (
        ("Run", {
            "fields": ("name", "status", "query_count", "processing_time", "created_at"),
        }),
        ("Results", {
            "fields": ("report_display",),
        }),
        ("Inputs", {
            "fields": ("manifest_display", "error_log"),
            "classes": ("collapse",),
        }),
    )

    date_hierarchy = "created_at"

    def has_add_permission(self, request):
        return False

    def has_change_permission(self, request, obj=None):
        return False

    @admin.display(description="Status")
    def status_badge(self, obj):
        colors = {
            "pending": "#f59e0b",
            "running": "#3b82f6",
            "completed": "#22c55e",
            "failed": "#ef4444",
        }
        return format_html(
            '<span style="background-color: {}; color: white; padding: 3px 10px; '
            'border-radius: 3px; font-size: 12px; font-weight: bold;">{}</span>',
            colors.get(obj.status, "#6b7280"),
            obj.status.upper(),
        )

    @admin.display(description="Time")
    def processing_time_display(self, obj):
        if obj.processing_time is None:
            return "-"
        return f"{obj.processing_time:.2f}s"

    @admin.display(description="Manifest")
    def manifest_display(self, obj):
        return format_html("<pre>{}</pre>", json.dumps(obj.manifest, indent=2, sort_keys=True))

    @admin.display(description="Report")
    def report_display(self, obj):
        return format_html("<pre>{}</pre>", json.dumps(obj.report, indent=2, sort_keys=True))
