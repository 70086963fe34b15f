# Generated by Django 5.2.1 on 2026-10-18 10:12

import uuid

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='EvaluationRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('is_archived', models.BooleanField(default=False)),
                ('created_at', models.DateTimeField(auto_now_add=True, null=True)),
                ('updated_at', models.DateTimeField(auto_now=True, null=True)),
                ('name', models.CharField(max_length=255)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('completed', 'Completed'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('query_count', models.IntegerField(default=0, help_text='Number of evaluated queries')),
                ('manifest', models.JSONField(blank=True, default=dict)),
                ('report', models.JSONField(blank=True, default=dict)),
                ('error_log', models.TextField(blank=True, default='')),
                ('processing_time', models.FloatField(blank=True, help_text='Processing time in seconds', null=True)),
            ],
            options={
                'verbose_name': 'Evaluation Run',
                'verbose_name_plural': 'Evaluation Runs',
                'ordering': ['-created_at'],
            },
        ),
    ]
