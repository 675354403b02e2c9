# Generated by Django 5.2.5 on 2026-10-18 10:12

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
        ('map_library', '0001_initial'),
    ]

    operations = [
        migrations.CreateModel(
            name='AnalysisRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(default='analyze', help_text='Command that produced the report', max_length=32)),
                ('options', models.JSONField(blank=True, default=dict, help_text='Bounds and tolerances used')),
                ('report', models.JSONField(blank=True, default=dict, help_text='Deterministic JSON report')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('interval_map', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='analysis_runs', to='map_library.intervalmap')),
            ],
            options={
                'verbose_name': 'Analysis run',
                'verbose_name_plural': 'Analysis runs',
                'ordering': ['-created_at'],
            },
        ),
    ]
