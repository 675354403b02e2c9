# Generated by Django 5.2.5 on 2026-10-18 10:12

from django.db import migrations, models
import uuid


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='IntervalMap',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('name', models.CharField(help_text='Name of the map', max_length=200)),
                ('map_type', models.CharField(choices=[('tent', 'Tent map'), ('beta', 'Beta transformation'), ('uniform_pl', 'Uniformly piecewise linear'), ('explicit', 'Explicit branches')], default='explicit', help_text='Kind of map specification', max_length=20)),
                ('spec', models.JSONField(blank=True, help_text='Map specification document (numbers as exact string literals)', null=True)),
                ('source_spec', models.FileField(blank=True, help_text='Uploaded JSON map specification', null=True, upload_to='maps/specs/')),
                ('branch_count', models.PositiveIntegerField(blank=True, help_text='Number of laps', null=True)),
                ('is_continuous', models.BooleanField(blank=True, help_text='Whether the branches join up', null=True)),
                ('is_surjective', models.BooleanField(blank=True, help_text='Whether the branch images cover [0, 1]', null=True)),
                ('is_markov', models.BooleanField(blank=True, help_text='Whether the critical orbits close within the bound', null=True)),
                ('slope_factor', models.JSONField(blank=True, help_text='Exact scaling factor s', null=True)),
                ('entropy_lower', models.CharField(blank=True, default='', help_text='Lower bracket of log s', max_length=64)),
                ('entropy_upper', models.CharField(blank=True, default='', help_text='Upper bracket of log s', max_length=64)),
                ('period_n', models.PositiveIntegerField(blank=True, help_text='Number of exact pieces N', null=True)),
                ('has_infinitesimals', models.BooleanField(blank=True, help_text='Whether DG has nonzero infinitesimals', null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'verbose_name': 'Interval map',
                'verbose_name_plural': 'Interval maps',
                'ordering': ['name'],
            },
        ),
    ]
