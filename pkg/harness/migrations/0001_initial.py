# Generated by Django 5.2.4 on 2026-10-19 09:30

import django.db.models.deletion
import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.AutoField(primary_key=True, serialize=False)),
                ('name', models.CharField(max_length=255)),
                ('config', models.JSONField(help_text='Validated experiment configuration')),
                ('base_seed', models.BigIntegerField(default=0)),
                ('repetitions', models.PositiveIntegerField(default=1)),
                ('instances', models.PositiveIntegerField(default=1)),
                ('algorithm_samples', models.PositiveIntegerField()),
                ('evaluation_samples', models.PositiveIntegerField()),
                ('failed_cells', models.PositiveIntegerField(default=0)),
                ('csv_path', models.TextField(blank=True, help_text='Where the CSV report was written, if anywhere')),
                ('date_created', models.DateTimeField(default=django.utils.timezone.now)),
                ('date_updated', models.DateTimeField(auto_now=True)),
            ],
            options={
                'verbose_name': 'Experiment Run',
                'verbose_name_plural': 'Experiment Runs',
                'db_table': 'experiment_run',
                'ordering': ['-date_created'],
            },
        ),
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.AutoField(primary_key=True, serialize=False)),
                ('instance', models.PositiveIntegerField(default=0)),
                ('rep', models.PositiveIntegerField()),
                ('algorithm', models.CharField(max_length=32)),
                ('eta', models.CharField(blank=True, help_text='Slack preset as configured, e.g. 0, 1/4 or x/8', max_length=32)),
                ('eta_value', models.FloatField(blank=True, null=True)),
                ('coverage_ratio', models.FloatField(blank=True, null=True)),
                ('violation_additive', models.FloatField(blank=True, null=True)),
                ('violation_multiplicative', models.FloatField(blank=True, null=True)),
                ('min_group_coverage', models.FloatField(blank=True, null=True)),
                ('group_coverages', models.JSONField(blank=True, null=True)),
                ('runtime_s', models.FloatField(blank=True, null=True)),
                ('seed', models.BigIntegerField()),
                ('error', models.TextField(blank=True)),
                ('date_created', models.DateTimeField(default=django.utils.timezone.now)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='records', to='harness.experimentrun')),
            ],
            options={
                'verbose_name': 'Run Record',
                'verbose_name_plural': 'Run Records',
                'db_table': 'run_record',
                'ordering': ['run', 'instance', 'rep', 'id'],
            },
        ),
    ]
