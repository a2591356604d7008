# harness/models.py
from django.db import models
from django.utils import timezone


class ExperimentRun(models.Model):
    """
    One invocation of run_experiment recorded with its configuration
    """

    id = models.AutoField(primary_key=True)
    name = models.CharField(max_length=255)
    config = models.JSONField(help_text="Validated experiment configuration")
    base_seed = models.BigIntegerField(default=0)
    repetitions = models.PositiveIntegerField(default=1)
    instances = models.PositiveIntegerField(default=1)
    algorithm_samples = models.PositiveIntegerField()
    evaluation_samples = models.PositiveIntegerField()
    failed_cells = models.PositiveIntegerField(default=0)
    csv_path = models.TextField(
        blank=True,
        help_text="Where the CSV report was written, if anywhere"
    )

    # Timestamps
    date_created = models.DateTimeField(default=timezone.now)
    date_updated = models.DateTimeField(auto_now=True)

    class Meta:
        db_table = 'experiment_run'
        verbose_name = 'Experiment Run'
        verbose_name_plural = 'Experiment Runs'
        ordering = ['-date_created']

    def __str__(self):
        return f"{self.name} (seed {self.base_seed})"


class RunRecord(models.Model):
    """
    Metrics of one (instance, repetition, algorithm, eta) cell
    """

    id = models.AutoField(primary_key=True)
    run = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        related_name='records'
    )
    instance = models.PositiveIntegerField(default=0)
    rep = models.PositiveIntegerField()
    algorithm = models.CharField(max_length=32)
    eta = models.CharField(
        max_length=32,
        blank=True,
        help_text="Slack preset as configured, e.g. 0, 1/4 or x/8"
    )
    eta_value = models.FloatField(null=True, blank=True)
    coverage_ratio = models.FloatField(null=True, blank=True)
    violation_additive = models.FloatField(null=True, blank=True)
    violation_multiplicative = models.FloatField(null=True, blank=True)
    min_group_coverage = models.FloatField(null=True, blank=True)
    group_coverages = models.JSONField(blank=True, null=True)
    runtime_s = models.FloatField(null=True, blank=True)
    seed = models.BigIntegerField()
    error = models.TextField(blank=True)

    date_created = models.DateTimeField(default=timezone.now)

    class Meta:
        db_table = 'run_record'
        verbose_name = 'Run Record'
        verbose_name_plural = 'Run Records'
        ordering = ['run', 'instance', 'rep', 'id']

    def __str__(self):
        return f"{self.algorithm}[{self.eta}] rep {self.rep}"
