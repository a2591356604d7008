from django.contrib import admin
from .models import ExperimentRun, RunRecord


class RunRecordInline(admin.TabularInline):
    model = RunRecord
    extra = 0
    fields = ('instance', 'rep', 'algorithm', 'eta', 'coverage_ratio', 'violation_additive', 'runtime_s', 'error')
    readonly_fields = fields
    can_delete = False


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'name', 'base_seed', 'instances', 'repetitions', 'failed_cells', 'date_created')
    search_fields = ('name',)
    readonly_fields = ('date_created', 'date_updated')
    inlines = [RunRecordInline]
    ordering = ('-date_created',)


@admin.register(RunRecord)
class RunRecordAdmin(admin.ModelAdmin):
    list_display = ('id', 'run', 'algorithm', 'eta', 'rep', 'coverage_ratio', 'violation_additive', 'violation_multiplicative', 'runtime_s')
    list_filter = ('algorithm', 'eta')
    search_fields = ('algorithm', 'run__name', 'error')
    ordering = ('run', 'instance', 'rep', 'id')
