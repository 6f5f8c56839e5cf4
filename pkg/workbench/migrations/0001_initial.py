# Generated by Django 5.2.11 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Run',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('gen', 'Generate a set'), ('energy', 'Energy'), ('decomp', 'Decomposition'), ('verify', 'Verify a certificate'), ('check', 'Check a claim'), ('scan', 'Size scan'), ('incidence', 'Incidence experiment')], max_length=16)),
                ('config', models.JSONField(blank=True, default=dict)),
                ('exit_status', models.PositiveSmallIntegerField(default=0)),
                ('verdicts', models.JSONField(blank=True, default=dict)),
                ('artifacts', models.JSONField(blank=True, default=list)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
                'indexes': [models.Index(fields=['command', 'created_at'], name='workbench_run_command_idx')],
            },
        ),
    ]
