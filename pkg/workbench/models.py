from django.db import models


class Run(models.Model):
    """One recorded ``energylab`` invocation."""

    class Command(models.TextChoices):
        GEN = "gen", "Generate a set"
        ENERGY = "energy", "Energy"
        DECOMP = "decomp", "Decomposition"
        VERIFY = "verify", "Verify a certificate"
        CHECK = "check", "Check a claim"
        SCAN = "scan", "Size scan"
        INCIDENCE = "incidence", "Incidence experiment"

    command = models.CharField(max_length=16, choices=Command.choices)
    config = models.JSONField(default=dict, blank=True)
    exit_status = models.PositiveSmallIntegerField(default=0)
    verdicts = models.JSONField(default=dict, blank=True)
    artifacts = models.JSONField(default=list, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at", "-id"]
        indexes = [models.Index(fields=["command", "created_at"], name="workbench_run_command_idx")]

    def __str__(self):
        return f"Run({self.id}, {self.command}, exit {self.exit_status})"
