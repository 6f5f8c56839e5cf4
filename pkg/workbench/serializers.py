import math
from pathlib import Path

from rest_framework import serializers

from claims.balance import parse_bound
from claims.checks import ClaimId
from claims.scan import check_sizes
from convexfn.registry import parse_function
from generators.families import parse_family, parse_set_descriptor
from numeric.exceptions import EnergyLabError
from numeric.scalars import format_scalar, parse_rational
from setcore.ops import SetOp

from .models import Run

SET_FIELDS = ("A", "B", "C", "Q", "R", "U", "V")

BALANCE = "balance"

REQUIRED = {
    Run.Command.GEN: ("A",),
    Run.Command.ENERGY: ("A",),
    Run.Command.DECOMP: ("A",),
    Run.Command.VERIFY: ("certificate",),
    Run.Command.CHECK: ("claim",),
    Run.Command.SCAN: ("claim", "family", "sizes"),
    Run.Command.INCIDENCE: ("A",),
}


class _ParsedField(serializers.CharField):
    parser = None

    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            return type(self).parser(text)
        except EnergyLabError as exc:
            raise serializers.ValidationError(str(exc))


class RationalField(_ParsedField):
    parser = staticmethod(parse_rational)


class FunctionField(_ParsedField):
    parser = staticmethod(parse_function)


class BoundField(_ParsedField):
    parser = staticmethod(parse_bound)


class ScalarField(serializers.Field):
    """Exact rationals as ``p/q``, integers as ``p``, floats by ``repr``."""

    def to_representation(self, value):
        if value is None:
            return None
        if isinstance(value, float) and not math.isfinite(value):
            return repr(value)
        return format_scalar(value)


class RunConfigSerializer(serializers.Serializer):
    command = serializers.ChoiceField(choices=Run.Command.choices)
    A = serializers.CharField(required=False)
    B = serializers.CharField(required=False)
    C = serializers.CharField(required=False)
    Q = serializers.CharField(required=False)
    R = serializers.CharField(required=False)
    U = serializers.CharField(required=False)
    V = serializers.CharField(required=False)
    f = FunctionField(required=False)
    g = FunctionField(required=False)
    k = RationalField(required=False)
    c1 = RationalField(required=False)
    lam = RationalField(required=False)
    T = serializers.IntegerField(required=False, min_value=1)
    op = serializers.ChoiceField(choices=SetOp.choices, default=SetOp.DIFF)
    sign = serializers.ChoiceField(choices=["+", "-"], default="+")
    claim = serializers.ChoiceField(choices=[*ClaimId.choices, (BALANCE, "Exponent balancing")], required=False)
    b1 = BoundField(required=False)
    b2 = BoundField(required=False)
    family = serializers.CharField(required=False)
    sizes = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False)
    certificate = serializers.CharField(required=False)
    seed = serializers.IntegerField(required=False)
    tolerance = serializers.FloatField(required=False)
    threads = serializers.IntegerField(required=False, min_value=1)
    classes = serializers.BooleanField(default=False)
    out = serializers.CharField(required=False)
    format = serializers.ChoiceField(choices=["csv", "json"], default="csv")
    record = serializers.BooleanField(default=False)

    def to_internal_value(self, data):
        if hasattr(data, "keys"):
            unknown = sorted(set(data.keys()) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ["Unknown field."] for key in unknown})
        return super().to_internal_value(data)

    def validate_tolerance(self, value):
        if value < 0:
            raise serializers.ValidationError("Tolerance must be >= 0.")
        return value

    def validate_certificate(self, value):
        path = Path(value)
        if not path.is_file():
            raise serializers.ValidationError(f"Certificate file {path} does not exist.")
        return str(path.resolve())

    def validate_out(self, value):
        path = Path(value).resolve()
        if not path.parent.is_dir():
            raise serializers.ValidationError(f"Directory {path.parent} does not exist.")
        return str(path)

    def validate(self, attrs):
        command = attrs["command"]
        missing = [name for name in REQUIRED[command] if name not in attrs]
        if command == Run.Command.CHECK and "claim" in attrs:
            needed = ("b1", "b2") if attrs["claim"] == BALANCE else ("A",)
            missing.extend(name for name in needed if name not in attrs)
        if missing:
            raise serializers.ValidationError({name: [f"This field is required for {command}."] for name in missing})
        if command == Run.Command.SCAN and attrs["claim"] == BALANCE:
            raise serializers.ValidationError({"claim": ["Exponent balancing has no size scan."]})

        seed = attrs.get("seed")
        sets, labels = {}, {}
        for name in SET_FIELDS:
            if name in attrs:
                try:
                    sets[name], labels[name] = parse_set_descriptor(attrs[name], seed)
                except EnergyLabError as exc:
                    raise serializers.ValidationError({name: [str(exc)]})
        attrs["sets"], attrs["labels"] = sets, labels

        if "family" in attrs:
            try:
                attrs["family_spec"] = parse_family(attrs["family"], seed)
            except EnergyLabError as exc:
                raise serializers.ValidationError({"family": [str(exc)]})
        if "sizes" in attrs:
            try:
                attrs["sizes"] = list(check_sizes(attrs["sizes"]))
            except EnergyLabError as exc:
                raise serializers.ValidationError({"sizes": [str(exc)]})
        return attrs


class ConditionSerializer(serializers.Serializer):
    name = serializers.CharField()
    lhs = serializers.CharField()
    rhs = serializers.CharField()
    holds = serializers.BooleanField(allow_null=True)
    binding = serializers.BooleanField()


class ClaimReportSerializer(serializers.Serializer):
    claim = serializers.CharField()
    family = serializers.CharField()
    n = serializers.IntegerField(allow_null=True)
    inputs = serializers.DictField(child=serializers.CharField())
    lhs = ScalarField()
    rhs = ScalarField()
    direction = serializers.CharField()
    ratio = serializers.FloatField(allow_null=True)
    margin = serializers.FloatField(allow_null=True)
    pass_mode = serializers.CharField()
    verdict = serializers.CharField()
    conditions = ConditionSerializer(many=True)
    log_sizes = serializers.DictField(child=serializers.FloatField())
    error = serializers.CharField(allow_blank=True)


class ScanSerializer(serializers.Serializer):
    claim = serializers.CharField()
    family = serializers.CharField()
    sizes = serializers.ListField(child=serializers.IntegerField())
    slope = serializers.FloatField(allow_null=True)
    pass_mode = serializers.CharField()
    verdict = serializers.CharField()
    reports = ClaimReportSerializer(many=True)
