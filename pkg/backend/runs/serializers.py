"""Проверка параметров запусков.

Параметры собираются из файла --config и флагов командной строки,
значения из файла приходят строками и приводятся полями сериализаторов.
"""
from core.enums import (ErrorCodes, Limits, Scale, StepRule, Tolerances)
from core.validators import sigma_validator
from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework.serializers import (BooleanField, CharField, ChoiceField,
                                        Field, FloatField, IntegerField,
                                        Serializer, ValidationError)


class NumberListField(Field):
    """Список чисел через запятую: `0,0.5,1`."""
    default_error_messages = {
        'invalid': 'Ожидается список чисел через запятую.',
        'empty': 'Список не может быть пустым.',
    }

    def __init__(self, child_type: type = float, **kwargs) -> None:
        self.child_type = child_type
        super().__init__(**kwargs)

    def to_internal_value(self, data) -> list:
        if isinstance(data, str):
            data = [part for part in data.split(',') if part.strip()]
        try:
            values = [self.child_type(str(value).strip()) for value in data]
        except (TypeError, ValueError):
            self.fail('invalid')
        if not values:
            self.fail('empty')
        return values

    def to_representation(self, value: list) -> str:
        return ','.join(str(item) for item in value)


class RunConfigSerializer(Serializer):
    """Базовый сериализатор: неизвестные ключи - ошибка."""

    def to_internal_value(self, data: dict) -> dict:
        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise ValidationError(
                {'config': f'Неизвестные параметры: {", ".join(unknown)}.'},
                code=ErrorCodes.UNKNOWN_KEY.value,
            )
        return super().to_internal_value(data)

    @staticmethod
    def _check_sigma(value: float) -> float:
        try:
            sigma_validator(value)
        except DjangoValidationError as exc:
            raise ValidationError(exc.messages[0]) from exc
        return value


class InstanceMixin(Serializer):
    margins = CharField()
    costs = CharField()
    beta = FloatField(min_value=0, default=0.0)


class SolveOdSerializer(InstanceMixin, RunConfigSerializer):
    tol = FloatField(min_value=0, default=Tolerances.SINKHORN.value)
    max_iter = IntegerField(
        min_value=1, default=Limits.SINKHORN_MAX_ITER.value
    )
    scale = ChoiceField(
        choices=[scale.value for scale in Scale], default=Scale.SHARES.value
    )
    sweep = NumberListField(required=False)


class SimulateExchangeSerializer(InstanceMixin, RunConfigSerializer):
    lam = FloatField(min_value=0, default=1.0)
    events = IntegerField(min_value=1)
    sample_every = IntegerField(min_value=1, default=100)
    seed = IntegerField(min_value=0)
    sigma = FloatField(default=0.1)
    burn_in = IntegerField(min_value=0, required=False)
    start = ChoiceField(choices=['dstar', 'corner'], default='dstar')
    states = BooleanField(default=False)
    exact = BooleanField(default=False)

    def validate_sigma(self, value: float) -> float:
        return self._check_sigma(value)

    def validate_lam(self, value: float) -> float:
        if value <= 0:
            raise ValidationError('lambda должна быть положительной.')
        return value


class RouteEqSerializer(RunConfigSerializer):
    network = CharField()
    omega = FloatField(min_value=0, default=1.0)
    tol = FloatField(min_value=0, default=Tolerances.EQUILIBRIUM.value)
    max_iter = IntegerField(
        min_value=1, default=Limits.EQUILIBRIUM_MAX_ITER.value
    )
    step_rule = ChoiceField(
        choices=[rule.value for rule in StepRule], default=StepRule.EXACT.value
    )
    max_paths = IntegerField(
        min_value=1, max_value=Limits.MAX_PATHS.value,
        default=Limits.MAX_PATHS.value,
    )
    sweep = NumberListField(required=False)
    population = IntegerField(min_value=1, required=False)
    lam = FloatField(min_value=0, default=1.0)
    events = IntegerField(min_value=1, required=False)
    sample_every = IntegerField(min_value=1, default=100)
    seed = IntegerField(min_value=0, required=False)
    sigma = FloatField(default=0.25)
    burn_in = IntegerField(min_value=0, required=False)

    def validate_sigma(self, value: float) -> float:
        return self._check_sigma(value)

    def validate_sweep(self, value: list[float]) -> list[float]:
        if any(omega <= 0 for omega in value):
            raise ValidationError('Значения omega должны быть положительны.')
        return value

    def validate(self, attrs: dict) -> dict:
        if 'population' in attrs:
            missing = [
                key for key in ('events', 'seed') if key not in attrs
            ]
            if missing:
                raise ValidationError(
                    f'Для логит динамики нужны {", ".join(missing)}.'
                )
            if attrs['omega'] == 0:
                raise ValidationError(
                    'Логит динамика моделируется только при omega > 0.'
                )
        return attrs


class SurveySerializer(RunConfigSerializer):
    mode = ChoiceField(choices=['size', 'fit', 'generate'])
    epsilon = FloatField(required=False)
    sigma = FloatField(required=False)
    counts = CharField(required=False)
    margins = CharField(required=False)
    costs = CharField(required=False)
    beta = FloatField(min_value=0, default=0.0)
    n_resp = IntegerField(min_value=0, required=False)
    seed = IntegerField(min_value=0, required=False)
    replications = IntegerField(min_value=1, required=False)
    tol = FloatField(min_value=0, default=Tolerances.SINKHORN.value)

    REQUIRED = {
        'size': ('epsilon', 'sigma'),
        'fit': ('counts', 'costs'),
        'generate': ('margins', 'costs', 'n_resp', 'seed'),
    }

    def validate(self, attrs: dict) -> dict:
        missing = [
            key for key in self.REQUIRED[attrs['mode']] if key not in attrs
        ]
        if attrs.get('replications'):
            if attrs['mode'] != 'generate':
                raise ValidationError(
                    'Повторы опроса возможны только в режиме generate.'
                )
            missing += [
                key for key in ('epsilon', 'sigma') if key not in attrs
            ]
        if missing:
            raise ValidationError(
                f'Режим {attrs["mode"]}: нужны {", ".join(missing)}.'
            )
        return attrs


class MixingScanSerializer(InstanceMixin, RunConfigSerializer):
    grid = NumberListField(child_type=int)
    seeds = IntegerField(
        min_value=Limits.MIN_MIXING_SEEDS.value,
        default=Limits.MIN_MIXING_SEEDS.value,
    )
    seed = IntegerField(min_value=0)
    lam = FloatField(min_value=0, default=1.0)
    start = ChoiceField(choices=['corner', 'dstar'], default='corner')
    horizon = IntegerField(min_value=1, required=False)
    workers = IntegerField(min_value=1, default=1)
