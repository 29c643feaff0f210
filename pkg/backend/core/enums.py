"""Настройки параметров.
"""
from enum import Enum, IntEnum


class Limits(IntEnum):
    # Минимальное число районов в загружаемой задаче
    MIN_DISTRICTS = 2
    # Предельное число целочисленных точек многогранника A при переборе
    MAX_STATES = 200_000
    # Предельное число путей при переборе путей сети
    MAX_PATHS = 10_000
    # Минимальное число снимков траектории после прогрева
    MIN_SAMPLES = 100
    # Максимальное число итераций Синхорна по умолчанию
    SINKHORN_MAX_ITER = 100_000
    # Максимальное число итераций равновесных методов по умолчанию
    EQUILIBRIUM_MAX_ITER = 20_000
    # Минимальное число значений N в сетке для оценки времени перемешивания
    MIN_MIXING_GRID = 4
    # Минимальное число зёрен на одно значение N
    MIN_MIXING_SEEDS = 10
    # Размер пачки случайных чисел, выбираемых генератором за один раз
    RANDOM_BATCH = 65_536


class Tolerances(float, Enum):
    # Допуск проверки принадлежности многограннику A (в долях)
    FEASIBILITY = 1e-8
    # Точность выполнения маргиналов в методе Синхорна
    SINKHORN = 1e-10
    # Допуск двойственного зазора сошедшегося решения
    DUAL_GAP = 1e-8
    # Допустимое относительное расхождение сумм L и W при загрузке
    REBALANCE = 1e-9
    # Точность равновесных методов на сети
    EQUILIBRIUM = 1e-10


class Defaults(float, Enum):
    # Интенсивность обменов / пересмотра стратегий
    INTENSITY = 1.0
    # Множитель прогрева: burn_in = BURN_IN_FACTOR * N ln N событий
    BURN_IN_FACTOR = 5.0
    # Уровень доверия односторонней биномиальной поправки
    BINOMIAL_CONFIDENCE = 0.99
    # Уровень sigma для порога выхода на равновесие
    MIXING_SIGMA = 0.25
    # Множитель радиуса для порога выхода на равновесие
    MIXING_RADIUS_FACTOR = 2.0
    # Границы допустимого наклона N ln N
    MIXING_SLOPE_LOW = 0.8
    MIXING_SLOPE_HIGH = 1.2
    # Степень в функции BPR
    BPR_POWER = 4.0


class Scale(str, Enum):
    # Абсолютные значения (сумма равна N)
    COUNTS = 'counts'
    # Доли (сумма равна 1)
    SHARES = 'shares'


class LatencyKind(str, Enum):
    CONSTANT = 'constant'
    AFFINE = 'affine'
    BPR = 'bpr'


class StepRule(str, Enum):
    # Точный шаг вдоль логит-направления
    EXACT = 'exact'
    # Шаг 2 / (k + 2)
    MSA = 'msa'


class ErrorCodes(str, Enum):
    DIMENSION_MISMATCH = 'DIMENSION_MISMATCH'
    NEGATIVE_ENTRY = 'NEGATIVE_ENTRY'
    NON_FINITE_ENTRY = 'NON_FINITE_ENTRY'
    MARGIN_TOTALS_DIFFER = 'MARGIN_TOTALS_DIFFER'
    PARSE_ERROR = 'PARSE_ERROR'
    DEGENERATE_MARGIN = 'DEGENERATE_MARGIN'
    OVERFLOW = 'OVERFLOW'
    EMPTY_PROPENSITY = 'EMPTY_PROPENSITY'
    STATE_SPACE_TOO_LARGE = 'STATE_SPACE_TOO_LARGE'
    OUT_OF_POLYTOPE = 'OUT_OF_POLYTOPE'
    INVALID_CHANNEL = 'INVALID_CHANNEL'
    INSUFFICIENT_SAMPLES = 'INSUFFICIENT_SAMPLES'
    NO_CROSSING = 'NO_CROSSING'
    NO_PATH = 'NO_PATH'
    INFEASIBLE_TARGET = 'INFEASIBLE_TARGET'
    INVALID_RANGE = 'INVALID_RANGE'
    ZERO_MARGIN = 'ZERO_MARGIN'
    UNKNOWN_KEY = 'UNKNOWN_KEY'
    MAX_ITER_EXCEEDED = 'MAX_ITER_EXCEEDED'


class RngIds(str, Enum):
    # Генератор по умолчанию для всех стохастических операций
    PCG64 = 'numpy.PCG64'
    # Категориальная выборка обратной функцией распределения
    PCG64_INVERSE_CDF = 'numpy.PCG64/inverse-cdf'
