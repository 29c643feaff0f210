"""help-texts для команд управления."""
from core.enums import Limits, Tolerances

# Общие параметры запуска
HELP_CONFIG = 'Файл key=value со значениями параметров по умолчанию.'
HELP_OUT = 'Каталог для результатов (по умолчанию MACROFLOW_OUTPUT_DIR).'
HELP_RUN_ID = 'Имя запуска. По умолчанию - хеш команды и параметров.'
HELP_SEED = 'Зерно генератора случайных чисел. Обязательно.'
HELP_WORKERS = 'Число потоков для повторов с разными зёрнами.'

# Задача о корреспонденциях
HELP_MARGINS = 'CSV с заголовком district,L,W.'
HELP_COSTS = 'CSV с матрицей затрат n x n без заголовка.'
HELP_BETA = 'Параметр beta >= 0.'
HELP_TOL = (
    'Точность решения. '
    f'По умолчанию {Tolerances.SINKHORN.value}.'
)
HELP_MAX_ITER = 'Предельное число итераций.'
HELP_SCALE = 'Шкала матрицы d*: shares - доли, counts - численности.'
HELP_SWEEP_BETA = 'Сетка beta через запятую для таблицы затрат и энтропии.'

# Обмены
HELP_LAMBDA = 'Интенсивность обменов (пересмотра путей) lambda > 0.'
HELP_EVENTS = 'Число моделируемых событий.'
HELP_SAMPLE_EVERY = 'Шаг снимков траектории в событиях.'
HELP_SIGMA = 'Уровень sigma из (0, 0.5) для проверки концентрации.'
HELP_BURN_IN = 'Прогрев в событиях. По умолчанию 5 N ln N.'
HELP_START = 'Начальное состояние: dstar - округлённое d*, corner - вершина A.'
HELP_STATES = 'Записать в траекторию развёрнутые состояния.'
HELP_EXACT = (
    'Вычислить точное стационарное распределение (не больше '
    f'{Limits.MAX_STATES.value} состояний) и сравнить с траекторией.'
)

# Маршруты
HELP_NETWORK = 'CSV сети: строка source=..,sink=.. и таблица рёбер.'
HELP_OMEGA = 'Уровень шума omega >= 0; 0 - равновесие Вардропа.'
HELP_STEP_RULE = 'Шаг итераций SUE: exact или msa.'
HELP_MAX_PATHS = f'Ограничение числа путей (до {Limits.MAX_PATHS.value}).'
HELP_SWEEP_OMEGA = 'Убывающая сетка omega через запятую для проверки предела.'
HELP_POPULATION = 'Число агентов N для моделирования логит динамики.'

# Опрос
HELP_MODE = 'size - объём выборки, fit - оценка по ответам, generate - ' \
    'моделирование опроса и оценка.'
HELP_EPSILON = 'Допустимая ошибка epsilon > 0.'
HELP_COUNTS = 'CSV с матрицей ответов n x n без заголовка.'
HELP_N_RESP = 'Число опрашиваемых.'
HELP_REPLICATIONS = 'Число повторов опроса для проверки гарантии.'

# Перемешивание
HELP_GRID = 'Значения N через запятую (не меньше 4, в пределах порядка).'
HELP_SEEDS = 'Число зёрен для каждого N.'
HELP_HORIZON = 'Предел числа событий. По умолчанию 20 N ln N.'
