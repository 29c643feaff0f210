"""Общие действия запусков: сборка параметров и запись результатов.
"""
import hashlib
import json
import logging
from collections.abc import Mapping
from pathlib import Path

import pandas as pd
from core.enums import ErrorCodes
from decouple import RepositoryEnv
from django.conf import settings
from django.core.exceptions import ValidationError
from macroflow import __version__
from rest_framework.renderers import JSONRenderer
from rest_framework.serializers import Serializer

logger = logging.getLogger(__name__)

# Параметры BaseCommand и общие параметры запуска, не входящие в RunConfig.
SERVICE_OPTIONS = frozenset((
    'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
    'force_color', 'skip_checks', 'stdout', 'stderr', 'config', 'out',
    'run_id',
))


def read_config_file(path: str | Path) -> dict[str, str]:
    """Читает файл key=value.

    Значения берутся только из файла, без подстановки переменных
    окружения с теми же именами.

    Raises:
        ValidationError: Файл не читается (PARSE_ERROR).
    """
    try:
        return dict(RepositoryEnv(str(path)).data)
    except (OSError, ValueError) as exc:
        raise ValidationError(
            f'Не удалось прочитать файл параметров {path}: {exc}',
            code=ErrorCodes.PARSE_ERROR.value,
        ) from exc


def _first_error(errors, field: str = '') -> tuple[str, str]:
    if isinstance(errors, Mapping):
        key, value = next(iter(errors.items()))
        return _first_error(value, key)
    if isinstance(errors, list):
        return _first_error(errors[0], field)
    message = f'{field}: {errors}' if field else str(errors)
    return message, getattr(errors, 'code', None)


def resolve_config(
    options: Mapping,
    serializer_class: type[Serializer],
) -> dict:
    """Собирает и проверяет параметры запуска.

    Значения флагов важнее значений из файла --config. Ключи файла
    совпадают с длинными именами флагов, `-` заменяется на `_`.

    Raises:
        ValidationError: UNKNOWN_KEY или INVALID_RANGE.

    Returns:
        dict: Проверенные параметры.
    """
    data = {}
    if options.get('config'):
        data.update({
            key.strip().replace('-', '_'): value
            for key, value in read_config_file(options['config']).items()
        })
    data.update({
        key: value for key, value in options.items()
        if key not in SERVICE_OPTIONS and value is not None
    })
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        message, code = _first_error(serializer.errors)
        if code not in ErrorCodes.__members__:
            code = ErrorCodes.INVALID_RANGE.value
        raise ValidationError(message, code=code)
    return dict(serializer.validated_data)


def make_run_id(command: str, config: Mapping) -> str:
    """Хеш имени команды и параметров: одинаковый запуск - одинаковое имя.
    """
    payload = json.dumps(
        {'command': command, 'config': config},
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


class RunWriter:
    """Собирает результаты запуска и записывает их одним проходом.

    Все файлы пишутся методом `flush` после завершения расчётов:
    `<out>/<run_id>/report.txt`, таблицы CSV и `meta.json`.

    Attrs:
        command (str): Имя команды.
        config (dict): Проверенные параметры.
        run_dir (Path): Каталог запуска.
    """

    def __init__(
        self,
        command: str,
        config: Mapping,
        out: str | Path | None = None,
        run_id: str | None = None,
    ) -> None:
        self.command = command
        self.config = dict(config)
        self.run_id = run_id or make_run_id(command, self.config)
        self.run_dir = Path(out or settings.MACROFLOW_OUTPUT_DIR) / self.run_id
        self.lines: list[str] = []
        self.tables: dict[str, tuple[pd.DataFrame, dict]] = {}
        self.meta: dict = {}

    def report(self, key: str, value) -> None:
        self.lines.append(f'{key}: {value}')

    def table(self, name: str, frame: pd.DataFrame, **kwargs) -> None:
        self.tables[name] = (frame, kwargs)

    def flush(self) -> Path:
        self.run_dir.mkdir(parents=True, exist_ok=True)
        (self.run_dir / 'report.txt').write_text(
            '\n'.join(self.lines) + '\n', encoding='utf-8'
        )
        for name, (frame, kwargs) in self.tables.items():
            frame.to_csv(
                self.run_dir / name, index=False, lineterminator='\n',
                **kwargs,
            )
        meta = {
            'command': self.command,
            'run_id': self.run_id,
            'version': __version__,
            'config': {
                key: str(value) if isinstance(value, Path) else value
                for key, value in sorted(self.config.items())
            },
            'seed': self.config.get('seed'),
            **self.meta,
        }
        (self.run_dir / 'meta.json').write_bytes(
            JSONRenderer().render(meta)
        )
        logger.info('Результаты записаны в %s.', self.run_dir)
        return self.run_dir
