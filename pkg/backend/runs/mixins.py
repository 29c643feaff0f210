"""Модуль содержит базовый класс команд расчёта.
"""
import logging
from argparse import ArgumentParser

from core import texts
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from rest_framework.serializers import Serializer
from runs.services import RunWriter, resolve_config

logger = logging.getLogger(__name__)


class RunCommand(BaseCommand):
    """
    Основа команд, выполняющих один воспроизводимый запуск.

    Параметры собираются из `--config` и флагов, проверяются
    сериализатором `serializer_class` и передаются в `run`. Все флаги
    параметров имеют `default=None`, чтобы значения из файла применялись,
    если флаг не указан.

    Example:
        class Command(RunCommand):
            serializer_class = ExampleSerializer

            def add_run_arguments(self, parser):
                parser.add_argument('--beta', type=float)

            def run(self, config, writer):
                writer.report('beta', config['beta'])
                return True
    """

    serializer_class: type[Serializer] | None = None

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument('--config', help=texts.HELP_CONFIG)
        parser.add_argument('--out', help=texts.HELP_OUT)
        parser.add_argument('--run-id', help=texts.HELP_RUN_ID)
        self.add_run_arguments(parser)

    def add_run_arguments(self, parser: ArgumentParser) -> None:
        raise NotImplementedError

    def run(self, config: dict, writer: RunWriter) -> bool:
        """Выполняет расчёт и наполняет writer.

        Returns:
            bool: Все запрошенные проверки пройдены.
        """
        raise NotImplementedError

    def handle(self, *args, **options) -> None:
        command = self.__module__.rsplit('.', 1)[-1]
        try:
            config = resolve_config(options, self.serializer_class)
            writer = RunWriter(
                command, config, options.get('out'), options.get('run_id')
            )
            passed = self.run(config, writer)
        except ValidationError as exc:
            raise CommandError(
                f'{exc.code}: {"; ".join(exc.messages)}'
            ) from exc

        writer.report('verdict', 'PASS' if passed else 'FAIL')
        run_dir = writer.flush()
        self.stdout.write(str(run_dir))
        if not passed:
            raise CommandError(f'FAIL: проверки не пройдены, см. {run_dir}.')
