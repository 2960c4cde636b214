from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from gerbes.exceptions import GerbeKitError, ScenarioError
from gerbes.reports import render_csv, render_json
from gerbes.suites import run_scenario_file

CHECK_COLUMNS = ['name', 'passed', 'residual']


class Command(BaseCommand):
    help = 'Run one scenario file and write its report (exit 0 all checks pass, 2 a check failed, 1 bad input)'

    def add_arguments(self, parser):
        parser.add_argument('--scenario', required=True, help='Path to the scenario JSON file')
        parser.add_argument('--out', help='Report path; standard output when omitted')
        parser.add_argument('--format', choices=['json', 'csv'], default='json')
        parser.add_argument('--tolerance', type=float, help='Override every check tolerance')
        parser.add_argument('--threads', type=int, help='Worker threads for amplitude and state-sum loops')
        parser.add_argument('--seed', type=int, help='Override the scenario seed')

    def handle(self, *args, **options):
        if options['tolerance'] is not None and options['tolerance'] <= 0:
            raise CommandError('--tolerance must be positive', returncode=1)
        if options['threads'] is not None and options['threads'] < 1:
            raise CommandError('--threads must be at least 1', returncode=1)
        overrides = {key: options[key] for key in ('tolerance', 'threads', 'seed')}
        try:
            report, checks = run_scenario_file(options['scenario'], overrides)
        except ScenarioError as exc:
            raise CommandError(f'{exc}\n{render_json(exc.errors)}', returncode=1)
        except GerbeKitError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=1)

        if options['format'] == 'csv':
            text = render_csv([check.as_dict() for check in checks], CHECK_COLUMNS)
        else:
            text = render_json(report) + '\n'
        if options['out']:
            Path(options['out']).write_text(text)
        else:
            self.stdout.write(text, ending='')

        failed = report['summary']['failed']
        if failed:
            raise CommandError(f'{len(failed)} check(s) failed: {", ".join(failed)}', returncode=2)
        self.stderr.write(self.style.SUCCESS(f'{len(checks)} check(s) passed'))
