from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from gerbes.exceptions import GerbeKitError, ScenarioError
from gerbes.registry import DEFAULT_SUITES, SUITES
from gerbes.reports import render_csv, render_json, summarize
from gerbes.suites import SUMMARY_COLUMNS, run_suites, summary_rows
from gerbes.tasks import RunContext


class Command(BaseCommand):
    help = 'Run property suites over the shipped scenarios; all default suites run when no name is given'

    def add_arguments(self, parser):
        parser.add_argument('names', nargs='*', help=f'Suite names: {", ".join(sorted(SUITES))}')
        parser.add_argument('--out', help='Aggregate JSON report path; the CSV summary is written next to it')
        parser.add_argument('--csv', help='CSV summary path')
        parser.add_argument('--tolerance', type=float)
        parser.add_argument('--threads', type=int)
        parser.add_argument('--seed', type=int)

    def handle(self, *args, **options):
        names = options['names'] or list(DEFAULT_SUITES)
        unknown = [name for name in names if name not in SUITES]
        if unknown:
            raise CommandError(f'Unknown suite(s): {", ".join(unknown)}', returncode=1)
        if options['tolerance'] is not None and options['tolerance'] <= 0:
            raise CommandError('--tolerance must be positive', returncode=1)

        context = None
        if any(options[key] is not None for key in ('seed', 'tolerance', 'threads')):
            context = RunContext(options['seed'], options['tolerance'], options['threads'] or 1)
        try:
            results = run_suites(names, context)
        except ScenarioError as exc:
            raise CommandError(f'{exc}\n{render_json(exc.errors)}', returncode=1)
        except GerbeKitError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=1)

        checks = [check for result in results for check in result['checks']]
        summary = summarize(checks)
        payload = {
            'suites': names,
            'scenarios': [{'suite': r['suite'], 'scenario': r['scenario'], 'report': r['report']} for r in results],
            'summary': summary,
        }
        text = render_json(payload) + '\n'
        table = render_csv(summary_rows(results), SUMMARY_COLUMNS)
        csv_path = options['csv'] or (str(Path(options['out']).with_suffix('.csv')) if options['out'] else None)
        if options['out']:
            Path(options['out']).write_text(text)
        else:
            self.stdout.write(text, ending='')
        if csv_path:
            Path(csv_path).write_text(table)
        else:
            self.stdout.write('\n' + table, ending='')

        if summary['failed']:
            raise CommandError(f'{len(summary["failed"])} check(s) failed', returncode=2)
        self.stderr.write(self.style.SUCCESS(f'{len(checks)} check(s) passed in {len(results)} scenario(s)'))
