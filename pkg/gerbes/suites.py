"""
Scenario loading and property suites over the shipped fixtures.
"""

import json
import logging
from pathlib import Path

from . import registry
from .conf import setting
from .exceptions import ScenarioError
from .serializers import ScenarioSerializer
from .tasks import RunContext, execute

logger = logging.getLogger(__name__)

FIXTURES = Path(__file__).resolve().parent / 'fixtures'


def parse_scenario(text, source='<scenario>', base_dir=None):
    """Validated scenario data and the raw inputs as written; file references resolve against ``base_dir``"""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f'{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}',
                            {'json': [f'line {exc.lineno}, column {exc.colno}: {exc.msg}']}) from None
    if not isinstance(raw, dict):
        raise ScenarioError(f'{source}: a scenario is a JSON object', {'non_field_errors': ['expected an object']})
    serializer = ScenarioSerializer(data=raw, context={'base_dir': base_dir})
    if not serializer.is_valid():
        raise ScenarioError(f'{source}: scenario does not match the schema', serializer.errors)
    return serializer.validated_data, raw.get('inputs', {})


def load_scenario(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f'cannot read {path}: {exc.strerror}', {'scenario': [str(path)]}) from None
    return parse_scenario(text, str(path), path.parent)


def fixture_path(name):
    return FIXTURES / f'{name}.json'


def run_scenario_file(path, overrides=None):
    scenario, raw_inputs = load_scenario(path)
    context = _context(scenario, overrides or {})
    return execute(scenario, raw_inputs, context)


def _context(scenario, overrides):
    seed = overrides.get('seed')
    if seed is None:
        seed = scenario.get('seed', setting('SEED'))
    tolerance = overrides.get('tolerance')
    if tolerance is None:
        tolerance = scenario.get('tolerance')
    threads = overrides.get('threads') or setting('THREADS')
    return RunContext(seed, tolerance, threads)


def run_suites(names, context=None):
    """Run every fixture of the named suites; one entry per scenario, in suite order"""
    unknown = [name for name in names if name not in registry.SUITES]
    if unknown:
        raise ScenarioError(f'unknown suite {", ".join(unknown)}', {'names': unknown})
    overrides = {}
    if context is not None:
        overrides = {'seed': context.seed, 'tolerance': context.tolerance, 'threads': context.threads}
    results = []
    for name in names:
        for fixture in registry.SUITES[name]:
            logger.info('suite %s: running %s', name, fixture)
            report, checks = run_scenario_file(fixture_path(fixture), overrides)
            results.append({'suite': name, 'scenario': fixture, 'report': report, 'checks': checks})
    return results


def summary_rows(results):
    """One CSV row per check"""
    rows = []
    for result in results:
        for check in result['checks']:
            rows.append({'suite': result['suite'], 'scenario': result['scenario'], 'check': check.name,
                         'passed': check.passed, 'residual': check.residual})
    return rows


SUMMARY_COLUMNS = ['suite', 'scenario', 'check', 'passed', 'residual']
