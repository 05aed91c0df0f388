# coding: utf-8
"""Experiment configs, the operation registry and reproducible runs."""
import os
import time

from collections import namedtuple
from typing import Dict, List, Optional

from rankone import __version__, analysis, constant, spectral, statlemma
from rankone.enclosure import MeasureEnclosure, parse_fraction
from rankone.engine import MODES, CorrelationSeries, Engine
from rankone.errors import BudgetExceeded, ConfigError, UnknownFamily, UnknownOperation
from rankone.families import FAMILIES, PRESETS, make_schedule
from rankone.galois import primes_below, validate_all_windows
from rankone.logger import logger
from rankone.serializer import config_hash, serialize_csv, serialize_density, serialize_json
from rankone.spacers import staircase_monitor, triangular_distance
from rankone.sumset import base_correlation_fast
from rankone.tower import LevelSet, measure_class, total_measure, tower_sequence
from rankone.utils import parse_lags

CONFIG_KEYS = ('schedule', 'operation', 'params', 'tol', 'max_stage', 'size_cap', 'max_extra_stages', 'seed',
               'threads', 'output')
FORMATS = ('json', 'csv')

Operation = namedtuple('Operation', ['name', 'fn', 'needs_schedule', 'help'])
OPERATIONS: Dict[str, Operation] = {}


def operation(name: str, help: str, needs_schedule: bool = True):
    def wrapper(fn):
        OPERATIONS[name] = Operation(name, fn, needs_schedule, help)
        return fn
    return wrapper


class ExperimentConfig(object):
    def __init__(self, operation: str, schedule: Optional[dict] = None, params: Optional[dict] = None, tol=None,
                 max_stage: Optional[int] = None, size_cap: Optional[int] = None,
                 max_extra_stages: Optional[int] = None, seed: Optional[int] = None, threads: Optional[int] = None,
                 output: Optional[dict] = None):
        self.schedule = dict(schedule or {})
        self.operation = operation
        self.params = dict(params or {})
        self.tol = tol
        self.max_stage = max_stage
        self.size_cap = size_cap
        self.max_extra_stages = max_extra_stages
        self.seed = seed
        self.threads = threads
        self.output = dict(output or {})

    @classmethod
    def from_dict(cls, data: dict) -> 'ExperimentConfig':
        if not isinstance(data, dict):
            raise ConfigError('experiment config must be a JSON object')
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f'unknown config keys {sorted(unknown)}')
        if 'operation' not in data:
            raise ConfigError('experiment config needs an "operation"')
        return cls(**{key: data[key] for key in CONFIG_KEYS if key in data})

    def to_dict(self) -> dict:
        config = {}
        for key in CONFIG_KEYS:
            value = getattr(self, key)
            if value is not None and value != {}:
                config[key] = value
        return config

    @property
    def hash(self) -> str:
        config = self.to_dict()
        output = {k: v for k, v in config.pop('output', {}).items() if k != 'path'}
        if output:
            config['output'] = output
        return config_hash(config)

    @property
    def format(self) -> str:
        return self.output.get('format') or constant.CONFIG['format']

    @property
    def precision(self) -> int:
        precision = self.output.get('precision')
        return int(constant.CONFIG['precision'] if precision is None else precision)

    @property
    def budgets(self) -> dict:
        return {'size_cap': self.size_cap, 'max_extra_stages': self.max_extra_stages, 'max_stage': self.max_stage,
                'threads': self.threads}

    @property
    def resolved_schedule(self) -> dict:
        """The schedule block with a preset name expanded and the run seed filled in."""
        config = dict(self.schedule)
        name = config.get('family')
        if name not in FAMILIES and name in PRESETS:
            preset = PRESETS[name].to_config()
            params = dict(preset.get('params') or {}, **(config.get('params') or {}))
            config = dict(preset, **{k: v for k, v in config.items() if k != 'family'})
            config['params'] = params
        if self.schedule.get('seed') is None and self.seed is not None:
            config['seed'] = self.seed
        return config

    def validate(self):
        op = OPERATIONS.get(self.operation)
        if op is None:
            raise UnknownOperation(f'unknown operation "{self.operation}", known: {", ".join(sorted(OPERATIONS))}')
        if self.format not in FORMATS:
            raise ConfigError(f'output format must be one of {FORMATS}, got "{self.format}"')
        if self.precision < 0 or self.precision > constant.MAX_PRECISION:
            raise ConfigError(f'precision must lie in [0, {constant.MAX_PRECISION}]')
        if not op.needs_schedule:
            return

        schedule = self.resolved_schedule
        family = schedule.get('family')
        if family is None:
            raise ConfigError(f'operation "{self.operation}" needs a schedule with a "family"')
        if family not in FAMILIES:
            raise UnknownFamily(f'unknown family "{family}", try `rankone families`')
        if FAMILIES[family].stochastic and schedule.get('seed') is None:
            raise ConfigError(f'{family} is a random family, the config needs a seed')

    def build_schedule(self):
        return make_schedule(self.resolved_schedule)

    def __repr__(self):
        return f'<ExperimentConfig {self.operation} {self.schedule.get("family")}>'


class Outcome(object):
    def __init__(self, result: dict, series: Optional[CorrelationSeries] = None, density=None,
                 exceeded: List = ()):
        self.result = result
        self.series = series
        self.density = density
        self.exceeded = list(exceeded)


class RunRecord(object):
    def __init__(self, config_hash: str, operation: str, wall_time: float, outputs: List[str], max_width,
                 exceeded: List, exit_code: int, result: dict, series: Optional[CorrelationSeries] = None):
        self.config_hash = config_hash
        self.version = __version__
        self.operation = operation
        # the only field that differs between identical runs
        self.wall_time = wall_time
        self.outputs = outputs
        self.max_width = max_width
        self.exceeded = exceeded
        self.exit_code = exit_code
        self.result = result
        self.series = series

    @property
    def complete(self) -> bool:
        return not self.exceeded

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'config_hash': self.config_hash,
            'version': self.version,
            'operation': self.operation,
            'wall_time': round(self.wall_time, 3),
            'outputs': [os.path.basename(p) for p in self.outputs],
            'max_width': self.max_width,
            'budget_exceeded': bool(self.exceeded),
            'exceeded': [str(n) for n in self.exceeded],
            'exit_code': self.exit_code,
        }

    def __repr__(self):
        return f'<RunRecord {self.operation} exit={self.exit_code}>'


class RunContext(object):
    """Parameters of one run, with typed accessors for the operation parameters."""

    def __init__(self, config: ExperimentConfig, schedule=None):
        self.config = config
        self.schedule = schedule
        self.params = config.params
        self.tol = config.tol
        self.budgets = config.budgets

    def get(self, key, default=None):
        return self.params.get(key, default)

    def int(self, key, default=None) -> int:
        value = self.params.get(key, default)
        if value is None:
            raise ConfigError(f'operation "{self.config.operation}" needs the parameter "{key}"')
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f'parameter "{key}" must be an integer, got {value!r}')

    def optional_int(self, key) -> Optional[int]:
        return None if self.params.get(key) is None else self.int(key)

    def lags(self, key, default=None) -> List[int]:
        value = self.params.get(key, default)
        if value is None:
            raise ConfigError(f'operation "{self.config.operation}" needs the parameter "{key}"')
        height = self.schedule.height if self.schedule is not None else None
        return parse_lags(value, height)

    def level_set(self, key, default=None) -> LevelSet:
        spec = self.params.get(key, default)
        if spec is None:
            raise ConfigError(f'operation "{self.config.operation}" needs the level set "{key}"')
        return level_set(self.schedule, spec)


def level_set(schedule, spec) -> LevelSet:
    """``3:base``, ``3:full``, ``3:odd``, ``3:even``, ``3:0,2,5`` or the equivalent dict."""
    if isinstance(spec, LevelSet):
        return spec
    if isinstance(spec, str):
        stage, _, what = spec.partition(':')
        spec = {'stage': stage, 'kind': what or 'base'}
    if not isinstance(spec, dict) or 'stage' not in spec:
        raise ConfigError(f'invalid level set {spec!r}')

    try:
        stage = int(spec['stage'])
    except (TypeError, ValueError):
        raise ConfigError(f'invalid level set stage {spec["stage"]!r}')
    if spec.get('levels') is not None:
        return LevelSet(schedule, stage, parse_lags(spec['levels']))

    kind = spec.get('kind', 'base')
    if kind == 'base':
        return LevelSet.base(schedule, stage)
    if kind == 'full':
        return LevelSet.full(schedule, stage)
    if kind in ('odd', 'even'):
        return LevelSet.every_other(schedule, stage, 0 if kind == 'odd' else 1)
    return LevelSet(schedule, stage, parse_lags(kind))


# operations

@operation('correlation', 'mu(T^n A ∩ B) over a lag list (method escape, fast or auto)')
def _correlation(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A')
    B = ctx.level_set('B', A)
    lags = ctx.lags('lags')
    method = ctx.get('method', 'escape')
    mode = ctx.get('mode', 'raw')
    if mode not in MODES:
        raise ConfigError(f'unknown normalization mode "{mode}", expected one of {MODES}')
    measure_stage = ctx.optional_int('measure_stage')

    if method == 'escape':
        engine = Engine(ctx.schedule, ctx.tol, **ctx.budgets)
        series = engine.correlation_series(A, B, lags, mode=mode, measure_stage=measure_stage)
    elif method in ('fast', 'auto'):
        if method == 'fast':
            if A != B:
                raise ConfigError('the fast method correlates a level set with itself')
            series = base_correlation_fast(ctx.schedule, A.stage, lags, A.levels, ctx.tol,
                                           ctx.budgets['size_cap'], ctx.budgets['max_extra_stages'])
            stage = A.stage
        else:
            stage = max(A.stage, B.stage)
            correlate = analysis.Correlator(ctx.schedule, stage, ctx.tol, **ctx.budgets)
            results = correlate.pool.map(lambda n: analysis._budgeted(correlate, A, n, B), lags)
            series = CorrelationSeries(A, B, lags, [v for v, _ in results], 'raw',
                                       [n for n, (_, flag) in zip(lags, results) if flag])
        if mode != 'raw':
            engine = Engine(ctx.schedule, ctx.tol, **ctx.budgets)
            if measure_stage is None:
                measure_stage = stage + (ctx.budgets['max_extra_stages'] or constant.CONFIG['max_extra_stages'])
            total = total_measure(ctx.schedule, measure_stage)
            values = [engine.normalize(v, A, B, mode, total) for v in series.values]
            series = CorrelationSeries(A, B, series.lags, values, mode, series.exceeded)
    else:
        raise ConfigError(f'unknown method "{method}", expected escape, fast or auto')

    result = {'A': A, 'B': B, 'mode': series.mode, 'method': method, 'complete': series.complete,
              'max_width': series.max_width()}
    if mode == 'raw':
        result['return_sum'] = analysis.return_sum(series)
    return Outcome(result, series=series, exceeded=series.exceeded)


@operation('triple', 'mu(T^n1 A ∩ T^n2 B ∩ C) for n1 >= n2 >= 0')
def _triple(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A')
    B = ctx.level_set('B', A)
    C = ctx.level_set('C', A)
    n1, n2 = ctx.int('n1'), ctx.int('n2')
    engine = Engine(ctx.schedule, ctx.tol, **ctx.budgets)
    return Outcome({'n1': n1, 'n2': n2, 'value': engine.triple_intersection(A, n1, B, n2, C)})


@operation('weak-limit-fit', 'fit T^p ~ sum a_k T^k + theta over stage level indicators')
def _weak_limit_fit(ctx: RunContext) -> Outcome:
    window = ctx.get('window', [0, 10])
    if isinstance(window, str):
        window = [int(x) for x in window.replace('..', ',').split(',')]
    fit = analysis.weak_limit_fit(ctx.schedule, ctx.lags('powers'), window, ctx.optional_int('test_stage'),
                                  ctx.tol, ctx.optional_int('measure_stage'), **ctx.budgets)
    return Outcome({'fit': fit})


@operation('averaging-deviation', '||Q_{j,p} f - Theta f||^2 for a level set f')
def _averaging_deviation(ctx: RunContext) -> Outcome:
    report = analysis.averaging_deviation(ctx.schedule, ctx.int('j'), ctx.int('p'), ctx.level_set('f'), ctx.tol,
                                          ctx.optional_int('measure_stage'), **ctx.budgets)
    return Outcome({'deviation': report})


@operation('stat-lemma', 'Monte Carlo fraction of f with D(f, m) < eps r', needs_schedule=False)
def _stat_lemma(ctx: RunContext) -> Outcome:
    seed = ctx.get('seed', ctx.config.seed)
    if seed is None:
        raise ConfigError('stat-lemma needs a seed')
    ms = ctx.get('ms')
    sample = statlemma.stat_lemma_mc(ctx.int('r'), ctx.int('L'), parse_fraction(ctx.get('eps', '1/10')),
                                     ctx.int('trials', 200), int(seed), None if ms is None else parse_lags(ms))
    return Outcome({'sample': sample})


@operation('tensor-closeness', '||P F - Q_r F||^2 against ||F||^2 / M + eps for F = f (x) f')
def _tensor_closeness(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A') if ctx.get('A') is not None else None
    reports = analysis.tensor_closeness_scan(ctx.schedule, ctx.lags('r'), ctx.get('M', '2*j'), A=A, tol=ctx.tol,
                                             stride=ctx.optional_int('stride'),
                                             measure_stage=ctx.optional_int('measure_stage'), **ctx.budgets)
    decreasing = all(b.lhs.mid < a.lhs.mid for a, b in zip(reports, reports[1:]))
    return Outcome({'reports': reports, 'lhs_decreasing': decreasing})


@operation('staircase-anomaly', 'mu(T^(2h_j) A_j ∩ A_j) / mu(X) - (mu(A_j) / mu(X))^2')
def _staircase_anomaly(ctx: RunContext) -> Outcome:
    stages = ctx.lags('j')
    levels = ctx.get('levels', 'odd')
    values = [{'stage': j, 'anomaly': analysis.staircase_anomaly(ctx.schedule, j, levels, ctx.tol,
                                                                 ctx.optional_int('measure_stage'),
                                                                 **ctx.budgets)}
              for j in stages]
    return Outcome({'values': values, 'monitor': staircase_monitor(ctx.schedule, stages)})


@operation('asymmetry', 'triple correlations along h_j, 2h_j, 3h_j')
def _asymmetry(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A', '3:base')
    values = []
    for j in ctx.lags('j'):
        first, second = analysis.asymmetry_test(ctx.schedule, A, j, ctx.tol, **ctx.budgets)
        values.append({'stage': j, 'first': first, 'second': second})
    return Outcome({'A': A, 'expected_first': MeasureEnclosure.point(A.measure / 3), 'values': values})


@operation('class-alpha', 'limsup of mu(union of T^n A over F_j | A)')
def _class_alpha(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A')
    window = analysis.window_rule(ctx.lags('offsets', '0'), ctx.get('anchor', 'height'))
    report = analysis.class_alpha(ctx.schedule, A, window, ctx.int('J_max'), ctx.tol, **ctx.budgets)
    return Outcome({'alpha': report}, exceeded=report.exceeded)


@operation('rigidity-scan', 'mu(T^n A △ A) over lags or a semibounded lag chain')
def _rigidity_scan(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A')
    if ctx.get('chain') is not None:
        lags = analysis.semibounded_rigidity_lags(ctx.schedule, ctx.int('chain'), ctx.int('depth', 3))
    else:
        lags = ctx.lags('lags')
    series = analysis.rigidity_scan(ctx.schedule, A, lags, ctx.tol, **ctx.budgets)
    return Outcome({'A': A, 'lags': [str(n) for n in series.lags]}, series=series, exceeded=series.exceeded)


@operation('mixing-scan', 'sup of |mu(T^n A ∩ B) - mu(A) mu(B) / mu(X)| over lags')
def _mixing_scan(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A')
    B = ctx.level_set('B', A)
    report = analysis.mixing_scan(ctx.schedule, A, B, ctx.lags('lags'), ctx.tol, ctx.optional_int('measure_stage'),
                                  **ctx.budgets)
    return Outcome({'mixing': report}, series=report.deviations, exceeded=report.deviations.exceeded)


@operation('spectral', 'Wiener average and Fejér density of the centered correlation series')
def _spectral(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A')
    N = ctx.int('N')
    engine = Engine(ctx.schedule, ctx.tol, **ctx.budgets)
    series = engine.correlation_series(A, A, range(N), mode='centered',
                                       measure_stage=ctx.optional_int('measure_stage'))
    density = spectral.spectral_density(series, N, ctx.int('grid', 256))
    result = {'N': N, 'wiener_average': spectral.wiener_average(series, N), 'complete': series.complete}
    return Outcome(result, series=series, density=density, exceeded=series.exceeded)


@operation('triangular-distance', 'total variation between pooled S - pH histograms and the triangular law')
def _triangular_distance(ctx: RunContext) -> Outcome:
    stages = ctx.lags('stages')
    distances = [{'p': p, 'distance': triangular_distance(ctx.schedule, stages, p)} for p in ctx.lags('p')]
    return Outcome({'stages': stages, 'distances': distances})


@operation('injectivity', 'difference injectivity of primitive-root windows for primes below a bound',
           needs_schedule=False)
def _injectivity(ctx: RunContext) -> Outcome:
    primes = [p for p in primes_below(ctx.int('below', 10 ** 4)) if p > 2]
    failures = [p for p in primes if not validate_all_windows(p)]
    return Outcome({'primes': len(primes), 'failures': failures, 'holds': not failures})


@operation('total-measure', 'enclosure of mu(X) from the stage-J tower and the tail declaration')
def _total_measure(ctx: RunContext) -> Outcome:
    J = ctx.int('J')
    return Outcome({'stage': J, 'measure': total_measure(ctx.schedule, J), 'class': measure_class(ctx.schedule)})


@operation('stages', 'stage vectors and heights up to stage J')
def _stages(ctx: RunContext) -> Outcome:
    return Outcome({'schedule': ctx.schedule.to_config(), 'stages': tower_sequence(ctx.schedule, ctx.int('J', 8))})


@operation('binomial-products', 'exponent law of products of spacer averages P_j')
def _binomial_products(ctx: RunContext) -> Outcome:
    return Outcome({'law': analysis.binomial_products(ctx.schedule, ctx.lags('stages'))})


@operation('prime-average', '(1/N) sum over the first N primes p of mu(T^p A ∩ A)')
def _prime_average(ctx: RunContext) -> Outcome:
    A = ctx.level_set('A')
    return Outcome({'A': A, 'N': ctx.int('N'),
                    'value': analysis.prime_average(ctx.schedule, A, ctx.int('N'), ctx.tol, **ctx.budgets)})


# runs

def _max_width(outcome: Outcome):
    if outcome.series is None:
        return None
    return outcome.series.max_width()


def _series_rows(series: CorrelationSeries) -> List[dict]:
    return [{'lag': str(n), 'value': v} for n, v in series]


def run(config: ExperimentConfig) -> RunRecord:
    """Executes the configured operation and writes its outputs; budget overruns are flagged, not hidden."""
    config.validate()
    op = OPERATIONS[config.operation]
    started = time.perf_counter()
    logger.info(f'Running {config.operation} ({config.hash[:12]})')

    schedule = config.build_schedule() if op.needs_schedule else None
    try:
        outcome = op.fn(RunContext(config, schedule))
    except BudgetExceeded as e:
        logger.error(f'Budget exceeded: {e}')
        outcome = Outcome({'error': str(e), 'partial': e.partial}, exceeded=['operation'])

    exit_code = constant.EXIT_BUDGET_EXCEEDED if outcome.exceeded else constant.EXIT_OK
    path = config.output.get('path')
    tabular = outcome.series is not None or outcome.density is not None
    outputs = []
    if path:
        if config.format == 'csv':
            json_path = os.path.splitext(path)[0] + '.json'
            outputs = [path, json_path] if tabular else [json_path]
        else:
            json_path = path
            outputs = [path]

    record = RunRecord(config.hash, config.operation, time.perf_counter() - started, outputs,
                       _max_width(outcome), outcome.exceeded, exit_code, outcome.result, outcome.series)

    if path:
        if config.format == 'csv' and tabular:
            if outcome.density is not None:
                serialize_density(outcome.density, path, config.precision)
            else:
                serialize_csv(outcome.series, path, config.precision)
        document = {'record': record, 'config': config.to_dict(), 'result': outcome.result}
        if config.format == 'json':
            if outcome.series is not None:
                document['series'] = _series_rows(outcome.series)
            if outcome.density is not None:
                document['density'] = [{'angle': a, 'value': v, 'radius': r} for a, v, r in outcome.density]
        serialize_json(document, json_path, config.precision)
        logger.info(f'Wrote {", ".join(outputs)}')

    return record


def run_dict(data: dict) -> RunRecord:
    return run(ExperimentConfig.from_dict(data))
