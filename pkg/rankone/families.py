# coding: utf-8
"""Catalog of spacer families.

Each family turns a parameter map into a :class:`SpacerSchedule`. Parameters
arrive as JSON values or ``key=value`` strings from the command line and are
coerced according to the family's parameter table.
"""
import json
import math

from collections import namedtuple
from fractions import Fraction
from typing import Dict, List, Optional

from tabulate import tabulate

from rankone.enclosure import parse_fraction
from rankone.errors import InvalidParam, InvalidSchedule, UnknownFamily
from rankone.galois import check_prime, galois_field, nth_prime, power_sequence, primitive_root
from rankone.logger import logger
from rankone.rules import as_rule
from rankone.schedule import SpacerSchedule, TailDeclaration, stage_rng

Param = namedtuple('Param', ['name', 'kind', 'default', 'help'])
FamilyInfo = namedtuple('FamilyInfo', ['name', 'summary', 'provenance', 'params', 'stochastic', 'builder'])


class FamilySpec(object):
    def __init__(self, family: str, params: Optional[dict] = None, seed: Optional[int] = None,
                 start_stage: Optional[int] = None, start_height: Optional[int] = None):
        self.family = family
        self.params = dict(params or {})
        self.seed = seed
        self.start_stage = start_stage
        self.start_height = start_height

    @classmethod
    def from_config(cls, config: dict) -> 'FamilySpec':
        if 'family' not in config:
            raise InvalidParam('schedule config needs a "family" key')
        return cls(config['family'], config.get('params'), config.get('seed'),
                   config.get('start_stage'), config.get('start_height'))

    def to_config(self) -> dict:
        config = {'family': self.family, 'params': self.params}
        for key in ('seed', 'start_stage', 'start_height'):
            if getattr(self, key) is not None:
                config[key] = getattr(self, key)
        return config

    def __repr__(self):
        return f'<FamilySpec {self.family} {self.params}>'


FAMILIES: Dict[str, FamilyInfo] = {}


def family(name, summary, provenance, params=(), stochastic=False):
    def wrapper(builder):
        FAMILIES[name] = FamilyInfo(name, summary, provenance, tuple(params), stochastic, builder)
        return builder
    return wrapper


def _coerce(param: Param, value):
    if isinstance(value, str) and param.kind in ('vector', 'vectors'):
        try:
            value = json.loads(value)
        except json.JSONDecodeError as e:
            raise InvalidParam(f'{param.name}: expected a JSON list, got "{value}" ({e})')

    if param.kind == 'rule':
        return as_rule(int(value) if isinstance(value, str) and value.lstrip('-').isdigit() else value)
    if param.kind == 'rational':
        return parse_fraction(value)
    if param.kind == 'int':
        return int(value)
    if param.kind == 'prime':
        return check_prime(int(value), param.name)
    if param.kind == 'vector':
        if not isinstance(value, (list, tuple)) or not value:
            raise InvalidParam(f'{param.name}: expected a non-empty list of integers')
        return tuple(int(v) for v in value)
    if param.kind == 'vectors':
        if not isinstance(value, (list, tuple)) or not value:
            raise InvalidParam(f'{param.name}: expected a non-empty list of spacer vectors')
        return tuple(tuple(int(s) for s in v) for v in value)
    return value


def _resolve(info: FamilyInfo, params: dict) -> dict:
    known = {p.name for p in info.params}
    unknown = set(params) - known
    if unknown:
        raise InvalidParam(f'{info.name}: unknown parameters {sorted(unknown)}')

    resolved = {}
    for param in info.params:
        value = params.get(param.name, param.default)
        if value is None:
            raise InvalidParam(f'{info.name}: parameter "{param.name}" is required')
        resolved[param.name] = _coerce(param, value)
    return resolved


def _raw(info: FamilyInfo, params: dict) -> dict:
    return {p.name: params.get(p.name, p.default) for p in info.params}


def make_schedule(spec) -> SpacerSchedule:
    if isinstance(spec, dict):
        spec = FamilySpec.from_config(spec)

    info = FAMILIES.get(spec.family)
    if info is None:
        raise UnknownFamily(f'unknown family "{spec.family}", try `rankone families`')
    if info.stochastic and spec.seed is None:
        raise InvalidParam(f'{info.name} is a random family and needs a seed')

    values = _resolve(info, spec.params)
    rule, extra = info.builder(values, spec.seed)
    start_stage = spec.start_stage if spec.start_stage is not None else extra.get('start_stage', 1)
    start_height = spec.start_height if spec.start_height is not None else extra.get('start_height', 1)

    schedule = SpacerSchedule(info.name, _raw(info, spec.params), rule,
                              start_stage=start_stage, start_height=start_height,
                              seed=spec.seed, tail=extra.get('tail'))
    logger.debug(f'Built schedule {schedule!r} starting at stage {start_stage}')
    return schedule


def list_families() -> List[dict]:
    return [{'family': info.name, 'summary': info.summary,
             'params': ', '.join(p.name for p in info.params) or '-',
             'random': 'yes' if info.stochastic else ''}
            for info in FAMILIES.values()]


def describe(name: str) -> dict:
    info = FAMILIES.get(name)
    if info is None:
        raise UnknownFamily(f'unknown family "{name}"')
    return {
        'family': info.name,
        'summary': info.summary,
        'provenance': info.provenance,
        'random': info.stochastic,
        'params': [{'name': p.name, 'kind': p.kind, 'default': p.default, 'help': p.help} for p in info.params],
    }


def families_table() -> str:
    rows = [[f['family'], f['params'], f['random'], f['summary']] for f in list_families()]
    return tabulate(rows, headers=['family', 'params', 'random', 'summary'], tablefmt='rst')


def describe_table(name: str) -> str:
    doc = describe(name)
    rows = [[p['name'], p['kind'], p['default'], p['help']] for p in doc['params']]
    text = f'{doc["family"]}: {doc["summary"]}\n{doc["provenance"]}\n'
    if rows:
        text += '\n' + tabulate(rows, headers=['param', 'kind', 'default', 'description'], tablefmt='rst')
    return text


def _fixed(vector):
    vector = tuple(vector)
    return lambda schedule, j: (len(vector), vector)


def _mean(vectors) -> Fraction:
    return max(Fraction(sum(v), len(v)) for v in vectors)


@family('odometer', 'spacer-free doubling (or r_j-adic) odometer',
        'Odometer: every spacer vanishes, h_{j+1} = r_j h_j; discrete spectrum and rigid along h_j.',
        [Param('r', 'rule', 2, 'cuts per stage, an integer or an expression in j')])
def _odometer(p, seed):
    r = p['r']
    return (lambda schedule, j: (r(j), (0,) * r(j))), {'tail': TailDeclaration('mean', 0)}


@family('chacon', 'classical Chacon transformation',
        r'Chacon classical construction: $\bar s_j=(0,1)$, so $h_{j+1}=2h_j+1$; '
        r'weakly mixing, not mixing, with $\hat T^{-h_j}$ tending weakly to $\sum_k 2^{-k}\hat T^{k-1}$.')
def _chacon(p, seed):
    return _fixed((0, 1)), {'tail': TailDeclaration('mean', Fraction(1, 2))}


@family('chacon-modified', 'modified Chacon transformation',
        r'Modified Chacon construction: $\bar s_j=(0,1,0)$, $h_{j+1}=3h_j+1$; minimal self-joinings.')
def _chacon_modified(p, seed):
    return _fixed((0, 1, 0)), {'tail': TailDeclaration('mean', Fraction(1, 3))}


@family('chacon-231', 'Chacon-type construction with spacers (2,3,1)',
        r'Chacon-type construction with $\bar s_j=(2,3,1)$, $h_{j+1}=3h_j+6$.')
def _chacon_231(p, seed):
    return _fixed((2, 3, 1)), {'tail': TailDeclaration('mean', 2)}


@family('chacon-stochastic', 'stochastic Chacon: r_j = j, i.i.d. spacers in {0,1}',
        r'Stochastic Chacon construction: $r_j=j$ and $s_j(i)$ independent uniform on $\{0,1\}$; '
        'starts at stage 2 where r_j >= 2.', stochastic=True)
def _chacon_stochastic(p, seed):
    def rule(schedule, j):
        rng = stage_rng(seed, j)
        return j, tuple(int(x) for x in rng.integers(0, 2, size=j))
    return rule, {'start_stage': 2, 'tail': TailDeclaration('mean', 1)}


@family('del-junco-rudolph', 'del Junco-Rudolph: one spacer over the middle column',
        r'del Junco-Rudolph construction: $\bar s_j=(0,\dots,0,1,0,\dots,0)$ with the single spacer '
        'over column ceil(r_j/2).',
        [Param('r', 'rule', 3, 'cuts per stage')])
def _djr(p, seed):
    r = p['r']

    def rule(schedule, j):
        n = r(j)
        middle = (n + 1) // 2
        return n, tuple(1 if i == middle else 0 for i in range(1, n + 1))
    return rule, {'tail': TailDeclaration('mean', Fraction(1, 2))}


@family('katok', 'Katok: zeros over the first half, ones over the second',
        r'Katok construction: $\bar s_j=(0,\dots,0,1,\dots,1)$, ones over the last floor(r_j/2) columns.',
        [Param('r', 'rule', 4, 'cuts per stage')])
def _katok(p, seed):
    r = p['r']

    def rule(schedule, j):
        n = r(j)
        return n, (0,) * (n - n // 2) + (1,) * (n // 2)
    return rule, {'tail': TailDeclaration('mean', Fraction(1, 2))}


@family('semibounded', 'semibounded (0, s_j, 0) schedule',
        r'Semibounded construction $\bar s_j=(0,s_j,0)$; rigid when $s_j$ grows slowly, with polynomial '
        r'weak limits of $\hat T^{h_j}$.',
        [Param('s', 'rule', 'ilog(j+1, 2)', 'middle spacer s_j')])
def _semibounded(p, seed):
    s = p['s']
    tail = TailDeclaration('mean', Fraction(s(1), 3)) if s.is_constant else TailDeclaration('unknown')
    return (lambda schedule, j: (3, (0, s(j), 0))), {'tail': tail}


@family('semibounded-finite', 'finite-measure example (0, 2^j, 0, 0)',
        r'Semibounded example $\bar s_j=(0,2^j,0,0)$ with $r_j=4$; finite measure since '
        r'$\sum \frac {2^j} {h_j}<\infty$.')
def _semibounded_finite(p, seed):
    # t_{k+1} = t_k / 2 exactly
    return (lambda schedule, j: (4, (0, 2 ** j, 0, 0))), {'tail': TailDeclaration('ratio', Fraction(1, 2))}


@family('ornstein', 'Ornstein random spacers s_j(i) = H_j + a_j(i) - a_j(i+1)',
        r'Ornstein construction: $s_j(i)= b_j+a_j(i)-a_j(i+1)$ with $b_j=H_j$ and $a_j(1..r_j+1)$ '
        r'independent uniform on $\{0,\dots,H_j-1\}$; mixing almost surely.',
        [Param('r', 'rule', 64, 'cuts per stage'),
         Param('H', 'rule', 8, 'spacer base H_j')], stochastic=True)
def _ornstein(p, seed):
    r, H = p['r'], p['H']

    def rule(schedule, j):
        n, h = r(j), H(j)
        if h < 1:
            raise InvalidSchedule(f'ornstein: H_{j} = {h} must be positive')
        a = ornstein_draws(seed, j, n, h)
        return n, tuple(h + a[i] - a[i + 1] for i in range(n))

    tail = TailDeclaration('mean', H(1) + Fraction(H(1) - 1, 2)) if H.is_constant else TailDeclaration('unknown')
    return rule, {'tail': tail}


def ornstein_draws(seed: int, j: int, r: int, H: int) -> List[int]:
    """a_j(1..r_j+1), drawn from the stage's own generator."""
    return [int(x) for x in stage_rng(seed, j).integers(0, H, size=r + 1)]


@family('staircase', 'staircase s_j(i) = i',
        r'Staircase construction: $s(i)=i, \ i=1,2,\dots, r_j$; mixing when $\frac {r_j^2} {h_j}\to 0$.',
        [Param('r', 'rule', 'ilog(j+8, 2)', 'cuts per stage')])
def _staircase(p, seed):
    r = p['r']

    def rule(schedule, j):
        n = r(j)
        return n, tuple(range(1, n + 1))
    # t_{k+1}/t_k <= (2r+1)/((r+1) r) <= 5/6 while r_{k+1} <= 2 r_k
    return rule, {'tail': TailDeclaration('ratio', Fraction(5, 6))}


@family('galois-primitive', 'primitive-root spacers r_j + {q^i} - {q^(i+1)}',
        r'Finite-field construction: $r_j$ prime, $q_j$ the smallest generator of '
        r'${\bf F}_{r_j}^\times$, $s_j(i)=r_j+\{q_j^i\}-\{q_j^{i+1}\}$.',
        [Param('prime', 'rule', 'prime(j+1)', 'prime r_j')])
def _galois_primitive(p, seed):
    prime = p['prime']

    def rule(schedule, j):
        n = check_prime(prime(j), f'r_{j}')
        g = primitive_root(n)
        powers = power_sequence(n, g, n + 1, start=1)
        return n, tuple(n + powers[i] - powers[i + 1] for i in range(n))
    # t_k <= (r+1) m_k and t_k >= (r-1) m_k; consecutive primes from 3 give a ratio <= 3/4
    return rule, {'tail': TailDeclaration('ratio', Fraction(3, 4))}


@family('galois-trace', 'trace spacers b + tr(q^i) - tr(q^(i+1)) with r_j = b^n_j - 1',
        r'Finite-field trace construction: $r_j=b^{n_j}-1$, $tr(q)=\sum_{s=0}^{n-1}q^{b^s}$ and '
        r'$s_j(i)=b+tr(q^i)-tr(q^{i+1})$ for a generator $q$ of ${\bf F}_{b^{n_j}}^\times$.',
        [Param('b', 'prime', 2, 'characteristic'),
         Param('n', 'rule', 'j+1', 'field degree n_j')])
def _galois_trace(p, seed):
    b, n = p['b'], p['n']

    def rule(schedule, j):
        degree = n(j)
        field = galois_field(b, degree)
        r = field.order - 1
        traces = [field.trace(u) for u in field.powers(r + 1, start=1)]
        return r, tuple(b + traces[i] - traces[i + 1] for i in range(r))
    # q^(r+1) = q, so every stage's spacers sum to exactly r_j * b
    return rule, {'tail': TailDeclaration('mean', b)}


@family('sidon', 'Sidon spacers s_j(i) = ceil(c^i) h_j',
        r'Sidon construction: $h_j \ll s_j(1) \ll \dots \ll s_j(r_j)$ realised as $s_j(i)=\lceil c^i\rceil h_j$; '
        r'correlations satisfy $|({\hat T}^n f, f)| \leq \frac 1{r_j}$ on return lags.',
        [Param('c', 'rational', 4, 'growth ratio c > 1'),
         Param('r', 'rule', 'j+2', 'cuts per stage')])
def _sidon(p, seed):
    c, r = p['c'], p['r']
    if c <= 1:
        raise InvalidParam(f'sidon: growth ratio must exceed 1, got {c}')

    def rule(schedule, j):
        h = schedule.height(j)
        n = r(j)
        return n, tuple(math.ceil(c ** i) * h for i in range(1, n + 1))
    return rule, {'tail': TailDeclaration('infinite')}


@family('self-similar', 'self-similar spacers s_j = h_j v',
        r'Self-similar construction $\bar s_j=h_j v$, e.g. $\bar s_j=h_j(0,1)$ with '
        r'${\hat T}^{h_j}\to_w \frac 1 2 I$ and $\bar s_j=h_j(0,1,2)$, not isomorphic to its inverse.',
        [Param('v', 'vector', [0, 1], 'coefficient vector, at least two entries')])
def _self_similar(p, seed):
    v = p['v']
    if len(v) < 2 or any(x < 0 for x in v):
        raise InvalidParam(f'self-similar: v needs at least two non-negative entries, got {v}')

    def rule(schedule, j):
        h = schedule.height(j)
        return len(v), tuple(h * x for x in v)
    tail = TailDeclaration('infinite') if sum(v) else TailDeclaration('mean', 0)
    return rule, {'tail': tail}


@family('slow-growth', 'r_j takes each value r for N(r) consecutive stages, spacers (1,...,r-1,0)',
        r'Slow-growth construction: $r_j$ takes the value $r$ for $N(r)$ consecutive stages '
        r'(originally $2^{4r}$) and $\bar s_j=(1,2,\dots,r-1,0)$.',
        [Param('N', 'rule', '4*j', 'block length N(r), an expression in j standing for r'),
         Param('r0', 'int', 2, 'first value of r_j')])
def _slow_growth(p, seed):
    N, r0 = p['N'], p['r0']
    if r0 < 2:
        raise InvalidParam(f'slow-growth: r0 must be at least 2, got {r0}')

    def rule(schedule, j):
        n = slow_growth_r(N, r0, j - schedule.start_stage)
        return n, tuple(range(1, n)) + (0,)
    # one step t_{k+1} <= t_k, two steps t_{k+2} <= t_k / 2 while N(r) >= 2
    return rule, {'tail': TailDeclaration('ratio', Fraction(1, 2), step=2)}


def slow_growth_r(N, r0: int, index: int) -> int:
    """r_j for the ``index``-th stage (0-based) of a slow-growth schedule."""
    r = r0
    while True:
        block = N(r)
        if block < 2:
            raise InvalidSchedule(f'slow-growth: N({r}) = {block}, each value must repeat at least twice')
        if index < block:
            return r
        index -= block
        r += 1


def slow_growth_first_stage(N, r0: int, r: int, start_stage: int = 1) -> int:
    """First stage at which r_j = r."""
    stage = start_stage
    for value in range(r0, r):
        stage += N(value)
    return stage


@family('factorial', 'h_j = j!, r_j = j, s_j(i) = (j-1)!',
        r'Factorial construction: $h_j=j!$, $r_j=j$, $s_j(i)=(j-1)!$; starts at stage 2 with h = 2; '
        'each stage adds spacer mass exactly 1, so the measure is infinite.')
def _factorial(p, seed):
    return (lambda schedule, j: (j, (math.factorial(j - 1),) * j)), \
        {'start_stage': 2, 'start_height': 2, 'tail': TailDeclaration('infinite')}


@family('binomial', 'binomial spacers s_j(i) = C(j, i-1), r_j = j+1',
        r'Binomial construction: $r_j=j+1, \ s_j(i)=C^{i-1}_j$.')
def _binomial(p, seed):
    # t_k = 2^k m_k / (k+1), so t_{k+1} / t_k = 2 / (k+2)
    return (lambda schedule, j: (j + 1, tuple(math.comb(j, i) for i in range(j + 1)))), \
        {'tail': TailDeclaration('ratio', Fraction(2, 3))}


@family('prime-spacers', 'prime spacers (0, p(j), 0)',
        r'Prime construction $\bar s_j=(0,p(j),0)$ with $p(j)$ the j-th prime.')
def _prime_spacers(p, seed):
    # t_{k+1} / t_k = p(k+1) / (3 p(k)) < 2/3 by Bertrand's postulate
    return (lambda schedule, j: (3, (0, nth_prime(j), 0))), {'tail': TailDeclaration('ratio', Fraction(2, 3))}


@family('custom', 'explicit spacer vectors, the last one repeating',
        'Custom construction from explicit vectors; stage start+k uses vector k, the last vector repeats.',
        [Param('vectors', 'vectors', None, 'JSON list of spacer vectors')])
def _custom(p, seed):
    vectors = p['vectors']
    for v in vectors:
        if len(v) < 2 or any(s < 0 for s in v):
            raise InvalidParam(f'custom: every vector needs r >= 2 non-negative entries, got {list(v)}')

    def rule(schedule, j):
        v = vectors[min(j - schedule.start_stage, len(vectors) - 1)]
        return len(v), v
    return rule, {'tail': TailDeclaration('mean', _mean(vectors))}


PRESETS = {
    'chacon': FamilySpec('chacon'),
    'odometer': FamilySpec('odometer'),
    'self-similar-01': FamilySpec('self-similar', {'v': [0, 1]}),
    'self-similar-012': FamilySpec('self-similar', {'v': [0, 1, 2]}),
    'self-similar-03': FamilySpec('self-similar', {'v': [0, 3]}),
    'self-similar-15': FamilySpec('self-similar', {'v': [1, 5]}),
    'sidon-4': FamilySpec('sidon', {'c': 4, 'r': 'j+2'}),
    'staircase-log': FamilySpec('staircase', {'r': 'ilog(j+8, 2)'}),
    'staircase-fast': FamilySpec('staircase', {'r': '8*j'}),
    'slow-growth-desk': FamilySpec('slow-growth', {'N': '4*j'}),
    'slow-growth-faithful': FamilySpec('slow-growth', {'N': '2**(4*j)'}),
    'ornstein-64': FamilySpec('ornstein', {'r': 4096, 'H': 64}, seed=0),
    'semibounded-finite': FamilySpec('semibounded-finite'),
}


def preset(name: str) -> SpacerSchedule:
    if name not in PRESETS:
        raise UnknownFamily(f'unknown preset "{name}", known: {", ".join(sorted(PRESETS))}')
    return make_schedule(PRESETS[name])


def presets_table() -> str:
    rows = [[name, spec.family, json.dumps(spec.params) if spec.params else '-'] for name, spec in sorted(PRESETS.items())]
    return tabulate(rows, headers=['preset', 'family', 'params'], tablefmt='rst')
