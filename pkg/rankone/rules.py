# coding: utf-8
"""Stage rules: integer-valued functions of the stage index ``j``.

A rule is either a plain integer or a sympy expression in ``j`` such as
``"j+2"``, ``"floor(log(j+8, 2))"`` or ``"2**j"``. Values are evaluated exactly
and memoized per rule.
"""
from functools import lru_cache

import sympy
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from rankone.errors import InvalidParam

J = sympy.Symbol('j', integer=True, positive=True)


class ilog(sympy.Function):
    """Exact floor of log_b(x) for positive integers."""

    @classmethod
    def eval(cls, x, b):
        if x.is_Integer and b.is_Integer:
            x, b = int(x), int(b)
            if x < 1 or b < 2:
                raise InvalidParam(f'ilog needs x >= 1 and b >= 2, got x={x}, b={b}')
            e = 0
            while x >= b:
                x //= b
                e += 1
            return sympy.Integer(e)


class nth_prime(sympy.Function):
    """The n-th prime (prime(1) = 2) for integer arguments, unevaluated otherwise."""

    @classmethod
    def eval(cls, n):
        if n.is_Integer:
            if int(n) < 1:
                raise InvalidParam(f'prime index must be positive, got {n}')
            return sympy.Integer(sympy.sieve[int(n)])


_ALLOWED = {
    'j': J,
    'floor': sympy.floor,
    'ceiling': sympy.ceiling,
    'ceil': sympy.ceiling,
    'log': sympy.log,
    'ilog': ilog,
    'sqrt': sympy.sqrt,
    'factorial': sympy.factorial,
    'binomial': sympy.binomial,
    'prime': nth_prime,
    'Min': sympy.Min,
    'Max': sympy.Max,
}


class StageRule(object):
    def __init__(self, source):
        if isinstance(source, StageRule):
            source = source.source
        if isinstance(source, bool):
            raise InvalidParam(f'rule must be an integer or an expression in j, got {source!r}')

        self.source = source
        if isinstance(source, int):
            self.expr = sympy.Integer(source)
        else:
            try:
                self.expr = parse_expr(str(source), local_dict=dict(_ALLOWED), global_dict={
                    'Integer': sympy.Integer, 'Rational': sympy.Rational, 'Float': sympy.Float,
                    'Symbol': sympy.Symbol,
                }, transformations=standard_transformations)
            except Exception as e:
                raise InvalidParam(f'cannot parse stage rule "{source}": {e}')

            unknown = self.expr.free_symbols - {J}
            if unknown:
                raise InvalidParam(f'stage rule "{source}" uses unknown symbols {sorted(map(str, unknown))}')

        self._value = lru_cache(maxsize=None)(self._evaluate)

    @property
    def is_constant(self) -> bool:
        return not self.expr.free_symbols

    def _evaluate(self, j: int) -> int:
        value = self.expr.subs(J, j) if self.expr.free_symbols else self.expr
        if not value.is_Integer:
            value = sympy.floor(value)
            if not value.is_Integer:
                raise InvalidParam(f'stage rule "{self.source}" is not integer valued at j={j}: {value}')
        return int(value)

    def __call__(self, j: int) -> int:
        return self._value(int(j))

    def to_config(self):
        return self.source

    def __eq__(self, other):
        return isinstance(other, StageRule) and str(self.source) == str(other.source)

    def __hash__(self):
        return hash(str(self.source))

    def __repr__(self):
        return f'<StageRule {self.source}>'


def as_rule(value) -> StageRule:
    return value if isinstance(value, StageRule) else StageRule(value)
