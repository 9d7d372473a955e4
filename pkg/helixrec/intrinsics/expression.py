"""Scalar expressions of the arc length ``s``.

Grammar, from loosest to tightest binding::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | 's' | 'pi' | 'e' | FUNC '(' expr ')' | NAME | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-s^2`` is ``-(s^2)`` and ``2^-1`` is ``2^(-1)``.
Any other identifier is a named parameter bound at evaluation time.
"""
import math
import numpy as np
import re
from dataclasses import dataclass

from helixrec.errors import EvaluationError, ExpressionSyntaxError

__all__ = [
    'FUNCTIONS', 'CONSTANTS', 'Expr', 'Number', 'Variable', 'Constant', 'Param', 'Apply', 'Negate', 'BinOp',
    'parse_expression', 'evaluate_constant'
]

FUNCTIONS = {
    'sin': math.sin,
    'cos': math.cos,
    'tan': math.tan,
    'exp': math.exp,
    'ln': math.log,
    'sqrt': math.sqrt,
    'sinh': math.sinh,
    'cosh': math.cosh,
    'arctan': math.atan,
}
CONSTANTS = {'pi': math.pi, 'e': math.e}
VARIABLE = 's'

# binding strength used by the printer
_ADD, _MUL, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


class Expr:
    """Base class of expression nodes. Nodes are immutable and compare structurally."""

    precedence = _ATOM

    def evaluate(self, s, params=None):
        """Evaluate at arc length ``s``.

        Args:
            s (float): Arc length.
            params (Mapping[str, float] | None): Parameter values.

        Returns:
            float: A finite value.

        Raises:
            EvaluationError: Unbound parameter, math domain error, overflow or a non-finite result.
        """
        try:
            value = self._eval(float(s), params or {})
        except (ZeroDivisionError, ValueError, OverflowError) as err:
            raise EvaluationError(f'cannot evaluate {self} at s={s!r}: {err}') from err
        if not math.isfinite(value):
            raise EvaluationError(f'{self} is not finite at s={s!r}')
        return value

    def evaluate_many(self, s_values, params=None):
        return np.array([self.evaluate(s, params) for s in np.asarray(s_values, dtype=float)])

    def parameters(self):
        """Names of the parameters the expression needs."""
        return frozenset()

    def render(self):
        raise NotImplementedError

    def _eval(self, s, params):
        raise NotImplementedError

    def _render_at(self, min_precedence):
        text = self.render()
        return f'({text})' if self.precedence < min_precedence else text

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Number(Expr):
    value: float

    @property
    def precedence(self):
        return _UNARY if self.value < 0 else _ATOM

    def _eval(self, s, params):
        return self.value

    def render(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Variable(Expr):
    name: str = VARIABLE

    def _eval(self, s, params):
        return s

    def render(self):
        return self.name


@dataclass(frozen=True)
class Constant(Expr):
    name: str

    def _eval(self, s, params):
        return CONSTANTS[self.name]

    def render(self):
        return self.name


@dataclass(frozen=True)
class Param(Expr):
    name: str

    def _eval(self, s, params):
        try:
            return float(params[self.name])
        except KeyError:
            raise EvaluationError(f'parameter {self.name!r} is not bound') from None

    def parameters(self):
        return frozenset([self.name])

    def render(self):
        return self.name


@dataclass(frozen=True)
class Apply(Expr):
    func: str
    arg: Expr

    def _eval(self, s, params):
        return FUNCTIONS[self.func](self.arg._eval(s, params))

    def parameters(self):
        return self.arg.parameters()

    def render(self):
        return f'{self.func}({self.arg.render()})'


@dataclass(frozen=True)
class Negate(Expr):
    operand: Expr
    precedence = _UNARY

    def _eval(self, s, params):
        return -self.operand._eval(s, params)

    def parameters(self):
        return self.operand.parameters()

    def render(self):
        return '-' + self.operand._render_at(_UNARY)


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def precedence(self):
        return {'+': _ADD, '-': _ADD, '*': _MUL, '/': _MUL, '^': _POW}[self.op]

    def _eval(self, s, params):
        a = self.left._eval(s, params)
        b = self.right._eval(s, params)
        if self.op == '+':
            return a + b
        if self.op == '-':
            return a - b
        if self.op == '*':
            return a * b
        if self.op == '/':
            return a / b
        return math.pow(a, b)

    def parameters(self):
        return self.left.parameters() | self.right.parameters()

    def render(self):
        prec = self.precedence
        if self.op == '^':
            # base must be atomic; the exponent may carry a unary minus
            return f'{self.left._render_at(_ATOM)}^{self.right._render_at(_UNARY)}'
        # left-associative: an equally binding right operand needs parentheses
        return f'{self.left._render_at(prec)}{self.op}{self.right._render_at(prec + 1)}'


_TOKEN_RE = re.compile(r'\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)'
                       r'|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])|(?P<bad>\S))')


def _byte_offset(text, index):
    return len(text[:index].encode('utf-8'))


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            # only trailing whitespace is left
            break
        kind = match.lastgroup
        start = match.start(kind)
        if kind == 'bad':
            raise ExpressionSyntaxError(f'unexpected character {match.group(kind)!r}', text, _byte_offset(text, start))
        tokens.append((kind, match.group(kind), _byte_offset(text, start)))
        pos = match.end()
    tokens.append(('end', '', len(text.encode('utf-8'))))
    return tokens


class _Parser():
    """Recursive descent over the token list, one method per grammar rule."""

    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, message, token=None):
        token = token or self.peek()
        raise ExpressionSyntaxError(message, self.text, token[2])

    def expect(self, value):
        token = self.peek()
        if token[0] != 'op' or token[1] != value:
            found = 'end of input' if token[0] == 'end' else repr(token[1])
            self.fail(f'expected {value!r}, found {found}')
        return self.take()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != 'end':
            self.fail(f'unexpected {self.peek()[1]!r}')
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == 'op' and self.peek()[1] in '+-':
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == 'op' and self.peek()[1] in '*/':
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == 'op' and self.peek()[1] == '-':
            self.take()
            return Negate(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == 'op' and self.peek()[1] == '^':
            self.take()
            return BinOp('^', base, self.unary())
        return base

    def primary(self):
        token = self.peek()
        kind, value = token[0], token[1]
        if kind == 'number':
            number = float(value)
            if not math.isfinite(number):
                self.fail(f'number {value} is out of range', token)
            self.take()
            return Number(number)
        if kind == 'name':
            self.take()
            is_call = self.peek()[0] == 'op' and self.peek()[1] == '('
            if value in FUNCTIONS:
                if not is_call:
                    self.fail(f'function {value!r} needs an argument list', token)
                self.take()
                arg = self.expr()
                self.expect(')')
                return Apply(value, arg)
            if is_call:
                self.fail(f'unknown function {value!r}', token)
            if value == VARIABLE:
                return Variable()
            if value in CONSTANTS:
                return Constant(value)
            return Param(value)
        if kind == 'op' and value == '(':
            self.take()
            node = self.expr()
            self.expect(')')
            return node
        if kind == 'end':
            self.fail('unexpected end of input')
        self.fail(f'unexpected {value!r}')


def parse_expression(text):
    """Parse expression text into an :class:`Expr` tree.

    Args:
        text (str): Expression source, e.g. ``'sin(alpha)/(a*s)'``.

    Returns:
        Expr: The syntax tree. Unknown identifiers become :class:`Param` nodes.

    Raises:
        ExpressionSyntaxError: Empty input or text outside the grammar; ``offset`` points at the offending byte.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionSyntaxError('empty expression', text if isinstance(text, str) else '', 0)
    return _Parser(text).parse()


def evaluate_constant(text, params=None):
    """Parse and evaluate a parameter-free expression such as ``'pi/3'``; ``s`` is not allowed."""
    expr = parse_expression(text)
    if Variable() in _walk(expr):
        raise EvaluationError(f'{text!r} must not depend on s')
    return expr.evaluate(0.0, params)


def _walk(node):
    yield node
    for child in (getattr(node, 'arg', None), getattr(node, 'operand', None), getattr(node, 'left', None),
                  getattr(node, 'right', None)):
        if isinstance(child, Expr):
            yield from _walk(child)
