import math
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helixrec.errors import EvaluationError, ExpressionSyntaxError
from helixrec.intrinsics import (CONSTANTS, FUNCTIONS, Apply, BinOp, Constant, Negate, Number, Param, Variable,
                                 evaluate_constant, parse_expression)


def test_parse_structure():
    expr = parse_expression('sin(a)/(a*s)')
    assert expr == BinOp('/', Apply('sin', Param('a')), BinOp('*', Param('a'), Variable()))
    assert expr.parameters() == {'a'}


def test_parse_literal_zero():
    expr = parse_expression('0')
    assert expr == Number(0.0)
    assert expr.evaluate(12.5) == 0.0


def test_evaluate_rational():
    assert parse_expression('1/(1+s^2)').evaluate(1.0) == pytest.approx(0.5, abs=0)


@pytest.mark.parametrize('text, s, expected', [
    ('-s^2', 3.0, -9.0),
    ('2^3^2', 0.0, 512.0),
    ('2^-1', 0.0, 0.5),
    ('8/4/2', 0.0, 1.0),
    ('1-2-3', 0.0, -4.0),
    ('2*3+4*5', 0.0, 26.0),
    ('-(1+s)*2', 1.0, -4.0),
    ('e^0+pi-pi', 0.0, 1.0),
    ('arctan(1)*4', 0.0, math.pi),
    ('sqrt(s)*ln(e)', 9.0, 3.0),
])
def test_precedence(text, s, expected):
    assert parse_expression(text).evaluate(s) == pytest.approx(expected, rel=1e-15)


def test_constants_and_params():
    expr = parse_expression('a*pi+e')
    assert isinstance(expr.left.right, Constant)
    assert expr.evaluate(0.0, {'a': 2.0}) == pytest.approx(2 * math.pi + math.e)
    assert parse_expression('sin(alpha)/(a*s)').parameters() == {'alpha', 'a'}


@pytest.mark.parametrize('text', [
    'sin(a)/(a*s)',
    '(s-1)-(s-2)',
    '(2^3)^2',
    '2^3^2',
    '-2^2',
    '2^-s',
    's*(-1)',
    '--s',
    'a/(b*c)',
    'e^(pi*s)',
    '1e20*s+.5',
    'a*sin(alpha)/(a^2+s^2)',
    'cosh(sinh(tan(s)))-exp(-s/2)',
])
def test_print_round_trip(text):
    tree = parse_expression(text)
    printed = tree.render()
    assert ' ' not in printed
    assert parse_expression(printed) == tree


RESERVED = set(FUNCTIONS) | set(CONSTANTS) | {'s'}

leaves = st.one_of(
    st.builds(Number, st.floats(min_value=0.0, max_value=1e300, allow_nan=False, allow_infinity=False).map(abs)),
    st.just(Variable()),
    st.builds(Constant, st.sampled_from(sorted(CONSTANTS))),
    st.builds(Param, st.from_regex(r'[A-Za-z_][A-Za-z0-9_]{0,6}', fullmatch=True).filter(lambda n: n not in RESERVED)),
)


@st.composite
def expression_trees(draw, max_leaves=25):
    """Random syntax trees the grammar can express."""

    def extend(children):
        return st.one_of(
            st.builds(Apply, st.sampled_from(sorted(FUNCTIONS)), children),
            st.builds(Negate, children),
            st.builds(BinOp, st.sampled_from('+-*/^'), children, children),
        )

    return draw(st.recursive(leaves, extend, max_leaves=max_leaves))


@given(expression_trees())
@settings(max_examples=300, deadline=None)
def test_random_tree_round_trip(tree):
    printed = tree.render()
    assert parse_expression(printed) == tree
    assert parse_expression(printed).render() == printed


@pytest.mark.parametrize('text, offset', [
    ('', 0),
    ('   ', 0),
    ('1 +', 3),
    ('sin s', 0),
    ('foo(s)', 0),
    ('2 $ 3', 2),
    ('(1+2', 4),
    ('1+2)', 3),
    ('s s', 2),
    ('1e400', 0),
    ('s*2e308', 2),
])
def test_syntax_errors(text, offset):
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse_expression(text)
    assert excinfo.value.offset == offset
    assert str(excinfo.value).endswith(f'at byte {offset}')
    assert excinfo.value.exit_code == 2


def test_unexpected_character():
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse_expression('s+(é)')
    assert excinfo.value.offset == 3


@pytest.mark.parametrize('text, s, params', [
    ('ln(s)', 0.0, None),
    ('1/s', 0.0, None),
    ('exp(s)', 1000.0, None),
    ('sqrt(s)', -1.0, None),
    ('a*s', 1.0, None),
    ('a*s', 1.0, {'b': 1.0}),
])
def test_evaluation_errors(text, s, params):
    with pytest.raises(EvaluationError):
        parse_expression(text).evaluate(s, params)


def test_evaluate_many():
    values = parse_expression('s^2').evaluate_many([0.0, 1.0, 2.0])
    assert values.tolist() == [0.0, 1.0, 4.0]


def test_evaluate_constant():
    assert evaluate_constant('pi/3') == pytest.approx(math.pi / 3, rel=1e-15)
    assert evaluate_constant('-2^-1') == -0.5
    with pytest.raises(EvaluationError):
        evaluate_constant('s+1')


def test_negate_renders_with_parentheses():
    assert Negate(BinOp('+', Variable(), Number(1.0))).render() == '-(s+1.0)'
