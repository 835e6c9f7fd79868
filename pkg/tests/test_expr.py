from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoagents.expr import (Binary, ExprEvalError, ExprSyntaxError, Field, Lit, Unary, compile_expression, evaluate,
                            field_refs, parse_expression, to_source, tokenize)

# ---------------------------------------------------------------------------
# reference parenthesization: a shunting-yard parser over the same token set
# ---------------------------------------------------------------------------

PREC = {"or": 1, "and": 2, "not": 3, "==": 4, "<": 4, "+": 5, "-": 5, "*": 6, "neg": 7}
CMP = {"==", "<"}
OPERAND = {"a", "1"}
NOT_OK_AFTER = {None, "(", "and", "or", "not"}


class Bad(Exception):
    pass


def oracle_parenthesize(tokens):
    out: list[str] = []
    ops: list[str] = []

    def reduce():
        op = ops.pop()
        if op in ("not", "neg"):
            if not out:
                raise Bad
            x = out.pop()
            out.append(f"(not {x})" if op == "not" else f"(-{x})")
        else:
            if len(out) < 2:
                raise Bad
            r, l = out.pop(), out.pop()
            out.append(f"({l} {op} {r})")

    expect_operand = True
    prev = None
    for t in tokens:
        if expect_operand:
            if t in OPERAND:
                out.append(t)
                expect_operand = False
            elif t == "(":
                ops.append("(")
            elif t == "not":
                if prev not in NOT_OK_AFTER:
                    raise Bad
                ops.append("not")
            elif t == "-":
                ops.append("neg")
            else:
                raise Bad
        else:
            if t == ")":
                while ops and ops[-1] != "(":
                    reduce()
                if not ops:
                    raise Bad
                ops.pop()
            elif t in ("or", "and", "==", "<", "+", "-", "*"):
                p = PREC[t]
                while ops and ops[-1] != "(" and PREC[ops[-1]] >= p:
                    if ops[-1] in CMP and t in CMP:
                        raise Bad  # comparisons do not chain
                    reduce()
                ops.append(t)
                expect_operand = True
            else:
                raise Bad
        prev = t
    if expect_operand:
        raise Bad
    while ops:
        if ops[-1] == "(":
            raise Bad
        reduce()
    if len(out) != 1:
        raise Bad
    return out[0]


ALPHABET = ["a", "1", "not", "-", "+", "*", "==", "<", "and", "or", "(", ")"]


def test_precedence_exhaustive_up_to_4_tokens():
    checked = valid = 0
    for n in range(1, 5):
        for toks in itertools.product(ALPHABET, repeat=n):
            src = " ".join(toks)
            try:
                want = oracle_parenthesize(toks)
            except Bad:
                want = None
            try:
                got = to_source(parse_expression(src))
            except ExprSyntaxError:
                got = None
            assert got == want, src
            checked += 1
            valid += want is not None
    assert checked == sum(12 ** k for k in range(1, 5))
    assert valid == 150


# ---------------------------------------------------------------------------
# parse examples
# ---------------------------------------------------------------------------

def test_simple_comparison():
    assert parse_expression("p > 1000") == Binary(">", Field("p"), Lit(1000))


def test_ratio_comparison():
    e = parse_expression("ratio_pove < 0.05")
    assert e == Binary("<", Field("ratio_pove"), Lit(0.05))


def test_not_over_or():
    e = parse_expression("not (a == 1 or b == 2)")
    assert e == Unary("not", Binary("or", Binary("==", Field("a"), Lit(1)), Binary("==", Field("b"), Lit(2))))


def test_backquoted_and_strings():
    e = parse_expression("`land area` > 1 and name == 'O\\'Hare'")
    assert field_refs(e) == {"land area", "name"}
    assert evaluate(e, {"land area": 2, "name": "O'Hare"}) is True


@pytest.mark.parametrize("src,offset", [("p >", 3), ("(a", 2), ("a b", 2), ("1a", 0), ("'x", 0), ("a < b < c", 6),
                                        ("a $ b", 2)])
def test_syntax_error_offsets(src, offset):
    with pytest.raises(ExprSyntaxError) as ei:
        parse_expression(src)
    assert ei.value.offset == offset


def test_syntax_error_expected_set():
    with pytest.raises(ExprSyntaxError) as ei:
        parse_expression("p >")
    assert {"NUMBER", "IDENT", "("} <= ei.value.expected


def test_tokenizer_numbers():
    toks = tokenize("1 2.5 .5 1e3 3E-2")
    assert [t.value for t in toks[:-1]] == [1, 2.5, 0.5, 1000.0, 0.03]


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def test_density_formula():
    e = parse_expression("population / (ALAND / 1000000)")
    assert evaluate(e, {"population": 1_000_000, "ALAND": 2_000_000_000}) == 500.0


def test_missing_field_comparison_false():
    assert evaluate(parse_expression("p > 1000"), {}) is False


def test_short_circuit_skips_errors():
    assert evaluate(parse_expression("false and (1 / 0 > 1)"), {}) is False
    assert evaluate(parse_expression("true or (1 / 0 > 1)"), {}) is True
    with pytest.raises(ExprEvalError):
        evaluate(parse_expression("true and (1 / 0 > 1)"), {})


@pytest.mark.parametrize("src", ["'a' + 1", "1 < 'a'", "true < false", "not 1", "-'x'", "1 and true", "1 / 0"])
def test_eval_errors(src):
    with pytest.raises(ExprEvalError):
        evaluate(parse_expression(src), {})


def test_null_arithmetic():
    assert evaluate(parse_expression("x + 1"), {}) is None
    assert evaluate(parse_expression("null == null"), {}) is False


# independent evaluator: returns ERR instead of raising
ERR = object()


def _num(v):
    return type(v) in (int, float)


def ref_eval(e, row):
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Field):
        return row.get(e.name)
    if isinstance(e, Unary):
        v = ref_eval(e.operand, row)
        if v is ERR:
            return ERR
        if e.op == "not":
            return {True: False, False: True, None: None}[v] if v is None or type(v) is bool else ERR
        return None if v is None else (-v if _num(v) else ERR)
    op = e.op
    if op in ("and", "or"):
        l = ref_eval(e.left, row)
        if l is ERR or not (l is None or type(l) is bool):
            return ERR
        dominant = op == "or"  # the value that decides the result alone
        if l is dominant:
            return dominant
        r = ref_eval(e.right, row)
        if r is ERR or not (r is None or type(r) is bool):
            return ERR
        if r is dominant:
            return dominant
        return None if (l is None or r is None) else (not dominant)
    l, r = ref_eval(e.left, row), ref_eval(e.right, row)
    if l is ERR or r is ERR:
        return ERR
    if op in ("==", "!=", "<", "<=", ">", ">="):
        if l is None or r is None:
            return False
        kind = lambda v: "b" if type(v) is bool else "n" if _num(v) else "s"
        if kind(l) != kind(r):
            return ERR
        if kind(l) == "b" and op not in ("==", "!="):
            return ERR
        return {"==": l == r, "!=": l != r, "<": l < r, "<=": l <= r, ">": l > r, ">=": l >= r}[op]
    if (l is not None and not _num(l)) or (r is not None and not _num(r)):
        return ERR
    if l is None or r is None:
        return None
    if op == "/" and r == 0:
        return ERR
    try:
        v = {"+": lambda: l + r, "-": lambda: l - r, "*": lambda: l * r, "/": lambda: l / r}[op]()
    except OverflowError:
        return ERR
    if isinstance(v, float) and not math.isfinite(v):
        return ERR
    return v


literals = st.one_of(
    st.integers(-5, 5), st.sampled_from([0.5, 2.0, 1e308, 0.0]), st.booleans(), st.none(),
    st.sampled_from(["a", "b", ""]),
).map(Lit)
fields = st.sampled_from(["n", "m", "s", "t", "missing"]).map(Field)
exprs = st.recursive(
    st.one_of(literals, fields),
    lambda sub: st.one_of(
        st.builds(Unary, st.sampled_from(["-", "not"]), sub),
        st.builds(Binary, st.sampled_from(["+", "-", "*", "/", "==", "!=", "<", "<=", ">", ">=", "and", "or"]),
                  sub, sub),
    ),
    max_leaves=12,
)
rows = st.fixed_dictionaries({
    "n": st.one_of(st.integers(-3, 3), st.floats(-10, 10, allow_nan=False)),
    "m": st.one_of(st.none(), st.integers(0, 3)),
    "s": st.sampled_from(["a", "b"]),
    "t": st.one_of(st.booleans(), st.none()),
})


@given(exprs, rows)
def test_evaluator_matches_reference(e, row):
    want = ref_eval(e, row)
    try:
        got = evaluate(e, row)
    except ExprEvalError:
        assert want is ERR
    else:
        assert want is not ERR
        assert got == want and type(got) is type(want)


nonneg_literals = st.one_of(
    st.integers(0, 10**20), st.floats(0, 1e300, allow_nan=False, allow_infinity=False), st.booleans(), st.none(),
    st.text(alphabet="ab'\"\\\n\t é", max_size=5),
).map(Lit)
printable_fields = st.one_of(st.sampled_from(["x", "and_", "_y1"]), st.sampled_from(["land area", "and", "1x"])) \
    .map(Field)
print_exprs = st.recursive(
    st.one_of(nonneg_literals, printable_fields),
    lambda sub: st.one_of(
        st.builds(Unary, st.sampled_from(["-", "not"]), sub),
        st.builds(Binary, st.sampled_from(["+", "-", "*", "/", "==", "<", ">=", "and", "or"]), sub, sub),
    ),
    max_leaves=10,
)


@given(print_exprs)
def test_printer_fixed_point(e):
    src = to_source(e)
    assert parse_expression(src) == e
    assert to_source(parse_expression(src)) == src


def test_compile_accepts_ast():
    e = Binary("+", Lit(1), Lit(2))
    assert compile_expression(e) is e
    assert evaluate(compile_expression("1 + 2 * 3"), {}) == 7
