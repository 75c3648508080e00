"""Halstead counts and volume under the fixed vcp-1 classification table."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vibecheck.codemetrics.halstead import CLASSIFIER_TABLE_VERSION, halstead
from vibecheck.codemetrics.metrics import ENTROPY_DEFINITION, metrics, metrics_record
from vibecheck.codemetrics.parser import parse
from vibecheck.codemetrics.progen import random_program

# Frozen from independent hand counts of the sources below.
V_ASSIGN = 11.609640474436810        # x = a + b: 5 tokens, vocabulary 5
V_ASSIGN_TWICE = 23.219280948873621  # same statement twice: length doubles
V_IF_ELSE = 30.0                     # 10 * log2(8), exactly
V_IF_ELSE_PLUS_COPY = 41.209025018750054  # 13 * log2(9)


def test_single_assignment_counts(fixtures):
    counts = halstead(parse((fixtures / "halstead" / "assign.vcp").read_text()))
    assert (counts.n1, counts.n2) == (2, 3)      # {=, +} and {x, a, b}
    assert (counts.N1, counts.N2) == (2, 3)
    assert counts.volume_v == pytest.approx(V_ASSIGN, abs=1e-9)


def test_duplicated_statement_doubles_length_not_vocabulary(fixtures):
    counts = halstead(parse((fixtures / "halstead" / "assign_twice.vcp").read_text()))
    assert (counts.n1, counts.n2) == (2, 3)
    assert (counts.N1, counts.N2) == (4, 6)
    assert counts.volume_v == pytest.approx(V_ASSIGN_TWICE, abs=1e-9)


def test_empty_program_has_zero_volume(fixtures):
    counts = halstead(parse((fixtures / "halstead" / "empty.vcp").read_text()))
    assert counts == halstead(parse(""))
    assert (counts.n1, counts.n2, counts.N1, counts.N2) == (0, 0, 0, 0)
    assert counts.volume_v == 0.0


def test_if_else_unit(fixtures):
    counts = halstead(parse((fixtures / "ifelse.vcp").read_text()))
    # operators {=, if, <} (else adds nothing); operands {a, b, x, 1, 2}
    assert counts.n1 == 3
    assert counts.n2 == 5
    assert counts.N1 == 4
    assert counts.N2 == 6
    assert counts.volume_v == V_IF_ELSE  # 10 * log2(8) is exact in floats


def test_if_else_unit_with_trailing_copy(fixtures):
    text = (fixtures / "ifelse.vcp").read_text() + "y = x\n"
    counts = halstead(parse(text))
    assert (counts.n1, counts.n2, counts.N1, counts.N2) == (3, 6, 5, 8)
    assert counts.volume_v == pytest.approx(V_IF_ELSE_PLUS_COPY, abs=1e-9)
    assert counts.volume_v == pytest.approx(13 * math.log2(9), abs=1e-12)


def test_else_keyword_not_an_operator():
    bare = halstead(parse("if (a < b) { x = 1 }\n"))
    with_else = halstead(parse("if (a < b) { x = 1 } else { x = 1 }\n"))
    assert with_else.n1 == bare.n1  # else contributes no operator of its own


def test_call_and_index_sites_each_count_once():
    counts = halstead(parse("x = f(a, g(b))\ny = buf[i]\n"))
    # operators: =, =, call, call, index -> n1 {=, call, index}, N1 = 5
    assert counts.n1 == 3
    assert counts.N1 == 5
    # operands: x, f, a, g, b, y, buf, i
    assert counts.n2 == 8
    assert counts.N2 == 8


def test_minus_is_one_operator_in_both_roles():
    counts = halstead(parse("x = -a - b\n"))
    # operators: =, - (unary), - (binary) -> distinct {=, -}, total 3
    assert counts.n1 == 2
    assert counts.N1 == 3


def test_literals_distinct_by_value():
    counts = halstead(parse('x = 1\ny = 1\nz = "1"\n'))
    # operands: x, y, z, int 1 (twice), str "1" -> 5 distinct, 6 total
    assert counts.n2 == 5
    assert counts.N2 == 6


def test_for_and_while_and_return_keywords_count():
    counts = halstead(parse(
        "for (i = 0; i < n; i = i + 1) { s = s + i }\n"
        "while (s > 9) { s = s - 9 }\n"
        "return s\n"
    ))
    # keyword operators: for, while, return each once
    assert counts.n1 == len({"=", "<", "+", ">", "-", "for", "while", "return"})


def test_metrics_bundle_and_record(fixtures):
    unit = parse((fixtures / "ifelse.vcp").read_text())
    m = metrics(unit)
    assert m.cc == 2
    assert m.h_c == 1.0
    assert m.halstead.volume_v == V_IF_ELSE
    record = metrics_record("ifelse.vcp", m)
    assert record["unit"] == "ifelse.vcp"
    assert record["cc"] == 2
    assert record["volume_v"] == m.halstead.volume_v
    assert record["entropy_definition"] == ENTROPY_DEFINITION
    assert record["classifier_table_version"] == CLASSIFIER_TABLE_VERSION == "vcp-1"


def test_metrics_on_bare_graph_has_no_halstead(fixtures):
    from vibecheck.codemetrics.cfg import build_cfg

    cfg = build_cfg(parse((fixtures / "ifelse.vcp").read_text()))
    m = metrics(cfg)
    assert m.cc == 2
    assert m.halstead is None
    record = metrics_record("ifelse.cfg.json", m)
    assert record["volume_v"] is None


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=20_000))
def test_volume_formula_and_count_bounds(seed):
    counts = halstead(parse(random_program(seed)))
    length = counts.N1 + counts.N2
    vocab = counts.n1 + counts.n2
    if vocab == 0:
        assert counts.volume_v == 0.0
    else:
        assert counts.volume_v == pytest.approx(length * math.log2(vocab), abs=1e-12)
    assert counts.n1 <= counts.N1
    assert counts.n2 <= counts.N2


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=20_000))
def test_counts_invariant_under_reformatting(seed):
    from vibecheck.codemetrics.nodes import pretty_print

    unit = parse(random_program(seed))
    assert halstead(parse(pretty_print(unit.ast))) == halstead(unit)
