"""Halstead vocabulary counts and volume for VCPLang.

The classification table is fixed (version ``vcp-1``) so that counts are
reproducible across implementations:

==========================  ================================================
operators                   every binary/unary operator symbol (`-` counts
                            as one operator in both roles), the assignment
                            ``=``, one ``call`` operator per call site, one
                            ``index`` operator per subscript site, and the
                            keywords ``if``, ``while``, ``for``, ``return``
                            (one occurrence per syntactic use; ``else`` is
                            part of the ``if`` syntax and adds nothing)
operands                    identifiers (assignment targets, callee names,
                            subscripted names, and plain uses) and literals,
                            distinct by spelling for identifiers and by
                            value for literals
not counted                 braces, parentheses, semicolons, commas
==========================  ================================================

Volume is ``V = (N1 + N2) * log2(n1 + n2)``; the empty program has all
counts and volume exactly 0.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Union

from vibecheck.codemetrics import nodes as N

CLASSIFIER_TABLE_VERSION = "vcp-1"


@dataclass(frozen=True)
class HalsteadCounts:
    n1: int  # distinct operators
    n2: int  # distinct operands
    N1: int  # total operator occurrences
    N2: int  # total operand occurrences
    volume_v: float


def _count(node: N.Node, operators: Counter, operands: Counter) -> None:
    if isinstance(node, (N.Program, N.Block)):
        for stmt in node.body:
            _count(stmt, operators, operands)
    elif isinstance(node, N.Assign):
        operators["="] += 1
        operands[("ident", node.target)] += 1
        _count(node.value, operators, operands)
    elif isinstance(node, N.If):
        operators["if"] += 1
        _count(node.cond, operators, operands)
        _count(node.then, operators, operands)
        if node.orelse is not None:
            _count(node.orelse, operators, operands)
    elif isinstance(node, N.While):
        operators["while"] += 1
        _count(node.cond, operators, operands)
        _count(node.body, operators, operands)
    elif isinstance(node, N.For):
        operators["for"] += 1
        _count(node.init, operators, operands)
        _count(node.cond, operators, operands)
        _count(node.update, operators, operands)
        _count(node.body, operators, operands)
    elif isinstance(node, N.Return):
        operators["return"] += 1
        if node.value is not None:
            _count(node.value, operators, operands)
    elif isinstance(node, N.CallStmt):
        _count(node.call, operators, operands)
    elif isinstance(node, N.Binary):
        operators[node.op] += 1
        _count(node.left, operators, operands)
        _count(node.right, operators, operands)
    elif isinstance(node, N.Unary):
        operators[node.op] += 1
        _count(node.operand, operators, operands)
    elif isinstance(node, N.Call):
        operators["call"] += 1
        operands[("ident", node.func)] += 1
        for arg in node.args:
            _count(arg, operators, operands)
    elif isinstance(node, N.Index):
        operators["index"] += 1
        operands[("ident", node.base)] += 1
        _count(node.index, operators, operands)
    elif isinstance(node, N.Name):
        operands[("ident", node.ident)] += 1
    elif isinstance(node, N.IntLit):
        operands[("int", node.value)] += 1
    elif isinstance(node, N.StrLit):
        operands[("str", node.value)] += 1
    else:
        raise TypeError(f"unknown node: {node!r}")


def halstead(unit: Union[N.SourceUnit, N.Program]) -> HalsteadCounts:
    """Count operators/operands and compute volume for one source unit."""
    program = unit.ast if isinstance(unit, N.SourceUnit) else unit
    operators: Counter = Counter()
    operands: Counter = Counter()
    _count(program, operators, operands)
    n1 = len(operators)
    n2 = len(operands)
    total_n1 = sum(operators.values())
    total_n2 = sum(operands.values())
    vocabulary = n1 + n2
    length = total_n1 + total_n2
    volume = float(length) * math.log2(vocabulary) if vocabulary else 0.0
    return HalsteadCounts(n1=n1, n2=n2, N1=total_n1, N2=total_n2, volume_v=volume)
