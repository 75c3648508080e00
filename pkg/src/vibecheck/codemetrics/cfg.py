"""Control-flow graphs over VCPLang programs.

Construction discipline:

- straight-line statements accumulate into the current basic block;
- an ``if`` guard terminates its block, which becomes a branch node with a
  ``true`` edge into the then-branch and a ``false`` edge to the else-branch
  (or directly to the join block when there is none); ``else if`` chains are
  nested ifs, so every branch node has out-degree exactly 2;
- a loop guard sits in its own block with a ``true`` edge into the body and a
  ``loop-exit`` edge past the loop; the body tail returns via a ``loop-back``
  edge to the guard;
- ``return`` routes to the synthetic exit block; code after it is
  unreachable and is omitted from the graph.

Every produced graph has a single entry (in-degree 0), a single exit
reachable from every node, and non-exit nodes with out-degree 1 or 2.  The
same structure round-trips through a JSON interchange form, and any graph
read back from that form is accepted wherever a freshly built one is.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

from vibecheck.codemetrics import nodes as N
from vibecheck.errors import ValidationError

EDGE_LABELS = frozenset({"seq", "true", "false", "loop-back", "loop-exit"})


@dataclass(frozen=True)
class BasicBlock:
    id: int
    stmts: tuple[str, ...]


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: str


@dataclass(frozen=True)
class ControlFlowGraph:
    blocks: tuple[BasicBlock, ...]
    edges: tuple[Edge, ...]
    entry: int
    exit: int

    def out_degrees(self) -> dict[int, int]:
        degrees = {block.id: 0 for block in self.blocks}
        for edge in self.edges:
            degrees[edge.src] += 1
        return degrees

    def branch_nodes(self) -> list[int]:
        return [b for b, d in sorted(self.out_degrees().items()) if d >= 2]

    def validate(self) -> None:
        ids = [b.id for b in self.blocks]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate block ids in control-flow graph")
        known = set(ids)
        if self.entry not in known or self.exit not in known:
            raise ValidationError("entry/exit refer to unknown blocks")
        succs: dict[int, list[int]] = {i: [] for i in ids}
        preds: dict[int, list[int]] = {i: [] for i in ids}
        for edge in self.edges:
            if edge.label not in EDGE_LABELS:
                raise ValidationError(f"unknown edge label {edge.label!r}")
            if edge.src not in known or edge.dst not in known:
                raise ValidationError("edge refers to unknown block")
            succs[edge.src].append(edge.dst)
            preds[edge.dst].append(edge.src)
        if preds[self.entry]:
            raise ValidationError("entry block must have in-degree 0")
        if succs[self.exit]:
            raise ValidationError("exit block must have out-degree 0")
        if _reachable(self.entry, succs) != known:
            raise ValidationError("every block must be reachable from entry")
        if _reachable(self.exit, preds) != known:
            raise ValidationError("exit must be reachable from every block")

    # --- interchange form --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "nodes": [{"id": b.id, "stmts": list(b.stmts)} for b in self.blocks],
            "edges": [{"from": e.src, "to": e.dst, "label": e.label} for e in self.edges],
            "entry": self.entry,
            "exit": self.exit,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ControlFlowGraph":
        try:
            blocks = tuple(
                BasicBlock(int(node["id"]), tuple(node.get("stmts", ())))
                for node in data["nodes"]
            )
            edges = tuple(
                Edge(int(e["from"]), int(e["to"]), str(e["label"])) for e in data["edges"]
            )
            cfg = cls(blocks, edges, int(data["entry"]), int(data["exit"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed control-flow graph file: {exc}") from exc
        cfg.validate()
        return cfg


def _reachable(start: int, adjacency: dict[int, list[int]]) -> set[int]:
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for nxt in adjacency[node]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def load_cfg(path: Union[str, Path]) -> ControlFlowGraph:
    """Read a control-flow graph from its JSON interchange file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
    return ControlFlowGraph.from_dict(data)


def dump_cfg(cfg: ControlFlowGraph, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")


# --- construction ----------------------------------------------------------


class _Builder:
    def __init__(self) -> None:
        self.stmts: list[list[str]] = []
        self.edges: list[tuple[int, int, str]] = []

    def new_block(self) -> int:
        self.stmts.append([])
        return len(self.stmts) - 1

    def link(self, src: int, dst: int, label: str) -> None:
        self.edges.append((src, dst, label))

    def emit(self, block: int, text: str) -> None:
        self.stmts[block].append(text)


def build_cfg(unit: Union[N.SourceUnit, N.Program]) -> ControlFlowGraph:
    """Build the whole-unit control-flow graph chaining top-level statements."""
    program = unit.ast if isinstance(unit, N.SourceUnit) else unit
    b = _Builder()
    entry = b.new_block()
    exit_block = b.new_block()

    def flow(stmts: Iterable[N.Stmt], current: int | None) -> int | None:
        for stmt in stmts:
            if current is None:
                # Unreachable suffix (after a return): parked in a dangling
                # block that the reachability prune below removes.
                current = b.new_block()
            current = place(stmt, current)
        return current

    def fresh_after(current: int) -> int:
        """A block to hold a guard: reuse ``current`` only if still empty."""
        if not b.stmts[current] and all(e[0] != current for e in b.edges):
            return current
        nxt = b.new_block()
        b.link(current, nxt, "seq")
        return nxt

    def place(stmt: N.Stmt, current: int) -> int | None:
        if isinstance(stmt, (N.Assign, N.CallStmt)):
            b.emit(current, N.render_stmt_line(stmt))
            return current
        if isinstance(stmt, N.Return):
            b.emit(current, N.render_stmt_line(stmt))
            b.link(current, exit_block, "seq")
            return None
        if isinstance(stmt, N.Block):
            return flow(stmt.body, current)
        if isinstance(stmt, N.If):
            guard = current
            b.emit(guard, N.render_stmt_line(stmt))
            join = b.new_block()
            then_block = b.new_block()
            b.link(guard, then_block, "true")
            then_end = flow(stmt.then.body, then_block)
            if then_end is not None:
                b.link(then_end, join, "seq")
            if stmt.orelse is None:
                b.link(guard, join, "false")
            else:
                else_block = b.new_block()
                b.link(guard, else_block, "false")
                else_end = flow([stmt.orelse], else_block) if isinstance(stmt.orelse, N.If) \
                    else flow(stmt.orelse.body, else_block)
                if else_end is not None:
                    b.link(else_end, join, "seq")
            return join
        if isinstance(stmt, N.While):
            guard = fresh_after(current)
            b.emit(guard, N.render_stmt_line(stmt))
            body_block = b.new_block()
            b.link(guard, body_block, "true")
            body_end = flow(stmt.body.body, body_block)
            if body_end is not None:
                b.link(body_end, guard, "loop-back")
            after = b.new_block()
            b.link(guard, after, "loop-exit")
            return after
        if isinstance(stmt, N.For):
            b.emit(current, N.render_stmt_line(stmt.init))
            guard = fresh_after(current)
            b.emit(guard, N.render_stmt_line(stmt))
            body_block = b.new_block()
            b.link(guard, body_block, "true")
            body_end = flow(stmt.body.body, body_block)
            if body_end is not None:
                b.emit(body_end, N.render_stmt_line(stmt.update))
                b.link(body_end, guard, "loop-back")
            after = b.new_block()
            b.link(guard, after, "loop-exit")
            return after
        raise TypeError(f"unknown statement node: {stmt!r}")

    if not program.body:
        b.link(entry, exit_block, "seq")
        cfg = ControlFlowGraph(
            (BasicBlock(0, ()), BasicBlock(1, ())), (Edge(0, 1, "seq"),), 0, 1
        )
        cfg.validate()
        return cfg

    first = b.new_block()
    b.link(entry, first, "seq")
    last = flow(program.body, first)
    if last is not None:
        b.link(last, exit_block, "seq")

    # Prune blocks unreachable from entry, keeping entry and exit.
    succs: dict[int, list[int]] = {i: [] for i in range(len(b.stmts))}
    for src, dst, _ in b.edges:
        succs[src].append(dst)
    live = _reachable(entry, succs)
    live.add(exit_block)
    order = [i for i in range(len(b.stmts)) if i in live]
    # Entry stays first and exit moves last for readable interchange files.
    order.remove(exit_block)
    order.append(exit_block)
    renumber = {old: new for new, old in enumerate(order)}
    blocks = tuple(BasicBlock(renumber[i], tuple(b.stmts[i])) for i in order)
    edges = tuple(
        Edge(renumber[src], renumber[dst], label)
        for src, dst, label in b.edges
        if src in live and dst in live
    )
    cfg = ControlFlowGraph(blocks, edges, renumber[entry], renumber[exit_block])
    cfg.validate()
    return cfg


# --- graph metrics ---------------------------------------------------------


def cyclomatic_complexity(cfg: ControlFlowGraph) -> int:
    """Cyclomatic number ``E - N + 2`` of a connected control-flow graph."""
    return len(cfg.edges) - len(cfg.blocks) + 2


def cfg_entropy(cfg: ControlFlowGraph) -> float:
    """Structural decision entropy in bits.

    Each decision site contributes ``log2(out-degree)``, treating the
    alternatives at the site as equiprobable.  Graphs without a node of
    out-degree >= 2 have entropy exactly 0.0.
    """
    total = 0.0
    for _, degree in sorted(cfg.out_degrees().items()):
        if degree >= 2:
            total += math.log2(degree)
    return total
