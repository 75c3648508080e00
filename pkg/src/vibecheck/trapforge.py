"""Seeded single-defect injection and review-corpus generation.

Each defect kind edits the origin source at exactly one site, by splicing
bytes at spans taken from the parsed tree, so the trap differs from its
origin only at the mutation site and always reparses:

- ``inverted-condition``: one comparison operator becomes its negation
  (``<`` -> ``>=``, ``==`` -> ``!=``, ...), anywhere in the program;
- ``off-by-one``: one loop guard comparison flips boundary inclusion
  (``<`` <-> ``<=``, ``>`` <-> ``>=``), shifting the iteration count by one;
- ``unchecked-index``: one if-statement without an else whose condition is a
  comparison and whose body subscripts an array is unwrapped, deleting the
  bounds guard around the access;
- ``unsanitized-sink``: one ``sanitize(...)`` wrapper inside a call to a
  designated sink function is removed, routing the argument in raw;
- ``dropped-update``: one assignment to a loop-guard variable inside the
  loop body is deleted, so the loop no longer advances that variable.

Site coordinates in the answer key refer to the origin source.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from vibecheck.codemetrics import nodes as N
from vibecheck.codemetrics.parser import parse
from vibecheck.errors import NotApplicableError, ValidationError
from vibecheck.rng import make_rng

DEFECT_KINDS = (
    "inverted-condition",
    "off-by-one",
    "unchecked-index",
    "unsanitized-sink",
    "dropped-update",
)

SINK_FUNCTIONS = frozenset({"query", "exec", "render", "send"})
SANITIZER = "sanitize"

_NEGATE = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}
_SHIFT_BOUND = {"<": "<=", "<=": "<", ">": ">=", ">=": ">"}


@dataclass(frozen=True)
class MutationSite:
    start: int
    end: int
    line: int
    col: int
    description: str


@dataclass(frozen=True)
class TrapItem:
    item_id: str
    source: str
    ground_truth: str  # "trap" | "clean"
    defect_kind: Optional[str]
    mutation_site: Optional[MutationSite]
    origin_name: str


@dataclass(frozen=True)
class TrapCorpus:
    items: tuple[TrapItem, ...]
    seed: int
    trap_fraction: float
    requested_traps: int
    shortfall: int


@dataclass(frozen=True)
class _Site:
    span: tuple[int, int]
    replacement: str
    description: str


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _comparison_sites(unit: N.SourceUnit, table: dict[str, str]) -> list[_Site]:
    sites = []
    for node in N.walk(unit.ast):
        if isinstance(node, N.Binary) and node.op in table:
            sites.append(
                _Site(
                    span=node.op_span,
                    replacement=table[node.op],
                    description=f"comparison '{node.op}' replaced by '{table[node.op]}'",
                )
            )
    return sites


def _loop_guard_sites(unit: N.SourceUnit) -> list[_Site]:
    sites = []
    for node in N.walk(unit.ast):
        if isinstance(node, (N.While, N.For)):
            cond = node.cond
            if isinstance(cond, N.Binary) and cond.op in _SHIFT_BOUND:
                new_op = _SHIFT_BOUND[cond.op]
                sites.append(
                    _Site(
                        span=cond.op_span,
                        replacement=new_op,
                        description=f"loop bound '{cond.op}' relaxed to '{new_op}'",
                    )
                )
    return sites


def _contains_index(node: N.Node) -> bool:
    return any(isinstance(sub, N.Index) for sub in N.walk(node))


def _bounds_guard_sites(unit: N.SourceUnit) -> list[_Site]:
    sites = []
    for node in N.walk(unit.ast):
        if (
            isinstance(node, N.If)
            and node.orelse is None
            and isinstance(node.cond, N.Binary)
            and node.cond.op in _SHIFT_BOUND
            and _contains_index(node.then)
        ):
            inner = unit.text[node.then.span[0] + 1 : node.then.span[1] - 1].strip()
            sites.append(
                _Site(
                    span=node.span,
                    replacement=inner,
                    description="bounds-guard if removed around subscript access",
                )
            )
    return sites


def _sink_sites(unit: N.SourceUnit) -> list[_Site]:
    sites = []
    for node in N.walk(unit.ast):
        if isinstance(node, N.Call) and node.func in SINK_FUNCTIONS:
            for arg in node.args:
                if isinstance(arg, N.Call) and arg.func == SANITIZER and arg.args:
                    start = arg.args[0].span[0]
                    end = arg.args[-1].span[1]
                    sites.append(
                        _Site(
                            span=arg.span,
                            replacement=unit.text[start:end],
                            description=f"sanitize() wrapper removed inside {node.func}() call",
                        )
                    )
    return sites


def _guard_names(cond: N.Expr) -> set[str]:
    return {sub.ident for sub in N.walk(cond) if isinstance(sub, N.Name)}


def _dropped_update_sites(unit: N.SourceUnit) -> list[_Site]:
    # For-header init/update clauses are loop syntax, not body statements;
    # deleting one would leave an unparseable header.
    header_clauses = {
        id(clause)
        for node in N.walk(unit.ast)
        if isinstance(node, N.For)
        for clause in (node.init, node.update)
    }
    sites = []
    for node in N.walk(unit.ast):
        if isinstance(node, (N.While, N.For)):
            guard_vars = _guard_names(node.cond)
            for sub in N.walk(node.body):
                if (
                    isinstance(sub, N.Assign)
                    and sub.target in guard_vars
                    and id(sub) not in header_clauses
                ):
                    sites.append(
                        _Site(
                            span=sub.span,
                            replacement="",
                            description=f"loop-variable update '{sub.target} = ...' deleted",
                        )
                    )
    return sites


def applicable_sites(unit: N.SourceUnit, kind: str) -> list[_Site]:
    if kind == "inverted-condition":
        return _comparison_sites(unit, _NEGATE)
    if kind == "off-by-one":
        return _loop_guard_sites(unit)
    if kind == "unchecked-index":
        return _bounds_guard_sites(unit)
    if kind == "unsanitized-sink":
        return _sink_sites(unit)
    if kind == "dropped-update":
        return _dropped_update_sites(unit)
    raise ValidationError(f"unknown defect kind {kind!r}; known kinds: {', '.join(DEFECT_KINDS)}")


def inject(unit: N.SourceUnit, kind: str, seed: int = 0) -> tuple[str, MutationSite]:
    """Apply one seeded mutation of ``kind``; returns (mutated source, site)."""
    sites = applicable_sites(unit, kind)
    if not sites:
        raise NotApplicableError(kind, unit.name)
    site = sites[int(make_rng(seed).integers(len(sites)))]
    return _apply(unit, kind, site)


def _apply(unit: N.SourceUnit, kind: str, site: _Site) -> tuple[str, MutationSite]:
    start, end = site.span
    mutated = unit.text[:start] + site.replacement + unit.text[end:]
    # A mutation that fails to reparse is a bug in the site tables.
    parse(mutated, name=f"{unit.name}#{kind}")
    line, col = _line_col(unit.text, start)
    return mutated, MutationSite(start, end, line, col, site.description)


def generate_corpus(
    origins: Sequence[N.SourceUnit], trap_fraction: float, seed: int
) -> TrapCorpus:
    """Deterministically derive a shuffled review corpus from clean origins.

    ``round(trap_fraction * len(origins))`` origins are selected for
    mutation; each selected origin draws a defect kind uniformly from the
    kinds applicable to it, using a stream derived from ``(seed, origin
    index)`` so items are independent.  A selected origin with no applicable
    kind stays clean and is counted in ``shortfall``.  Presentation order is
    a Fisher-Yates shuffle seeded by the corpus seed, and item ids are
    assigned after shuffling.
    """
    if not origins:
        raise ValidationError("corpus generation needs at least one origin")
    if not (0.0 <= trap_fraction <= 1.0):
        raise ValidationError(f"trap_fraction must lie in [0, 1], got {trap_fraction!r}")
    names = [u.name for u in origins]
    if len(set(names)) != len(names):
        raise ValidationError("origin names must be unique")

    n = len(origins)
    requested = int(math.floor(trap_fraction * n + 0.5))
    top_rng = make_rng(seed)
    chosen = set(top_rng.choice(n, size=requested, replace=False).tolist()) if requested else set()

    drafts: list[tuple[N.SourceUnit, str, Optional[str], Optional[MutationSite]]] = []
    shortfall = 0
    for index, unit in enumerate(origins):
        if index not in chosen:
            drafts.append((unit, unit.text, None, None))
            continue
        item_rng = make_rng(seed, index)
        kinds = [k for k in DEFECT_KINDS if applicable_sites(unit, k)]
        if not kinds:
            shortfall += 1
            drafts.append((unit, unit.text, None, None))
            continue
        kind = kinds[int(item_rng.integers(len(kinds)))]
        sites = applicable_sites(unit, kind)
        site = sites[int(item_rng.integers(len(sites)))]
        drafts.append((unit, *_apply_for_corpus(unit, kind, site)))

    # Fisher-Yates over presentation order, seeded by the corpus seed.
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(top_rng.integers(i + 1))
        order[i], order[j] = order[j], order[i]

    width = max(3, len(str(n - 1)))
    items = []
    for position, original_index in enumerate(order):
        unit, source, kind, site = drafts[original_index]
        items.append(
            TrapItem(
                item_id=f"item_{position:0{width}d}",
                source=source,
                ground_truth="trap" if kind else "clean",
                defect_kind=kind,
                mutation_site=site,
                origin_name=unit.name,
            )
        )
    return TrapCorpus(
        items=tuple(items),
        seed=seed,
        trap_fraction=trap_fraction,
        requested_traps=requested,
        shortfall=shortfall,
    )


def _apply_for_corpus(
    unit: N.SourceUnit, kind: str, site: _Site
) -> tuple[str, str, MutationSite]:
    mutated, mutation = _apply(unit, kind, site)
    return mutated, kind, mutation


def write_corpus(corpus: TrapCorpus, out_dir: Union[str, Path]) -> None:
    """Write ``items/<id>.vcp``, the answer key, and a manifest.

    The answer key lands next to (not inside) ``items/`` so the reviewer
    bundle is the items directory alone.
    """
    out = Path(out_dir)
    (out / "items").mkdir(parents=True, exist_ok=True)
    for item in corpus.items:
        (out / "items" / f"{item.item_id}.vcp").write_text(item.source)
    with (out / "answer_key.jsonl").open("w") as fh:
        for item in corpus.items:
            record = {
                "item_id": item.item_id,
                "ground_truth": item.ground_truth,
                "defect_kind": item.defect_kind,
                "mutation_site": None
                if item.mutation_site is None
                else {
                    "start": item.mutation_site.start,
                    "end": item.mutation_site.end,
                    "line": item.mutation_site.line,
                    "col": item.mutation_site.col,
                    "description": item.mutation_site.description,
                },
                "origin": item.origin_name,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    manifest = {
        "seed": corpus.seed,
        "trap_fraction": corpus.trap_fraction,
        "n_items": len(corpus.items),
        "requested_traps": corpus.requested_traps,
        "actual_traps": sum(1 for i in corpus.items if i.ground_truth == "trap"),
        "shortfall": corpus.shortfall,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_answer_key(path: Union[str, Path]) -> dict[str, str]:
    """Map item_id -> ground_truth from an answer-key file."""
    key: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            key[str(rec["item_id"])] = str(rec["ground_truth"])
        except (json.JSONDecodeError, KeyError) as exc:
            raise ValidationError(f"{path}:{lineno}: bad answer-key record: {exc}") from exc
    return key
