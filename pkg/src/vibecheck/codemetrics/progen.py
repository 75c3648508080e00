"""Seeded random VCPLang program generator.

Used to build origin corpora for trap generation and randomized metric
checks.  Programs are emitted in canonical form, contain no unreachable
code (``return`` appears only as the final statement), and exercise the
constructs the defect kinds need: comparisons, bounded loops with update
assignments, bounds-guarded subscripts, and sanitized sink calls.
"""

from __future__ import annotations

import random

from vibecheck.codemetrics import nodes as N
from vibecheck.codemetrics.parser import parse

_SCALARS = ("i", "j", "n", "m", "s", "x", "y", "acc", "lim")
_ARRAYS = ("data", "buf", "items")
_TAINTED = ("user_input", "payload", "request")
_SINKS = ("query", "exec", "render", "send")
_PLAIN_CALLS = ("log", "compute", "check", "emit")
_COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")


class _Gen:
    def __init__(self, rng: random.Random, max_branches: int):
        self.rng = rng
        self.branches = 0
        self.max_branches = max_branches

    def can_branch(self) -> bool:
        return self.branches < self.max_branches

    # --- expressions -------------------------------------------------------

    def expr(self, depth: int) -> N.Expr:
        r = self.rng
        if depth <= 0 or r.random() < 0.4:
            kind = r.randrange(3)
            if kind == 0:
                return N.Name(r.choice(_SCALARS))
            if kind == 1:
                return N.IntLit(r.randrange(0, 10))
            return N.Index(r.choice(_ARRAYS), N.Name(r.choice(("i", "j"))))
        kind = r.randrange(5)
        if kind == 0:
            return N.Unary("-", self.expr(depth - 1))
        if kind == 1:
            return N.Unary("!", self.expr(depth - 1))
        if kind == 2:
            return N.Call(r.choice(_PLAIN_CALLS), (self.expr(depth - 1),))
        op = r.choice(("+", "-", "*", "%"))
        return N.Binary(op, self.expr(depth - 1), self.expr(depth - 1))

    def comparison(self) -> N.Binary:
        r = self.rng
        left = N.Name(r.choice(_SCALARS))
        right = N.Name(r.choice(_SCALARS)) if r.random() < 0.5 else N.IntLit(r.randrange(0, 10))
        return N.Binary(r.choice(_COMPARISONS), left, right)

    def bound_comparison(self, var: str) -> N.Binary:
        r = self.rng
        bound = N.Name(r.choice(("n", "m", "lim"))) if r.random() < 0.7 else N.IntLit(r.randrange(2, 10))
        return N.Binary(r.choice(("<", "<=")), N.Name(var), bound)

    # --- statements --------------------------------------------------------

    def assign(self) -> N.Assign:
        return N.Assign(self.rng.choice(_SCALARS), self.expr(2))

    def stmt(self, depth: int) -> list[N.Stmt]:
        r = self.rng
        choices = ["assign", "assign", "call", "sink"]
        if depth > 0 and self.can_branch():
            choices += ["if", "if_else", "while", "for", "guarded_index"]
        kind = r.choice(choices)
        if kind == "assign":
            return [self.assign()]
        if kind == "call":
            return [N.CallStmt(N.Call(r.choice(_PLAIN_CALLS), (self.expr(1),)))]
        if kind == "sink":
            wrapped = N.Call("sanitize", (N.Name(r.choice(_TAINTED)),))
            return [N.CallStmt(N.Call(r.choice(_SINKS), (wrapped,)))]
        if kind == "guarded_index":
            self.branches += 1
            idx = r.choice(("i", "j"))
            read = N.Assign(r.choice(_SCALARS), N.Index(r.choice(_ARRAYS), N.Name(idx)))
            guard = N.Binary("<", N.Name(idx), N.Name(r.choice(("n", "m"))))
            return [N.If(guard, N.Block((read,)), None)]
        if kind == "if":
            self.branches += 1
            return [N.If(self.comparison(), self.block(depth - 1), None)]
        if kind == "if_else":
            self.branches += 1
            return [N.If(self.comparison(), self.block(depth - 1), self.block(depth - 1))]
        if kind == "while":
            self.branches += 1
            var = r.choice(("i", "j"))
            body = list(self.block(depth - 1).body)
            body.append(N.Assign(var, N.Binary("+", N.Name(var), N.IntLit(1))))
            return [
                N.Assign(var, N.IntLit(0)),
                N.While(self.bound_comparison(var), N.Block(tuple(body))),
            ]
        if kind == "for":
            self.branches += 1
            var = r.choice(("i", "j"))
            init = N.Assign(var, N.IntLit(0))
            update = N.Assign(var, N.Binary("+", N.Name(var), N.IntLit(1)))
            return [N.For(init, self.bound_comparison(var), update, self.block(depth - 1))]
        raise AssertionError(kind)

    def block(self, depth: int) -> N.Block:
        body: list[N.Stmt] = []
        for _ in range(self.rng.randrange(1, 4)):
            body.extend(self.stmt(depth))
        return N.Block(tuple(body))


def random_program(seed: int, *, max_branches: int = 10) -> str:
    """Return canonical source text for a random well-formed program."""
    rng = random.Random(seed)
    gen = _Gen(rng, max_branches)
    body: list[N.Stmt] = []
    for _ in range(rng.randrange(3, 8)):
        body.extend(gen.stmt(2))
    if rng.random() < 0.5:
        body.append(N.Return(N.Name(rng.choice(_SCALARS))))
    text = N.pretty_print(N.Program(tuple(body)))
    # The generator must only ever emit parseable source.
    parse(text, name=f"generated-{seed}")
    return text
