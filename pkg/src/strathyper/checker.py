"""Model checking SL_ii and HyperSL over finite-memory strategy classes.

Quantifiers range over every table of a :class:`StrategyClass`, but tables are
filled lazily: a play that reaches a missing entry raises :class:`_Need`, and the
quantifier owning that variable branches over the actions for just that entry.
Results are therefore exact for the class while only touching reachable entries.

Formulas are first lowered to a tree of quantifier, boolean and leaf nodes, with
strategy variables renamed apart and agent bindings pushed into the leaves.
Quantifiers are then moved inward (miniscoping), which is what keeps the
``ii_o`` and ``eq`` gadgets of the encodings tractable.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import ltl
from .cgs import MEMORY_KINDS, WINDOW, Cgs, CgsError, Lasso, ObservationFamily, extend_key
from .ltl import Atom, CompiledFormula, align
from .syntax import (FormulaError, HAnd, HBody, HExists, HForall, HOr, HyperFormula,
                     SAnd, SBind, SExists, SForall, SlFormula, SOr, SPath)


@dataclass(frozen=True)
class StrategyClass:
    """Which finite-memory strategies quantifiers range over.

    ``window`` is the memory size k; ``memory`` is ``"window"`` (the last k
    symbols of the prefix) or ``"horizon"`` (the first k symbols).
    """

    window: int = 1
    memory: str = WINDOW

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be positive")
        if self.memory not in MEMORY_KINDS:
            raise ValueError(f"unknown memory kind {self.memory!r}")

    def to_json(self) -> dict:
        return {"window": self.window, "memory": self.memory}


class _Need(Exception):
    """A play reached a table entry that is not assigned yet."""

    def __init__(self, var: int, key: tuple):
        super().__init__(var, key)
        self.var = var
        self.key = key


# -- lowered formulas ---------------------------------------------------------------

class _Node:
    __slots__ = ("free", "order")


class _Quant(_Node):
    __slots__ = ("exists", "var", "body")

    def __init__(self, exists: bool, var: int, body: _Node):
        self.exists, self.var, self.body = exists, var, body
        self.free = body.free - {var}
        self.order = tuple(sorted(self.free))


class _Bool(_Node):
    __slots__ = ("conj", "children")

    def __init__(self, conj: bool, children: List[_Node]):
        self.conj, self.children = conj, children
        self.free = frozenset().union(*(c.free for c in children))
        self.order = tuple(sorted(self.free))


class _Leaf(_Node):
    __slots__ = ("paths", "formula")

    def __init__(self, paths: Tuple[Tuple[int, ...], ...], formula: CompiledFormula):
        self.paths, self.formula = paths, formula
        self.free = frozenset(v for prof in paths for v in prof)
        self.order = tuple(sorted(self.free))


class _Const(_Node):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = value
        self.free = frozenset()
        self.order = ()


def _flatten(conj: bool, children: List[_Node]) -> _Node:
    flat: List[_Node] = []
    for c in children:
        if isinstance(c, _Const):
            if c.value != conj:
                return c
        elif isinstance(c, _Bool) and c.conj == conj:
            flat.extend(c.children)
        else:
            flat.append(c)
    if not flat:
        return _Const(conj)
    return flat[0] if len(flat) == 1 else _Bool(conj, flat)


def miniscope(node: _Node) -> _Node:
    """Push quantifiers inward; drop quantifiers whose variable is unused."""
    if isinstance(node, (_Leaf, _Const)):
        return node
    if isinstance(node, _Bool):
        return _flatten(node.conj, [miniscope(c) for c in node.children])
    body = miniscope(node.body)
    if node.var not in body.free:
        return body  # strategy classes are never empty
    if isinstance(body, _Bool):
        if body.conj != node.exists:  # forall over and, exists over or
            return _flatten(body.conj, [miniscope(_Quant(node.exists, node.var, c))
                                        for c in body.children])
        dep = [c for c in body.children if node.var in c.free]
        indep = [c for c in body.children if node.var not in c.free]
        if indep:
            inner = dep[0] if len(dep) == 1 else _Bool(body.conj, dep)
            return _flatten(body.conj, indep + [_Quant(node.exists, node.var, inner)])
    return _Quant(node.exists, node.var, body)


def _leaf(paths, psi, atom_fn) -> _Node:
    formula = CompiledFormula(psi, atom_fn)
    if not ltl.atoms(psi):
        return _Const(formula.evaluate([()], 0))
    return _Leaf(tuple(paths), formula)


class _Lowering:
    def __init__(self, cgs: Cgs):
        self.cgs = cgs
        self.modes: Dict[int, Optional[str]] = {}
        self.names: Dict[int, str] = {}

    def fresh(self, name: str, mode: Optional[str]) -> int:
        v = len(self.modes)
        self.modes[v] = mode
        self.names[v] = name
        return v

    def slii(self, f: SlFormula, fam: ObservationFamily, scope: Dict[str, int],
             theta: Dict[str, int]) -> _Node:
        cgs = self.cgs
        if isinstance(f, SPath):
            missing = [a for a in cgs.agents if a not in theta]
            if missing:
                raise FormulaError(f"agent unbound at path formula: {', '.join(missing)}")
            labels = cgs.labels

            def atom_fn(a: Atom):
                if a.path is not None:
                    raise FormulaError(f"indexed atom {a.name}@{a.path} in an SL_ii formula")
                name = a.name
                return lambda letter: name in labels[letter[0]]

            return _leaf([tuple(theta[a] for a in cgs.agents)], f.psi, atom_fn)
        if isinstance(f, (SAnd, SOr)):
            return _Bool(isinstance(f, SAnd), [self.slii(f.left, fam, scope, theta),
                                               self.slii(f.right, fam, scope, theta)])
        if isinstance(f, SBind):
            if f.var not in scope:
                raise FormulaError(f"unbound variable {f.var!r} in binding of {f.agent!r}")
            if f.agent not in cgs.agents:
                raise FormulaError(f"unknown agent {f.agent!r}")
            return self.slii(f.body, fam, scope, {**theta, f.agent: scope[f.var]})
        if isinstance(f, (SForall, SExists)):
            if f.obs not in fam.observations:
                raise CgsError(f"unknown observation {f.obs!r}")
            v = self.fresh(f.var, f.obs)
            body = self.slii(f.body, fam, {**scope, f.var: v}, theta)
            return _Quant(isinstance(f, SExists), v, body)
        raise FormulaError(f"not an SL_ii state formula: {f!r}")

    def hyper(self, f: HyperFormula, scope: Dict[str, int]) -> _Node:
        cgs = self.cgs
        if isinstance(f, HBody):
            paths, index = [], {}
            used = {a.path for a in ltl.atoms(f.psi)}
            for pi, prof in f.bindings:
                prof = dict(prof)
                if set(prof) != set(cgs.agents):
                    raise FormulaError(f"non-total profile for path {pi!r}")
                for a in cgs.agents:
                    if prof[a] not in scope:
                        raise FormulaError(f"unbound variable {prof[a]!r} in the profile of {pi!r}")
                if pi in used:
                    index[pi] = len(paths)
                    paths.append(tuple(scope[prof[a]] for a in cgs.agents))
            labels = cgs.labels

            def atom_fn(a: Atom):
                if a.path not in index:
                    raise FormulaError(f"path variable {a.path!r} is not bound in its body")
                name, k = a.name, index[a.path]
                return lambda letter: name in labels[letter[k]]

            return _leaf(paths, f.psi, atom_fn)
        if isinstance(f, (HAnd, HOr)):
            return _Bool(isinstance(f, HAnd), [self.hyper(f.left, scope),
                                               self.hyper(f.right, scope)])
        if isinstance(f, (HForall, HExists)):
            v = self.fresh(f.var, None)
            body = self.hyper(f.body, {**scope, f.var: v})
            return _Quant(isinstance(f, HExists), v, body)
        raise FormulaError(f"not a HyperSL state formula: {f!r}")


# -- evaluation ---------------------------------------------------------------------

@dataclass
class CheckStats:
    nodes: int = 0
    leaves: int = 0
    plays: int = 0
    branches: int = 0
    memo_hits: int = 0

    def to_json(self) -> dict:
        return dict(self.__dict__)


class _Engine:
    def __init__(self, cgs: Cgs, fam: Optional[ObservationFamily], cls: StrategyClass,
                 modes: Dict[int, Optional[str]]):
        self.cgs = cgs
        self.cls = cls
        self.actions = cgs.actions
        self.env: Dict[int, Dict[tuple, str]] = {}
        self.sym: Dict[int, Optional[Dict[str, int]]] = {
            v: (None if m is None else fam.block_map(m)) for v, m in modes.items()}
        self.memo: Dict[tuple, object] = {}
        self.stats = CheckStats()

    def eval(self, node: _Node) -> bool:
        key = (id(node),) + tuple(frozenset(self.env[v].items()) for v in node.order)
        hit = self.memo.get(key)
        if hit is not None:
            self.stats.memo_hits += 1
            if isinstance(hit, _Need):
                raise hit
            return hit
        self.stats.nodes += 1
        try:
            if isinstance(node, _Leaf):
                r = self._leaf(node)
            elif isinstance(node, _Const):
                r = node.value
            elif isinstance(node, _Bool):
                r = self._bool(node)
            else:
                r = self._quant(node)
        except _Need as need:
            self.memo[key] = need
            raise
        self.memo[key] = r
        return r

    def _bool(self, node: _Bool) -> bool:
        pending = None
        for c in node.children:
            try:
                r = self.eval(c)
            except _Need as need:
                pending = pending or need
                continue
            if r != node.conj:
                return r
        if pending is not None:
            raise pending
        return node.conj

    def _quant(self, node: _Quant) -> bool:
        outer = self.env.get(node.var)
        self.env[node.var] = {}
        try:
            return self._search(node, self.env[node.var])
        finally:
            if outer is None:
                del self.env[node.var]
            else:
                self.env[node.var] = outer

    def _search(self, node: _Quant, table: Dict[tuple, str]) -> bool:
        try:
            return self.eval(node.body)
        except _Need as need:
            if need.var != node.var:
                raise
            key = need.key
        pending = None
        for a in self.actions:
            self.stats.branches += 1
            table[key] = a
            try:
                r = self._search(node, table)
            except _Need as need:
                pending = pending or need
                continue
            finally:
                del table[key]
            if r == node.exists:
                return r
        if pending is not None:
            raise pending
        return not node.exists

    def _leaf(self, node: _Leaf) -> bool:
        self.stats.leaves += 1
        plays: Dict[tuple, tuple] = {}
        for prof in node.paths:
            if prof not in plays:
                plays[prof] = self.play(prof)
        runs = [plays[p] for p in node.paths]
        stalled = [(len(path), need) for path, lasso, need in runs if need is not None]
        if stalled:
            # decide on the common known prefix if possible, else ask for more
            n, need = min(stalled, key=lambda t: t[0])
            letters = [tuple(path[i] if lasso is None else lasso.at(i)
                             for path, lasso, _ in runs) for i in range(n)]
            verdict = node.formula.evaluate_prefix(letters)
            if verdict is None:
                raise need
            return verdict
        lassos = [lasso for _, lasso, _ in runs]
        if len(lassos) == 1:
            (l,) = lassos
            letters = [(s,) for s in l.stem + l.loop]
            return node.formula.evaluate(letters, len(l.stem))
        aligned = align(lassos)
        stem, loop = len(aligned[0].stem), len(aligned[0].loop)
        letters = [tuple(l.at(i) for l in aligned) for i in range(stem + loop)]
        return node.formula.evaluate(letters, stem)

    def play(self, prof: Tuple[int, ...]):
        """The play from the initial state; agent ``i`` follows variable ``prof[i]``.

        Returns ``(states, lasso, None)`` for a complete play, or
        ``(known states, None, need)`` when a table entry is missing.
        """
        self.stats.plays += 1
        cgs, k, memory = self.cgs, self.cls.window, self.cls.memory
        vars_ = tuple(dict.fromkeys(prof))
        slot = [vars_.index(v) for v in prof]
        syms = [self.sym[v] for v in vars_]
        tables = [self.env[v] for v in vars_]
        s = cgs.initial
        keys = [(s if m is None else m[s],) for m in syms]
        path = [s]
        seen: Dict[tuple, int] = {}
        while True:
            config = (s, tuple(keys))
            if config in seen:
                i = seen[config]
                return path, Lasso(tuple(path[:i]), tuple(path[i:-1])), None
            seen[config] = len(path) - 1
            acts = []
            for v, t, key in zip(vars_, tables, keys):
                a = t.get(key)
                if a is None:
                    return path, None, _Need(v, key)
                acts.append(a)
            s = cgs.transition[(s, tuple(acts[j] for j in slot))]
            path.append(s)
            keys = [extend_key(key, s if m is None else m[s], k, memory)
                    for key, m in zip(keys, syms)]


def _run(cgs, fam, cls, lowering: _Lowering, root: _Node, stats_out) -> bool:
    root = miniscope(root)
    if root.free:
        raise FormulaError("formula has free strategy variables")
    engine = _Engine(cgs, fam, cls, lowering.modes)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        result = engine.eval(root)
    finally:
        sys.setrecursionlimit(limit)
    if stats_out is not None:
        stats_out.update(engine.stats.to_json())
    return result


def check_slii(cgs: Cgs, fam: ObservationFamily, phi: SlFormula,
               cls: StrategyClass = StrategyClass(), stats: Optional[dict] = None) -> bool:
    """Whether ``phi`` holds at the initial state, quantifying over ``cls``.

    A quantifier ``forall x:o`` ranges over the class tables that read
    ``o``-blocks.  ``stats``, if given, receives search counters.
    """
    fam.check_covers(cgs.states)
    low = _Lowering(cgs)
    return _run(cgs, fam, cls, low, low.slii(phi, fam, {}, {}), stats)


def check_hypersl(cgs: Cgs, phi: HyperFormula, cls: StrategyClass = StrategyClass(),
                  stats: Optional[dict] = None) -> bool:
    """Whether ``phi`` holds at the initial state over full-information tables of ``cls``."""
    low = _Lowering(cgs)
    return _run(cgs, None, cls, low, low.hyper(phi, {}), stats)
