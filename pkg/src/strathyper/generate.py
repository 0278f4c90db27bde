"""Seeded random instances and formula pools for the equivalence checks."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import List, Sequence, Tuple

from .cgs import Cgs, ObservationFamily
from .ltl import TRUE, And, Atom, Next, PathFormula, Until, eventually, globally, lor, neg, weak_until
from .syntax import (HAnd, HBody, HExists, HForall, HOr, HyperFormula, SAnd, SBind, SExists,
                     SForall, SlFormula, SOr, SPath)

MAX_STATES = 8


def set_partitions(items: Sequence) -> List[Tuple[Tuple, ...]]:
    """All set partitions of ``items``; blocks keep the item order."""
    return list(_partitions(tuple(items)))


@lru_cache(maxsize=None)
def _partitions(items: tuple) -> tuple:
    if not items:
        return ((),)
    first, rest = items[0], items[1:]
    out = []
    for part in _partitions(rest):
        out.append(((first,),) + part)
        for i in range(len(part)):
            out.append(part[:i] + ((first,) + part[i],) + part[i + 1:])
    return tuple(tuple(sorted(p, key=lambda b: items.index(b[0]))) for p in out)


def random_instance(seed: int, states: int = 3, actions: int = 2, agents: int = 2,
                    aps: int = 2, observations: int = 2,
                    turn_based: float = 0.0,
                    opening: bool = False) -> Tuple[Cgs, ObservationFamily]:
    """A valid CGS with uniform labels and uniformly drawn partitions.

    States are ``s0..``, agents ``a1..``, actions ``c0..``, propositions ``p, q, ...``
    and observations ``o1..``.  Each state is, with probability ``turn_based``,
    owned by one random agent whose action alone picks the successor; otherwise
    every profile gets an independent uniform successor.  With ``opening`` the
    game is turn based throughout: the last agent owns the initial state and the
    first agent owns every other state, so the first agent has to react to a
    move it may not be able to observe.
    """
    if not 1 <= states <= MAX_STATES:
        raise ValueError(f"states must be in 1..{MAX_STATES}")
    if actions < 1 or agents < 1 or aps < 0 or observations < 0 or aps > 16:
        raise ValueError("sizes out of range")
    if not 0.0 <= turn_based <= 1.0:
        raise ValueError("turn_based must be a probability")
    rng = random.Random(seed)
    st = tuple(f"s{i}" for i in range(states))
    ag = tuple(f"a{i + 1}" for i in range(agents))
    ac = tuple(f"c{i}" for i in range(actions))
    ap = tuple("pqrstuvwbdefghjk"[i] for i in range(aps))
    labels = {s: frozenset(a for a in ap if rng.random() < 0.5) for s in st}
    transition = {}
    for s in st:
        profiles = list(itertools.product(ac, repeat=agents))
        if opening or (turn_based and rng.random() < turn_based):
            if opening:
                owner = agents - 1 if s == st[0] else 0
            else:
                owner = rng.randrange(agents)
            succ = {a: rng.choice(st) for a in ac}
            transition.update(((s, p), succ[p[owner]]) for p in profiles)
        else:
            transition.update(((s, p), rng.choice(st)) for p in profiles)
    cgs = Cgs(st, st[0], ag, ac, ap, transition, labels)
    parts = set_partitions(st)
    obs = tuple(f"o{i + 1}" for i in range(observations))
    fam = ObservationFamily(obs, {o: rng.choice(parts) for o in obs})
    return cgs, fam


# -- formulas -----------------------------------------------------------------------

def random_path(rng: random.Random, atoms: Sequence[PathFormula], depth: int,
                size: int = 3) -> PathFormula:
    """A path formula of temporal depth at most ``depth`` with about ``size`` operators."""
    if size <= 0 or not atoms:
        r = rng.random()
        if r < 0.05 or not atoms:
            return TRUE if rng.random() < 0.5 else neg(TRUE)
        a = rng.choice(list(atoms))
        return neg(a) if r < 0.3 else a
    ops = ["not", "and", "or"]
    if depth > 0:
        ops += ["X", "F", "G", "U", "W"] * 2
    op = rng.choice(ops)
    if op == "not":
        return neg(random_path(rng, atoms, depth, size - 1))
    if op in ("X", "F", "G"):
        arg = random_path(rng, atoms, depth - 1, size - 1)
        return {"X": Next, "F": eventually, "G": globally}[op](arg)
    inner = depth - 1 if op in ("U", "W") else depth
    left = rng.randint(0, size - 1)
    l = random_path(rng, atoms, inner, left)
    r = random_path(rng, atoms, inner, size - 1 - left)
    return {"and": And, "or": lor, "U": Until, "W": weak_until}[op](l, r)


def random_slii(rng: random.Random, cgs: Cgs, fam: ObservationFamily,
                qdepth: int = 2, tdepth: int = 2) -> SlFormula:
    """A well-formed SL_ii formula: every path formula sees all agents bound.

    Quantifier nesting is at most ``qdepth`` and temporal nesting at most ``tdepth``.
    """
    atoms = [Atom(a) for a in cgs.aps]
    counter = [0]

    def quant(depth, scope, theta):
        counter[0] += 1
        x = f"x{counter[0]}"
        cls = SExists if rng.random() < 0.5 else SForall
        return cls(x, rng.choice(fam.observations), state(depth - 1, scope + [x], theta))

    def leaf(scope, theta):
        agents = list(cgs.agents)
        rng.shuffle(agents)
        pool = rng.sample(scope, len(scope))
        binds = [(a, pool[n % len(pool)] if rng.random() < 0.8 else rng.choice(scope))
                 for n, a in enumerate(agents) if a not in theta or rng.random() < 0.3]
        body: SlFormula = SPath(random_path(rng, atoms, tdepth, rng.randint(1, 4)))
        for a, x in reversed(binds):
            body = SBind(a, x, body)
        return body

    def state(depth, scope, theta, width=1):
        r = rng.random()
        if depth > 0 and r < 0.6:
            return quant(depth, scope, theta)
        if width > 0 and r < 0.8:
            cls = SAnd if rng.random() < 0.5 else SOr
            return cls(state(0, scope, theta, 0), state(depth, scope, theta, width - 1))
        return leaf(scope, theta)

    return quant(max(qdepth, 1), [], {})


def random_hypersl(rng: random.Random, cgs: Cgs, qdepth: int = 2, tdepth: int = 2,
                   pathvars: Sequence[str] = ("p1", "p2")) -> HyperFormula:
    """A well-formed HyperSL formula with at most ``len(pathvars)`` path variables."""
    counter = [0]

    def body(scope):
        m = rng.randint(1, len(pathvars))
        paths = list(pathvars[:m]) if rng.random() < 0.7 else rng.sample(list(pathvars), m)
        bindings = tuple((pi, tuple((a, rng.choice(scope)) for a in cgs.agents))
                         for pi in paths)
        atoms = [Atom(a, pi) for a in cgs.aps for pi in paths]
        return HBody(random_path(rng, atoms, tdepth, rng.randint(1, 4)), bindings)

    def quant(depth, scope):
        counter[0] += 1
        x = f"x{counter[0]}"
        cls = HExists if rng.random() < 0.5 else HForall
        return cls(x, state(depth - 1, scope + [x]))

    def state(depth, scope, width=1):
        r = rng.random()
        if depth > 0 and r < 0.6:
            return quant(depth, scope)
        if width > 0 and r < 0.8:
            cls = HAnd if rng.random() < 0.5 else HOr
            return cls(state(0, scope, 0), state(depth, scope, width - 1))
        return body(scope)

    return quant(max(qdepth, 1), [])


# -- acceptance pools -------------------------------------------------------------

def reactive_instance(seed: int, aps: int = 1) -> Tuple[Cgs, ObservationFamily]:
    """A three-state turn-based game where ``a1`` must react to an unseen opening.

    ``a2`` moves first from ``s0`` to ``s1`` or ``s2``; afterwards ``a1`` alone picks
    successors.  Observation ``o1`` is drawn uniformly among the partitions that
    merge ``s1`` and ``s2``; ``o2`` among all partitions.
    """
    rng = random.Random(seed)
    st = ("s0", "s1", "s2")
    ac = ("c0", "c1")
    ap = tuple("pqrstuvwbdefghjk"[i] for i in range(aps))
    opening = list(st[1:])
    rng.shuffle(opening)
    transition = {}
    for s in st:
        succ = {a: rng.choice(st) for a in ac}
        for p in itertools.product(ac, repeat=2):
            transition[(s, p)] = opening[ac.index(p[1])] if s == "s0" else succ[p[0]]
    labels = {s: frozenset(a for a in ap if rng.random() < 0.5) for s in st}
    cgs = Cgs(st, "s0", ("a1", "a2"), ac, ap, transition, labels)
    parts = set_partitions(st)
    hiding = [p for p in parts if any("s1" in b and "s2" in b for b in p)]
    fam = ObservationFamily(("o1", "o2"), {"o1": rng.choice(hiding), "o2": rng.choice(parts)})
    return cgs, fam


def _reactive_path(rng: random.Random, atoms: Sequence[PathFormula], depth: int) -> PathFormula:
    lit = rng.choice(list(atoms))
    lit = neg(lit) if rng.random() < 0.5 else lit
    r = rng.random()
    if r < 0.5:
        return Next(Next(lit))
    if r < 0.7:
        return eventually(lit)
    return random_path(rng, atoms, depth, rng.randint(1, 3))


def _pool_instance(i: int, seed: int, shape: dict):
    rng = random.Random(seed * 1_000_003 + i)
    inst_seed = rng.randrange(2 ** 31)
    reactive = i % 4 == 3
    if reactive:
        cgs, fam = reactive_instance(inst_seed)
    else:
        cgs, fam = random_instance(inst_seed, states=rng.randint(2, shape.get("states", 3)),
                                   actions=shape.get("actions", 2),
                                   agents=rng.randint(1, shape.get("agents", 2)))
    return rng, reactive, cgs, fam


def slii_pool(count: int = 200, seed: int = 0, **shape) -> List[Tuple[Cgs, ObservationFamily, SlFormula]]:
    """Seeded (instance, SL_ii formula) pairs; every fourth pair is reactive.

    Reactive pairs use :func:`reactive_instance` and the alternation
    ``exists x:o1. forall y:o. bind a1 x. bind a2 y. psi``.
    """
    out = []
    for i in range(count):
        rng, reactive, cgs, fam = _pool_instance(i, seed, shape)
        if reactive:
            psi = _reactive_path(rng, [Atom(a) for a in cgs.aps], 2)
            phi: SlFormula = SExists("x1", "o1", SForall(
                "x2", rng.choice(fam.observations),
                SBind("a1", "x1", SBind("a2", "x2", SPath(psi)))))
        else:
            phi = random_slii(rng, cgs, fam, qdepth=shape.get("qdepth", 2))
        out.append((cgs, fam, phi))
    return out


def hypersl_pool(count: int = 200, seed: int = 0, **shape) -> List[Tuple[Cgs, HyperFormula]]:
    """Seeded (instance, HyperSL formula) pairs with at most two path variables."""
    out = []
    for i in range(count):
        rng, reactive, cgs, fam = _pool_instance(i, seed, shape)
        if reactive:
            phi = two_trace_hypersl(rng, cgs)
        else:
            phi = random_hypersl(rng, cgs, qdepth=shape.get("qdepth", 2))
        out.append((cgs, phi))
    return out


def two_trace_hypersl(rng: random.Random, cgs: Cgs) -> HyperFormula:
    """``Q x1. Q x2. [p1:...; p2:...] psi`` where ``psi`` relates literals of both traces.

    Both traces share ``x1`` for ``a1``; the remaining agents get independent draws.
    """
    def profile():
        return tuple((a, "x1" if a == cgs.agents[0] else rng.choice(("x1", "x2")))
                     for a in cgs.agents)

    def lit(pi):
        a = Atom(rng.choice(cgs.aps), pi)
        return neg(a) if rng.random() < 0.5 else a

    core = And(lit("p1"), lit("p2")) if rng.random() < 0.5 else lor(lit("p1"), lit("p2"))
    psi = rng.choice([Next(core), Next(Next(core)), eventually(core), globally(core), core])
    phi: HyperFormula = HBody(psi, (("p1", profile()), ("p2", profile())))
    for x in ("x2", "x1"):
        phi = (HExists if rng.random() < 0.5 else HForall)(x, phi)
    return phi
