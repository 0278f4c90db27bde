"""Translation of HyperSL formulas into SL_ii formulas over a self-composition.

The self-composition runs one copy of the structure per path variable.  Agent
``a@p`` acts in copy ``p`` and observation ``o_p`` sees only copy ``p``, so a
strategy variable ``x`` turns into one copy ``x@p`` per path variable, and the
``eq`` constraints force the copies to behave as a single strategy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Set, Tuple

from . import ltl
from .cgs import Cgs, CgsError, ObservationFamily
from .ilar import IlArCertificate, infer_certificate
from .ltl import Atom, Next, conj, disj, iff, neg, weak_until
from .syntax import (FormulaError, HAnd, HBody, HExists, HForall, HOr, HyperFormula,
                     SAnd, SBind, SExists, SForall, SlFormula, SOr, SPath, wellformed_hypersl,
                     wellformed_slii, h_and_all, negate_state, path_variables,
                     s_binds, size)

DROP_EQ_CONJUNCT = "drop-eq-conjunct"
WRONG_PATH_ATOM = "wrong-path-atom"
MUTATIONS = (DROP_EQ_CONJUNCT, WRONG_PATH_ATOM)


def composite(name: str, path: str) -> str:
    return f"{name}@{path}"


def obs_name(path: str) -> str:
    return f"o_{path}"


def tuple_name(states: Sequence[str]) -> str:
    return "(" + ",".join(states) + ")"


@dataclass(frozen=True)
class SelfComposition:
    """The product ``G_V`` with its observation family and name maps."""

    product: Cgs
    family: ObservationFamily
    pathvars: Tuple[str, ...]
    state_map: Mapping[str, Tuple[str, ...]]        # tuple name -> component states
    agent_map: Mapping[str, Tuple[str, str]]        # a@p -> (a, p)
    ap_map: Mapping[str, Tuple[str, str]]           # ap@p -> (ap, p)
    base: Cgs

    def agent(self, a: str, path: str) -> str:
        return composite(a, path)

    def ap(self, a: str, path: str) -> str:
        return composite(a, path)

    def name_maps_json(self) -> dict:
        return {"pathvars": list(self.pathvars),
                "states": {k: list(v) for k, v in self.state_map.items()},
                "agents": {k: list(v) for k, v in self.agent_map.items()},
                "aps": {k: list(v) for k, v in self.ap_map.items()}}


def self_compose(cgs: Cgs, pathvars: Sequence[str]) -> SelfComposition:
    pathvars = tuple(pathvars)
    if not pathvars:
        raise CgsError("self-composition needs at least one path variable")
    if len(set(pathvars)) != len(pathvars):
        raise CgsError(f"duplicate path variables {list(pathvars)}")
    m = len(pathvars)
    tuples = list(itertools.product(cgs.states, repeat=m))
    names = {t: tuple_name(t) for t in tuples}
    agent_map = {composite(a, p): (a, p) for p in pathvars for a in cgs.agents}
    ap_map = {composite(a, p): (a, p) for p in pathvars for a in cgs.aps}
    for kind, mapping, expected in (("state", names, len(tuples)),
                                    ("agent", agent_map, m * len(cgs.agents)),
                                    ("ap", ap_map, m * len(cgs.aps))):
        if len(set(mapping.values() if kind == "state" else mapping)) != expected:
            raise CgsError(f"composite {kind} names collide")
    agents = tuple(agent_map)
    n = len(cgs.agents)
    transition = {}
    for t in tuples:
        for prof in itertools.product(cgs.actions, repeat=m * n):
            succ = tuple(cgs.step(s, prof[k * n:(k + 1) * n]) for k, s in enumerate(t))
            transition[(names[t], prof)] = names[succ]
    labels = {names[t]: frozenset(composite(a, p) for s, p in zip(t, pathvars)
                                  for a in cgs.labels[s]) for t in tuples}
    product = Cgs(tuple(names[t] for t in tuples), names[(cgs.initial,) * m], agents,
                  cgs.actions, tuple(ap_map), transition, labels)
    partition = {}
    for k, p in enumerate(pathvars):
        partition[obs_name(p)] = tuple(tuple(names[t] for t in tuples if t[k] == s)
                                       for s in cgs.states)
    family = ObservationFamily(tuple(partition), partition)
    return SelfComposition(product, family, pathvars, {names[t]: t for t in tuples},
                           agent_map, ap_map, cgs)


def _eq_path(cgs: Cgs, cert: IlArCertificate, i1: str, i2: str, pi: str, pj: str):
    same_actions = conj(iff(Atom(composite(cert.act[i1][a], pi)),
                            Atom(composite(cert.act[i2][a], pj))) for a in cgs.actions)
    differ = disj(neg(iff(Atom(composite(a, pi)), Atom(composite(a, pj)))) for a in cgs.aps)
    return weak_until(Next(same_actions), differ)


def build_eq(comp: SelfComposition, x_pi: str, x_pj: str, pi: str, pj: str,
             cert: Optional[IlArCertificate] = None, tag: str = "") -> SlFormula:
    """``eq(x_pi, x_pj)``: the copies ``x_pi`` and ``x_pj`` act as one strategy.

    The auxiliary variables are named ``y:<agent>@<path>`` plus ``tag``.
    """
    base = comp.base
    cert = cert or _require_ar(base)
    ys = {(j, r): f"y:{j}@{r}{tag}" for r in comp.pathvars for j in base.agents}
    clash = {x_pi, x_pj} & set(ys.values())
    if clash:
        raise FormulaError(f"variable(s) {sorted(clash)} collide with generated names")
    parts = []
    for i1 in base.agents:
        for i2 in base.agents:
            psi = _eq_path(base, cert, i1, i2, pi, pj)
            parts.append(s_binds([(composite(i1, pi), x_pi), (composite(i2, pj), x_pj)],
                                 SPath(psi)))
    out = h_and_all(parts)
    out = s_binds([(composite(j, r), ys[(j, r)]) for r in comp.pathvars for j in base.agents],
                  out)
    for r in reversed(comp.pathvars):
        for j in reversed(base.agents):
            out = SForall(ys[(j, r)], obs_name(r), out)
    return out


def _require_ar(cgs: Cgs) -> IlArCertificate:
    cert = infer_certificate(cgs)
    if not (cert.is_il and cert.is_ar):
        raise CgsError("the encoding needs an IL/AR base structure (see make_il_ar)")
    return cert


def _body_bindings(body: HBody, agents: Sequence[str],
                   pathvars: Sequence[str]) -> List[Tuple[str, str, str]]:
    """(agent, path, variable) bindings for every copy, path-major.

    Copies the body does not mention follow the first profile so that every
    agent of the composition is bound.
    """
    profiles = {pi: dict(prof) for pi, prof in body.bindings}
    filler = dict(body.bindings[0][1])
    out = []
    for r in pathvars:
        prof = profiles.get(r, filler)
        for a in agents:
            out.append((a, r, prof[a]))
    return out


def copy_usage(phi: HyperFormula, var: str, agents: Sequence[str],
               pathvars: Sequence[str]) -> Set[str]:
    """Path variables ``p`` such that ``var@p`` is bound in some body in scope."""
    used: Set[str] = set()

    def go(f):
        if isinstance(f, HBody):
            used.update(r for _, r, v in _body_bindings(f, agents, pathvars) if v == var)
        elif isinstance(f, (HAnd, HOr)):
            go(f.left)
            go(f.right)
        elif isinstance(f, (HForall, HExists)):
            if f.var != var:
                go(f.body)

    go(phi)
    return used


def translate_hypersl(phi: HyperFormula, cgs: Cgs, prune: bool = False,
                      cert: Optional[IlArCertificate] = None,
                      mutation: Optional[str] = None,
                      pathvars: Optional[Sequence[str]] = None
                      ) -> Tuple[SelfComposition, SlFormula]:
    """Self-composition over the path variables of ``phi`` and the SL_ii translation.

    Without ``prune`` every quantifier yields one copy per path variable and the
    ``|V|^2`` constraints ``eq(x_p, x_q)``.  With ``prune`` only copies bound in
    some body are quantified and ``eq`` is emitted for each pair ``p < q`` of them.

    ``mutation`` breaks the encoding on purpose: ``"drop-eq-conjunct"`` omits the
    first ``eq`` constraint between distinct copies of every quantifier, ``"wrong-path-atom"`` moves atoms
    of the first path variable to the second copy.
    """
    if mutation not in (None,) + MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    wellformed_hypersl(phi, cgs.agents)
    cert = cert or _require_ar(cgs)
    pathvars = tuple(pathvars) if pathvars is not None else tuple(path_variables(phi))
    comp = self_compose(cgs, pathvars)
    agents = cgs.agents
    counter = itertools.count(1)

    def atom_path(p: str) -> str:
        if mutation == WRONG_PATH_ATOM and len(pathvars) > 1 and p == pathvars[0]:
            return pathvars[1]
        return p

    def go(f) -> SlFormula:
        if isinstance(f, HBody):
            binds = [(composite(a, r), composite(v, r))
                     for a, r, v in _body_bindings(f, agents, pathvars)]
            psi = ltl.map_atoms(f.psi, lambda a: Atom(composite(a.name, atom_path(a.path))))
            return s_binds(binds, SPath(psi))
        if isinstance(f, HAnd):
            return SAnd(go(f.left), go(f.right))
        if isinstance(f, HOr):
            return SOr(go(f.left), go(f.right))
        if isinstance(f, (HForall, HExists)):
            x = f.var
            if prune:
                used = copy_usage(f.body, x, agents, pathvars)
                copies = [p for p in pathvars if p in used]
                pairs = [(p, q) for p, q in itertools.combinations(copies, 2)]
            else:
                copies = list(pathvars)
                pairs = [(p, q) for p in copies for q in copies]
            if mutation == DROP_EQ_CONJUNCT:
                cross = [pq for pq in pairs if pq[0] != pq[1]]
                if cross:
                    pairs.remove(cross[0])
            tag = f"#{next(counter)}"
            eqs = [build_eq(comp, composite(x, p), composite(x, q), p, q, cert,
                            tag=f"{tag}.{k}")
                   for k, (p, q) in enumerate(pairs, 1)]
            body = go(f.body)
            if eqs:
                guard = h_and_all(eqs)
                if isinstance(f, HExists):
                    body = SAnd(guard, body)
                else:
                    body = SOr(negate_state(guard), body)
            cls = SExists if isinstance(f, HExists) else SForall
            for p in reversed(copies):
                body = cls(composite(x, p), obs_name(p), body)
            return body
        raise FormulaError(f"not a HyperSL formula: {f!r}")

    out = go(phi)
    wellformed_slii(out, comp.product.agents, comp.family.observations)
    return comp, out


def _is_eq_block(f) -> bool:
    return isinstance(f, (SForall, SExists)) and f.var.startswith(("y:", "y':"))


def _is_guard(f) -> bool:
    if _is_eq_block(f):
        return True
    return isinstance(f, (SAnd, SOr)) and _is_guard(f.left) and _is_guard(f.right)


def _count_eq_blocks(f) -> int:
    if _is_eq_block(f):
        return 1
    return _count_eq_blocks(f.left) + _count_eq_blocks(f.right)


def _base(copy: str) -> str:
    return copy.rsplit("@", 1)[0]


def measure_translation(out: SlFormula) -> dict:
    """Eq-constraint counts per translated quantifier and binding counts per body,
    read off the output formula."""
    eq_counts: List[int] = []
    bindings: List[int] = []

    def go(f, chain: int):
        if isinstance(f, (SForall, SExists)):
            if _is_eq_block(f):
                return
            b = f.body
            same_chain = (isinstance(b, (SForall, SExists)) and not _is_eq_block(b)
                          and _base(b.var) == _base(f.var))
            if not same_chain:
                eq_counts.append(_count_eq_blocks(b.left)
                                 if isinstance(b, (SAnd, SOr)) and _is_guard(b.left) else 0)
            go(f.body, 0)
        elif isinstance(f, SBind):
            go(f.body, chain + 1)
        elif isinstance(f, SPath):
            bindings.append(chain)
        else:
            for c in (f.left, f.right):
                if not _is_eq_block(c):
                    go(c, 0)

    go(out, 0)
    return {"eq_constraints": eq_counts, "body_bindings": bindings}


def size_report_h2s(phi: HyperFormula, cgs: Cgs, prune: bool = False,
                    cert: Optional[IlArCertificate] = None) -> dict:
    """Node counts of ``eq``, per-quantifier overhead and per-body bindings vs. the bound."""
    cert = cert or _require_ar(cgs)
    comp, out = translate_hypersl(phi, cgs, prune, cert)
    n, m = len(cgs.agents), len(comp.pathvars)
    p0, p1 = comp.pathvars[0], comp.pathvars[-1]
    eq_nodes = size(build_eq(comp, "x@" + p0, "x@" + p1, p0, p1, cert))
    measured = measure_translation(out)
    bound = size(phi) * m ** 3 * n ** 2 * (len(cgs.actions) + len(cgs.aps))
    total = size(out)
    return {"formula_nodes": size(phi), "translation_nodes": total,
            "pathvars": m, "agents": n, "actions": len(cgs.actions), "aps": len(cgs.aps),
            "eq_nodes": eq_nodes,
            "eq_bound": n * m + n * n * (len(cgs.actions) + len(cgs.aps)),
            "eq_constraints": measured["eq_constraints"],
            "body_bindings": measured["body_bindings"],
            "composition_states": len(comp.product.states),
            "bound_expression": "|phi| * |V|^3 * n^2 * (|A| + |AP|)",
            "bound": bound, "ratio": total / bound if bound else None}
