"""Translation of SL_ii formulas into HyperSL formulas over the same IL/AR structure.

An observation-restricted quantifier becomes a full-information quantifier guarded
by ``ii_o(x)``, a HyperSL formula stating that ``x`` never distinguishes two
``~o``-related situations.
"""

from __future__ import annotations

from typing import Dict, List, Optional

from . import ltl
from .cgs import Cgs, CgsError, ObservationFamily
from .ilar import IlArCertificate, infer_certificate, is_injectively_labeled
from .ltl import And, Atom, Next, PathFormula, conj, disj, iff, neg, weak_until
from .syntax import (FormulaError, HAnd, HBody, HExists, HForall, HOr, HyperFormula,
                     SAnd, SBind, SExists, SForall, SlFormula, SOr, SPath, wellformed_hypersl,
                     wellformed_slii, h_and_all, iter_state, negate_state, size,
                     strategy_variables)

MAIN_PATH = "pi"
PATH_1, PATH_2 = "pi1", "pi2"
DROP_II_EXISTS = "drop-ii-exists"
MUTATIONS = (DROP_II_EXISTS,)


def _characterize(cgs: Cgs, state: str, path: str) -> PathFormula:
    lab = cgs.labels[state]
    return conj(Atom(a, path) if a in lab else neg(Atom(a, path)) for a in cgs.aps)


def build_ind(cgs: Cgs, fam: ObservationFamily, o: str, pi1: str = PATH_1,
              pi2: str = PATH_2) -> PathFormula:
    """Holds at a position iff the current ``pi1`` and ``pi2`` states are ``~o``-related."""
    if not is_injectively_labeled(cgs):
        raise CgsError("ind_o needs an injectively labeled structure")
    return disj(And(_characterize(cgs, s, pi1), _characterize(cgs, t, pi2))
                for s, t in fam.relation(o, cgs.states))


class FreshNames:
    """Generates ``y:<agent>#c`` / ``y':<agent>#c`` names that avoid user variables."""

    def __init__(self, taken=()):
        self.taken = set(taken)
        self.counter = 0

    def scope(self, agents) -> tuple:
        self.counter += 1
        ys = [f"y:{i}#{self.counter}" for i in agents]
        yps = [f"y':{i}#{self.counter}" for i in agents]
        clash = sorted(set(ys + yps) & self.taken)
        if clash:
            raise FormulaError(f"variable(s) {clash} collide with generated names")
        return ys, yps


def _act_iffs(cgs: Cgs, cert: IlArCertificate, agent: str) -> PathFormula:
    per = cert.act[agent]
    return conj(iff(Atom(per[a], PATH_1), Atom(per[a], PATH_2)) for a in cgs.actions)


def build_ii(cgs: Cgs, fam: ObservationFamily, o: str, x: str,
             cert: Optional[IlArCertificate] = None,
             names: Optional[FreshNames] = None,
             ind: Optional[PathFormula] = None) -> HyperFormula:
    """``ii_o(x)``: ``x``, played by any agent, is an ``o``-strategy where it matters."""
    cert = cert or _require_ar(cgs)
    names = names or FreshNames({x})
    ys, yps = names.scope(cgs.agents)
    if x in ys or x in yps:
        raise FormulaError(f"variable {x!r} collides with generated names")
    ind = ind if ind is not None else build_ind(cgs, fam, o)
    not_ind = neg(ind)
    bodies = []
    for n, i in enumerate(cgs.agents):
        psi = weak_until(Next(_act_iffs(cgs, cert, i)), not_ind)
        p1 = tuple((j, x if j == i else ys[m]) for m, j in enumerate(cgs.agents))
        p2 = tuple((j, x if j == i else yps[m]) for m, j in enumerate(cgs.agents))
        bodies.append(HBody(psi, ((PATH_1, p1), (PATH_2, p2))))
    out: HyperFormula = h_and_all(bodies)
    for v in reversed(ys + yps):
        out = HForall(v, out)
    return out


def _require_ar(cgs: Cgs) -> IlArCertificate:
    cert = infer_certificate(cgs)
    if not (cert.is_il and cert.is_ar):
        raise CgsError("the encoding needs an IL/AR structure (see make_il_ar)")
    return cert


def translate_path(psi: PathFormula, path: str = MAIN_PATH) -> PathFormula:
    return ltl.map_atoms(psi, lambda a: Atom(a.name, path))


def translate_slii(phi: SlFormula, cgs: Cgs, fam: ObservationFamily,
                   cert: Optional[IlArCertificate] = None,
                   mutation: Optional[str] = None) -> HyperFormula:
    """The HyperSL formula equivalent to ``phi`` on the IL/AR structure ``cgs``.

    ``mutation`` deliberately breaks the encoding to test the harness; the only
    supported value, ``"drop-ii-exists"``, omits the guard of existential quantifiers.
    """
    if mutation not in (None,) + MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    wellformed_slii(phi, cgs.agents, fam.observations)
    cert = cert or _require_ar(cgs)
    names = FreshNames(strategy_variables(phi))
    inds: Dict[str, PathFormula] = {}

    def ii(o, x):
        if o not in inds:
            inds[o] = build_ind(cgs, fam, o)
        return build_ii(cgs, fam, o, x, cert, names, inds[o])

    def go(f: SlFormula, prof: Dict[str, str]) -> HyperFormula:
        if isinstance(f, SPath):
            missing = [a for a in cgs.agents if a not in prof]
            if missing:
                raise FormulaError(f"agent unbound at path formula: {', '.join(missing)}")
            profile = tuple((a, prof[a]) for a in cgs.agents)
            return HBody(translate_path(f.psi), ((MAIN_PATH, profile),))
        if isinstance(f, SAnd):
            return HAnd(go(f.left, prof), go(f.right, prof))
        if isinstance(f, SOr):
            return HOr(go(f.left, prof), go(f.right, prof))
        if isinstance(f, SBind):
            return go(f.body, {**prof, f.agent: f.var})
        if isinstance(f, SExists):
            body = go(f.body, prof)
            if mutation == DROP_II_EXISTS:
                return HExists(f.var, body)
            return HExists(f.var, HAnd(ii(f.obs, f.var), body))
        if isinstance(f, SForall):
            return HForall(f.var, HOr(negate_state(ii(f.obs, f.var)), go(f.body, prof)))
        raise FormulaError(f"not an SL_ii formula: {f!r}")

    out = go(phi, {})
    wellformed_hypersl(out, cgs.agents)
    return out


def relation_size(cgs: Cgs, fam: ObservationFamily, o: str) -> int:
    return len(fam.relation(o, cgs.states))


def size_report_s2h(phi: SlFormula, cgs: Cgs, fam: ObservationFamily,
                    cert: Optional[IlArCertificate] = None) -> dict:
    """Node counts of ``ind_o``, ``ii_o`` and the translation against the size bound."""
    cert = cert or _require_ar(cgs)
    used = sorted({f.obs for f in _quantifiers(phi)}, key=list(fam.observations).index)
    per_obs = {}
    for o in used:
        ind = build_ind(cgs, fam, o)
        ii = build_ii(cgs, fam, o, "x", cert, FreshNames(), ind)
        per_obs[o] = {"relation_pairs": relation_size(cgs, fam, o),
                      "ind_nodes": ltl.size(ind), "ii_nodes": size(ii),
                      "ind_bound": len(cgs.aps) * relation_size(cgs, fam, o)}
    out = translate_slii(phi, cgs, fam, cert)
    max_rel = max((relation_size(cgs, fam, o) for o in fam.observations), default=0)
    bound = size(phi) * len(cgs.agents) * (len(cgs.actions) + len(cgs.aps) * max_rel)
    total = size(out)
    return {"formula_nodes": size(phi), "translation_nodes": total,
            "agents": len(cgs.agents), "actions": len(cgs.actions), "aps": len(cgs.aps),
            "max_relation_pairs": max_rel, "observations": per_obs,
            "bound_expression": "|phi| * n * (|A| + |AP| * max_o |~o|)",
            "bound": bound, "ratio": total / bound if bound else None}


def _quantifiers(phi) -> List:
    return [f for f in iter_state(phi) if isinstance(f, (SForall, SExists))]
