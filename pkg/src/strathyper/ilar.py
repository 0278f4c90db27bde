"""Injectively labeled, action-recording (IL/AR) structures.

:func:`make_il_ar` pairs every state with the action profile that led to it.  The
recorded actions become propositions ``act:<agent>:<action>`` and one proposition
``id:<state>`` per produced state makes the labeling injective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from .cgs import Cgs, CgsError, ObservationFamily, Profile, State

ACT_PREFIX = "act:"
ID_PREFIX = "id:"


def act_ap(agent: str, action: str) -> str:
    return f"{ACT_PREFIX}{agent}:{action}"


def id_ap(state: str) -> str:
    return f"{ID_PREFIX}{state}"


@dataclass(frozen=True)
class IlArCertificate:
    """Which propositions encode ``<agent, action>`` pairs and which are injectivity tags."""

    is_il: bool
    is_ar: bool
    act: Mapping[str, Mapping[str, str]]          # agent -> action -> ap
    ids: Mapping[str, str] = field(default_factory=dict)  # state -> ap

    def act_aps(self) -> List[str]:
        return [ap for per in self.act.values() for ap in per.values()]

    def to_json(self) -> dict:
        return {"is_il": self.is_il, "is_ar": self.is_ar,
                "ap_name_map": {"act": {i: dict(m) for i, m in self.act.items()},
                                "id": dict(self.ids)}}

    @staticmethod
    def from_json(doc: Mapping) -> "IlArCertificate":
        try:
            names = doc["ap_name_map"]
            return IlArCertificate(bool(doc["is_il"]), bool(doc["is_ar"]),
                                   {i: dict(m) for i, m in names["act"].items()},
                                   dict(names.get("id", {})))
        except (KeyError, TypeError, AttributeError):
            raise CgsError("malformed certificate") from None


def is_injectively_labeled(cgs: Cgs) -> bool:
    seen = set()
    for s in cgs.states:
        lab = cgs.labels[s]
        if lab in seen:
            return False
        seen.add(lab)
    return True


def is_action_recording(cgs: Cgs, cert: IlArCertificate) -> bool:
    """Every successor carries exactly the designated APs of the actions just played."""
    known = set(cgs.aps)
    unknown = [ap for ap in cert.act_aps() if ap not in known]
    if unknown:
        raise CgsError(f"certificate names unknown ap(s) {unknown}")
    for i in cgs.agents:
        per = cert.act.get(i, {})
        if any(a not in per for a in cgs.actions):
            return False
    for s in cgs.states:
        for prof in cgs.profiles():
            lab = cgs.labels[cgs.step(s, prof)]
            for i, played in zip(cgs.agents, prof):
                for a, ap in cert.act[i].items():
                    if (ap in lab) != (a == played):
                        return False
    return True


def infer_certificate(cgs: Cgs) -> IlArCertificate:
    """Certificate from the ``act:``/``id:`` naming convention, with both checks run."""
    aps = set(cgs.aps)
    act = {i: {a: act_ap(i, a) for a in cgs.actions if act_ap(i, a) in aps}
           for i in cgs.agents}
    ids = {s: id_ap(s) for s in cgs.states if id_ap(s) in aps}
    cert = IlArCertificate(False, False, act, ids)
    return IlArCertificate(is_injectively_labeled(cgs), is_action_recording(cgs, cert), act, ids)


def product_name(state: State, profile: Profile) -> str:
    return f"{state}|{','.join(profile)}"


def make_il_ar(cgs: Cgs, fam: ObservationFamily,
               prune: bool = True) -> Tuple[Cgs, ObservationFamily, IlArCertificate]:
    """The IL/AR structure over ``S x (Agts -> A)`` and its lifted observation family.

    The initial state records the profile that plays the first declared action for
    every agent.  With ``prune`` only states reachable from it are kept.
    """
    fam.check_covers(cgs.states)
    act = {i: {a: act_ap(i, a) for a in cgs.actions} for i in cgs.agents}
    fresh = [ap for per in act.values() for ap in per.values()]
    clash = sorted(set(fresh) & set(cgs.aps))
    if clash:
        raise CgsError(f"ap(s) {clash} collide with the action-recording namespace")
    profiles = list(cgs.profiles())
    dummy = tuple(cgs.actions[0] for _ in cgs.agents)
    init = (cgs.initial, dummy)

    if prune:
        pairs = [init]
        seen = {init}
        i = 0
        while i < len(pairs):
            s, _ = pairs[i]
            for prof in profiles:
                t = (cgs.step(s, prof), prof)
                if t not in seen:
                    seen.add(t)
                    pairs.append(t)
            i += 1
        order = {(s, p): n for n, (s, p) in
                 enumerate((s, p) for s in cgs.states for p in profiles)}
        pairs.sort(key=order.__getitem__)
    else:
        pairs = [(s, p) for s in cgs.states for p in profiles]

    names: Dict[Tuple[State, Profile], str] = {pair: product_name(*pair) for pair in pairs}
    if len(set(names.values())) != len(names):
        raise CgsError("product state names collide; rename states or actions")
    ids = {names[p]: id_ap(names[p]) for p in pairs}
    clash = sorted(set(ids.values()) & (set(cgs.aps) | set(fresh)))
    if clash:
        raise CgsError(f"ap(s) {clash} collide with the injectivity namespace")

    labels = {}
    for s, p in pairs:
        lab = set(cgs.labels[s])
        lab.update(act_ap(i, a) for i, a in zip(cgs.agents, p))
        lab.add(ids[names[(s, p)]])
        labels[names[(s, p)]] = frozenset(lab)
    transition = {}
    for s, p in pairs:
        for prof in profiles:
            transition[(names[(s, p)], prof)] = names[(cgs.step(s, prof), prof)]
    aps = tuple(cgs.aps) + tuple(fresh) + tuple(ids[names[p]] for p in pairs)
    out = Cgs(tuple(names[p] for p in pairs), names[init], cgs.agents, cgs.actions, aps,
              transition, labels)

    partition = {}
    for o in fam.observations:
        blocks = []
        for block in fam.partition[o]:
            members = set(block)
            lifted = tuple(names[(s, p)] for s, p in pairs if s in members)
            if lifted:
                blocks.append(lifted)
        partition[o] = tuple(blocks)
    out_fam = ObservationFamily(fam.observations, partition)

    cert = IlArCertificate(is_injectively_labeled(out), False, act, ids)
    cert = IlArCertificate(cert.is_il, is_action_recording(out, cert), act, ids)
    return out, out_fam, cert


def base_state(name: str) -> str:
    """Original state of a product state produced by :func:`make_il_ar`."""
    return name.rsplit("|", 1)[0]
