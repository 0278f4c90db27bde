"""Concurrent game structures, observation families, finite-memory strategies and plays."""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

State = str
Agent = str
Action = str
Profile = Tuple[Action, ...]  # actions in declared agent order

WINDOW = "window"
HORIZON = "horizon"
MEMORY_KINDS = (WINDOW, HORIZON)


class CgsError(ValueError):
    """Raised for malformed game structures, families or strategies."""


def _check_unique(kind: str, items: Sequence[str]) -> None:
    seen = set()
    for item in items:
        if not isinstance(item, str):
            raise CgsError(f"{kind} identifier must be a string, got {item!r}")
        if item in seen:
            raise CgsError(f"duplicate {kind} identifier {item!r}")
        seen.add(item)


@dataclass(frozen=True)
class Cgs:
    """A finite concurrent game structure.

    ``transition`` maps ``(state, profile)`` to the successor, where ``profile``
    lists one action per agent in the order of ``agents``.
    """

    states: Tuple[State, ...]
    initial: State
    agents: Tuple[Agent, ...]
    actions: Tuple[Action, ...]
    aps: Tuple[str, ...]
    transition: Mapping[Tuple[State, Profile], State]
    labels: Mapping[State, FrozenSet[str]]

    def __post_init__(self):
        for kind, items in (("state", self.states), ("agent", self.agents),
                            ("action", self.actions), ("ap", self.aps)):
            _check_unique(kind, items)
        if not self.states:
            raise CgsError("a CGS needs at least one state")
        if not self.agents:
            raise CgsError("a CGS needs at least one agent")
        if not self.actions:
            raise CgsError("a CGS needs at least one action")
        if self.initial not in self.states:
            raise CgsError(f"unknown initial state {self.initial!r}")
        state_set = set(self.states)
        ap_set = set(self.aps)
        for s, lab in self.labels.items():
            if s not in state_set:
                raise CgsError(f"label for unknown state {s!r}")
            unknown = set(lab) - ap_set
            if unknown:
                raise CgsError(f"state {s!r} carries unknown ap(s) {sorted(unknown)}")
        missing_labels = state_set - set(self.labels)
        if missing_labels:
            raise CgsError(f"missing labels for state(s) {sorted(missing_labels)}")
        act_set = set(self.actions)
        for (s, prof), t in self.transition.items():
            if s not in state_set:
                raise CgsError(f"transition from unknown state {s!r}")
            if len(prof) != len(self.agents) or not set(prof) <= act_set:
                raise CgsError(f"bad action profile {prof!r} from state {s!r}")
            if t not in state_set:
                raise CgsError(f"transition to unknown state {t!r}")
        for s in self.states:
            for prof in self.profiles():
                if (s, prof) not in self.transition:
                    named = dict(zip(self.agents, prof))
                    raise CgsError(f"non-total transition: no successor for state {s!r} "
                                   f"under profile {named}")

    def profiles(self) -> Iterator[Profile]:
        """All action profiles, in lexicographic declared order."""
        return itertools.product(self.actions, repeat=len(self.agents))

    def step(self, state: State, profile: Profile) -> State:
        return self.transition[(state, profile)]

    def successors(self, state: State) -> List[State]:
        out: List[State] = []
        for prof in self.profiles():
            t = self.transition[(state, prof)]
            if t not in out:
                out.append(t)
        return out

    def reachable(self, start: Optional[State] = None) -> List[State]:
        """States reachable from ``start`` (default: initial), in BFS order."""
        start = self.initial if start is None else start
        order = [start]
        seen = {start}
        i = 0
        while i < len(order):
            for t in self.successors(order[i]):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
            i += 1
        return order


@dataclass(frozen=True)
class ObservationFamily:
    """One partition of the state set per observation symbol."""

    observations: Tuple[str, ...]
    partition: Mapping[str, Tuple[Tuple[State, ...], ...]]
    _block_of: Dict[str, Dict[State, int]] = field(default_factory=dict, compare=False,
                                                   repr=False, hash=False)

    def __post_init__(self):
        _check_unique("observation", self.observations)
        if set(self.partition) != set(self.observations):
            raise CgsError("partition keys must match the declared observations")
        for o in self.observations:
            index: Dict[State, int] = {}
            for b, block in enumerate(self.partition[o]):
                if not block:
                    raise CgsError(f"observation {o!r} has an empty block")
                for s in block:
                    if s in index:
                        raise CgsError(f"state {s!r} occurs twice in observation {o!r}")
                    index[s] = b
            self._block_of[o] = index

    def check_covers(self, states: Sequence[State]) -> None:
        for o in self.observations:
            index = self._block_of[o]
            if set(index) != set(states):
                missing = set(states) - set(index)
                extra = set(index) - set(states)
                raise CgsError(f"observation {o!r} does not partition the states "
                               f"(missing {sorted(missing)}, unknown {sorted(extra)})")

    def block(self, o: str, state: State) -> int:
        try:
            return self._block_of[o][state]
        except KeyError:
            if o not in self._block_of:
                raise CgsError(f"unknown observation {o!r}") from None
            raise CgsError(f"state {state!r} not covered by observation {o!r}") from None

    def block_map(self, o: str) -> Dict[State, int]:
        if o not in self._block_of:
            raise CgsError(f"unknown observation {o!r}")
        return self._block_of[o]

    def related(self, o: str, s: State, t: State) -> bool:
        return self.block(o, s) == self.block(o, t)

    def relation(self, o: str, states: Sequence[State]) -> List[Tuple[State, State]]:
        """Ordered pairs of ``~o``, lexicographic in the given state order."""
        return [(s, t) for s in states for t in states if self.related(o, s, t)]


def full_information(states: Sequence[State], name: str = "full") -> ObservationFamily:
    return ObservationFamily((name,), {name: tuple((s,) for s in states)})


# -- strategies -------------------------------------------------------------------

def window_key(prefix: Sequence, k: int, memory: str) -> tuple:
    """The part of a (symbol) prefix a memory-``k`` strategy looks at."""
    if memory == WINDOW:
        return tuple(prefix[max(0, len(prefix) - k):])
    if memory == HORIZON:
        return tuple(prefix[:k])
    raise CgsError(f"unknown memory kind {memory!r}")


def extend_key(key: tuple, symbol, k: int, memory: str) -> tuple:
    """Key after appending ``symbol`` to the prefix that produced ``key``."""
    if len(key) < k:
        return key + (symbol,)
    if memory == HORIZON:
        return key
    return key[1:] + (symbol,)


@dataclass(frozen=True)
class FiniteMemoryStrategy:
    """A total table from windows to actions.

    ``mode`` is ``None`` for full information (windows are state sequences) or an
    observation symbol (windows are sequences of block indices).  With the
    ``window`` memory the last ``min(len, k)`` symbols of the prefix are read, with
    ``horizon`` memory the first ``min(len, k)``: the strategy has perfect recall
    for ``k`` steps and then keeps playing its last decision.
    """

    window: int
    mode: Optional[str]
    table: Mapping[tuple, Action]
    memory: str = WINDOW

    def __post_init__(self):
        if self.window < 1:
            raise CgsError("window must be positive")
        if self.memory not in MEMORY_KINDS:
            raise CgsError(f"unknown memory kind {self.memory!r}")

    def symbol(self, state: State, fam: Optional[ObservationFamily]):
        if self.mode is None:
            return state
        if fam is None:
            raise CgsError(f"strategy observes {self.mode!r} but no family was given")
        return fam.block(self.mode, state)

    def key(self, prefix: Sequence[State], fam: Optional[ObservationFamily] = None) -> tuple:
        return window_key([self.symbol(s, fam) for s in prefix], self.window, self.memory)

    def __call__(self, prefix: Sequence[State], fam: Optional[ObservationFamily] = None) -> Action:
        key = self.key(prefix, fam)
        try:
            return self.table[key]
        except KeyError:
            raise CgsError(f"strategy table has no entry for window {key!r}") from None

    def lift(self, cgs: Cgs, fam: ObservationFamily) -> "FiniteMemoryStrategy":
        """The equivalent full-information table."""
        table = {}
        for w in windows(cgs.states, self.window):
            table[w] = self(list(w), fam)
        return FiniteMemoryStrategy(self.window, None, table, self.memory)


def windows(symbols: Sequence, k: int) -> List[tuple]:
    """All sequences of length 1..k, shortest first, lexicographic within a length."""
    out: List[tuple] = []
    for length in range(1, k + 1):
        out.extend(itertools.product(symbols, repeat=length))
    return out


def mode_symbols(cgs: Cgs, fam: Optional[ObservationFamily], mode: Optional[str]) -> List:
    if mode is None:
        return list(cgs.states)
    if fam is None:
        raise CgsError(f"mode {mode!r} needs an observation family")
    if mode not in fam.partition:
        raise CgsError(f"unknown observation {mode!r}")
    return list(range(len(fam.partition[mode])))


def enumerate_strategies(cgs: Cgs, fam: Optional[ObservationFamily], k: int,
                         mode: Optional[str] = None,
                         memory: str = WINDOW) -> Iterator[FiniteMemoryStrategy]:
    """Every total window table exactly once, in a fixed order."""
    if k < 1:
        raise CgsError("window must be positive")
    ws = windows(mode_symbols(cgs, fam, mode), k)
    for choice in itertools.product(cgs.actions, repeat=len(ws)):
        yield FiniteMemoryStrategy(k, mode, dict(zip(ws, choice)), memory)


def count_strategies(cgs: Cgs, fam: Optional[ObservationFamily], k: int,
                     mode: Optional[str] = None) -> int:
    return len(cgs.actions) ** len(windows(mode_symbols(cgs, fam, mode), k))


def indistinguishable_prefixes(fam: ObservationFamily, o: str,
                               p: Sequence[State], q: Sequence[State]) -> bool:
    if o not in fam.observations:
        raise CgsError(f"unknown observation {o!r}")
    return len(p) == len(q) and all(fam.related(o, s, t) for s, t in zip(p, q))


def is_o_strategy(cgs: Cgs, fam: ObservationFamily, o: str, f: FiniteMemoryStrategy) -> bool:
    """Whether a full-information table answers alike on ``~o``-related windows."""
    if f.mode is not None:
        raise CgsError("is_o_strategy expects a full-information strategy")
    blocks = fam.block_map(o)
    seen: Dict[tuple, Action] = {}
    for w in windows(cgs.states, f.window):
        sig = tuple(blocks[s] for s in w)
        a = f.table[w]
        if seen.setdefault(sig, a) != a:
            return False
    return True


# -- plays ------------------------------------------------------------------------

@dataclass(frozen=True)
class Lasso:
    """The ultimately periodic word ``stem . loop^omega``."""

    stem: Tuple
    loop: Tuple

    def __post_init__(self):
        if not self.loop:
            raise CgsError("lasso loop must be non-empty")

    def __len__(self):
        return len(self.stem) + len(self.loop)

    def at(self, i: int):
        if i < len(self.stem):
            return self.stem[i]
        return self.loop[(i - len(self.stem)) % len(self.loop)]

    def prefix(self, n: int) -> List:
        return [self.at(i) for i in range(n)]

    def map(self, fn) -> "Lasso":
        return Lasso(tuple(fn(x) for x in self.stem), tuple(fn(x) for x in self.loop))

    def unrolled(self, stem_len: int, loop_len: int) -> "Lasso":
        """Same word with a longer stem and a loop repeated to ``loop_len``."""
        if stem_len < len(self.stem) or loop_len % len(self.loop):
            raise CgsError("can only lengthen the stem and multiply the loop")
        stem = tuple(self.at(i) for i in range(stem_len))
        loop = tuple(self.at(stem_len + i) for i in range(loop_len))
        return Lasso(stem, loop)


def play_lasso(cgs: Cgs, start: State, profile: Mapping[Agent, FiniteMemoryStrategy],
               fam: Optional[ObservationFamily] = None) -> Lasso:
    """The unique play from ``start`` under ``profile``, as a lasso.

    The loop closes at the first repetition of (state, every agent's window).
    """
    missing = [a for a in cgs.agents if a not in profile]
    if missing:
        raise CgsError(f"no strategy for agent(s) {missing}")
    strats = [profile[a] for a in cgs.agents]
    keys = [(f.symbol(start, fam),) for f in strats]
    path = [start]
    seen: Dict[tuple, int] = {}
    while True:
        state = path[-1]
        config = (state, tuple(keys))
        if config in seen:
            i = seen[config]
            return Lasso(tuple(path[:i]), tuple(path[i:-1]))
        seen[config] = len(path) - 1
        try:
            prof = tuple(f.table[key] for f, key in zip(strats, keys))
        except KeyError as exc:
            raise CgsError(f"strategy table has no entry for window {exc.args[0]!r}") from None
        nxt = cgs.step(state, prof)
        path.append(nxt)
        keys = [extend_key(key, f.symbol(nxt, fam), f.window, f.memory)
                for f, key in zip(strats, keys)]


# -- JSON -------------------------------------------------------------------------

def cgs_from_json(doc: Mapping) -> Tuple[Cgs, ObservationFamily]:
    """Validate a raw JSON description and build the CGS and its observation family."""
    if not isinstance(doc, Mapping):
        raise CgsError("CGS document must be a JSON object")
    required = ("states", "initial", "agents", "actions", "aps", "transitions", "observations")
    absent = [k for k in required if k not in doc]
    if absent:
        raise CgsError(f"missing field(s): {', '.join(absent)}")
    try:
        states = tuple(s["id"] for s in doc["states"])
        labels = {s["id"]: frozenset(s["labels"]) for s in doc["states"]}
    except (KeyError, TypeError):
        raise CgsError("each state must be an object with 'id' and 'labels'") from None
    agents = tuple(doc["agents"])
    actions = tuple(doc["actions"])
    _check_unique("agent", agents)
    _check_unique("state", states)
    transition: Dict[Tuple[State, Profile], State] = {}
    for entry in doc["transitions"]:
        try:
            src, prof, dst = entry["from"], entry["profile"], entry["to"]
        except (KeyError, TypeError):
            raise CgsError("each transition needs 'from', 'profile' and 'to'") from None
        if set(prof) != set(agents):
            raise CgsError(f"transition from {src!r}: profile must name exactly the agents "
                           f"{list(agents)}, got {sorted(prof)}")
        key = (src, tuple(prof[a] for a in agents))
        if key in transition and transition[key] != dst:
            raise CgsError(f"conflicting transitions from {src!r} under {prof}")
        transition[key] = dst
    cgs = Cgs(states, doc["initial"], agents, actions, tuple(doc["aps"]), transition, labels)
    obs = doc["observations"]
    if not isinstance(obs, Mapping):
        raise CgsError("'observations' must map observation names to lists of blocks")
    fam = ObservationFamily(tuple(obs), {o: tuple(tuple(b) for b in blocks)
                                         for o, blocks in obs.items()})
    fam.check_covers(states)
    return cgs, fam


def validate_cgs(raw) -> Tuple[Cgs, ObservationFamily]:
    """Parse (if needed) and validate a JSON CGS description."""
    if isinstance(raw, (str, bytes)):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CgsError(f"malformed JSON: {exc}") from None
    return cgs_from_json(raw)


def cgs_to_json(cgs: Cgs, fam: Optional[ObservationFamily] = None) -> dict:
    fam = fam if fam is not None else ObservationFamily((), {})
    return {
        "states": [{"id": s, "labels": [a for a in cgs.aps if a in cgs.labels[s]]}
                   for s in cgs.states],
        "initial": cgs.initial,
        "agents": list(cgs.agents),
        "actions": list(cgs.actions),
        "aps": list(cgs.aps),
        "transitions": [{"from": s, "profile": dict(zip(cgs.agents, prof)),
                         "to": cgs.transition[(s, prof)]}
                        for s in cgs.states for prof in cgs.profiles()],
        "observations": {o: [list(b) for b in fam.partition[o]] for o in fam.observations},
    }


def dumps(doc) -> str:
    """Canonical serialization used for files and digests."""
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def digest(cgs: Cgs, fam: Optional[ObservationFamily] = None) -> str:
    blob = json.dumps(cgs_to_json(cgs, fam), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
