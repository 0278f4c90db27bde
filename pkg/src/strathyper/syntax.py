"""Formula ASTs for strategy logic with imperfect information and for HyperSL.

Concrete syntax shared by both logics::

    forall x:o. phi        exists x:o. phi       (observation-annotated quantifiers)
    forall x. phi          exists x, y. phi      (full-information quantifiers)
    bind a1 x. phi                               (agent binding)
    [p1:(a1=x, a2=y); p2:(a1=y, a2=y)] psi       (path bindings of a hyper body)
    ! & | -> <->  X F G U W  true false          (path connectives)
    goal   "act:a1:l"   goal@p1                  (atoms, quoted names, indexed atoms)

Quantifiers, bindings and hyper bodies extend as far to the right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from . import ltl
from .ltl import (FALSE, TRUE, And, Atom, Next, Not, PathFormula, TrueConst, Until,
                  eventually, globally, iff, implies, lor, neg, weak_until)


class FormulaError(ValueError):
    """Syntax or well-formedness error; ``pos`` is a character offset when known."""

    def __init__(self, message: str, pos: Optional[int] = None, text: Optional[str] = None):
        if pos is not None and text is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"{message} at line {line}, column {col}"
        super().__init__(message)
        self.pos = pos


# -- SL_ii ------------------------------------------------------------------------

class SlFormula:
    __slots__ = ()


@dataclass(frozen=True)
class SPath(SlFormula):
    psi: PathFormula


@dataclass(frozen=True)
class SAnd(SlFormula):
    left: SlFormula
    right: SlFormula


@dataclass(frozen=True)
class SOr(SlFormula):
    left: SlFormula
    right: SlFormula


@dataclass(frozen=True)
class SForall(SlFormula):
    var: str
    obs: str
    body: SlFormula


@dataclass(frozen=True)
class SExists(SlFormula):
    var: str
    obs: str
    body: SlFormula


@dataclass(frozen=True)
class SBind(SlFormula):
    agent: str
    var: str
    body: SlFormula


def s_and(a: SlFormula, b: SlFormula) -> SlFormula:
    """Conjunction; two path formulas under the same bindings merge into one."""
    if isinstance(a, SPath) and isinstance(b, SPath):
        return SPath(And(a.psi, b.psi))
    return SAnd(a, b)


def s_or(a: SlFormula, b: SlFormula) -> SlFormula:
    if isinstance(a, SPath) and isinstance(b, SPath):
        return SPath(lor(a.psi, b.psi))
    return SOr(a, b)


def s_binds(pairs: Iterable[Tuple[str, str]], body: SlFormula) -> SlFormula:
    """Nest ``bind agent var.`` prefixes, first pair outermost."""
    pairs = list(pairs)
    for agent, var in reversed(pairs):
        body = SBind(agent, var, body)
    return body


# -- HyperSL ----------------------------------------------------------------------

class HyperFormula:
    __slots__ = ()


Profile = Tuple[Tuple[str, str], ...]  # (agent, strategy variable) pairs


@dataclass(frozen=True)
class HBody(HyperFormula):
    """``psi[pi_k : profile_k]``; ``bindings`` pairs each path variable with a profile."""

    psi: PathFormula
    bindings: Tuple[Tuple[str, Profile], ...]


@dataclass(frozen=True)
class HAnd(HyperFormula):
    left: HyperFormula
    right: HyperFormula


@dataclass(frozen=True)
class HOr(HyperFormula):
    left: HyperFormula
    right: HyperFormula


@dataclass(frozen=True)
class HForall(HyperFormula):
    var: str
    body: HyperFormula


@dataclass(frozen=True)
class HExists(HyperFormula):
    var: str
    body: HyperFormula


def h_and_all(fs: Sequence) -> object:
    """Left-nested conjunction of state formulas (either logic); needs one operand."""
    out = fs[0]
    for f in fs[1:]:
        out = s_and(out, f) if isinstance(out, SlFormula) else HAnd(out, f)
    return out


def h_or_all(fs: Sequence) -> object:
    out = fs[0]
    for f in fs[1:]:
        out = s_or(out, f) if isinstance(out, SlFormula) else HOr(out, f)
    return out


# -- generic helpers --------------------------------------------------------------

def negate_state(phi):
    """The dual of a state formula: quantifiers, conjunction/disjunction swapped,
    bindings kept, path formulas negated."""
    if isinstance(phi, SPath):
        return SPath(neg(phi.psi))
    if isinstance(phi, SAnd):
        return SOr(negate_state(phi.left), negate_state(phi.right))
    if isinstance(phi, SOr):
        return SAnd(negate_state(phi.left), negate_state(phi.right))
    if isinstance(phi, SForall):
        return SExists(phi.var, phi.obs, negate_state(phi.body))
    if isinstance(phi, SExists):
        return SForall(phi.var, phi.obs, negate_state(phi.body))
    if isinstance(phi, SBind):
        return SBind(phi.agent, phi.var, negate_state(phi.body))
    if isinstance(phi, HBody):
        return HBody(neg(phi.psi), phi.bindings)
    if isinstance(phi, HAnd):
        return HOr(negate_state(phi.left), negate_state(phi.right))
    if isinstance(phi, HOr):
        return HAnd(negate_state(phi.left), negate_state(phi.right))
    if isinstance(phi, HForall):
        return HExists(phi.var, negate_state(phi.body))
    if isinstance(phi, HExists):
        return HForall(phi.var, negate_state(phi.body))
    raise TypeError(f"not a state formula: {phi!r}")


def state_children(phi) -> tuple:
    if isinstance(phi, (SAnd, SOr, HAnd, HOr)):
        return (phi.left, phi.right)
    if isinstance(phi, (SForall, SExists, SBind, HForall, HExists)):
        return (phi.body,)
    return ()


def iter_state(phi):
    """Pre-order traversal of the state-level nodes."""
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(reversed(state_children(f)))


def size(phi) -> int:
    """AST node count: state nodes, path nodes, and one node per binding entry."""
    n = 0
    for f in iter_state(phi):
        n += 1
        if isinstance(f, SPath):
            n += ltl.size(f.psi)
        elif isinstance(f, HBody):
            n += ltl.size(f.psi) + sum(len(prof) for _, prof in f.bindings)
    return n


def quantifier_count(phi) -> int:
    return sum(isinstance(f, (SForall, SExists, HForall, HExists)) for f in iter_state(phi))


def quantifier_depth(phi) -> int:
    if isinstance(phi, (SForall, SExists, HForall, HExists)):
        return 1 + quantifier_depth(phi.body)
    return max((quantifier_depth(c) for c in state_children(phi)), default=0)


def bind_count(phi) -> int:
    return sum(isinstance(f, SBind) for f in iter_state(phi))


def path_variables(phi: HyperFormula) -> List[str]:
    """Path variables in order of first occurrence."""
    out: Dict[str, None] = {}
    for f in iter_state(phi):
        if isinstance(f, HBody):
            for pi, _ in f.bindings:
                out.setdefault(pi, None)
    return list(out)


def strategy_variables(phi) -> List[str]:
    out: Dict[str, None] = {}
    for f in iter_state(phi):
        if isinstance(f, (SForall, SExists, HForall, HExists)):
            out.setdefault(f.var, None)
        elif isinstance(f, SBind):
            out.setdefault(f.var, None)
        elif isinstance(f, HBody):
            for _, prof in f.bindings:
                for _, v in prof:
                    out.setdefault(v, None)
    return list(out)


def profile_dict(prof: Profile) -> Dict[str, str]:
    return dict(prof)


# -- well-formedness --------------------------------------------------------------

def wellformed_slii(phi: SlFormula, agents: Optional[Sequence[str]] = None,
               observations: Optional[Sequence[str]] = None) -> None:
    """Raise :class:`FormulaError` unless ``phi`` is well formed.

    With ``agents`` given, every path formula must be reached with all agents bound.
    """
    def go(f, scope: Set[str], bound: Set[str]):
        if isinstance(f, SPath):
            for a in ltl.atoms(f.psi):
                if a.path is not None:
                    raise FormulaError(f"indexed atom {a.name}@{a.path} in an SL_ii formula")
            if agents is not None:
                missing = [a for a in agents if a not in bound]
                if missing:
                    raise FormulaError(f"agent unbound at path formula: {', '.join(missing)}")
        elif isinstance(f, (SAnd, SOr)):
            go(f.left, scope, bound)
            go(f.right, scope, bound)
        elif isinstance(f, (SForall, SExists)):
            if observations is not None and f.obs not in observations:
                raise FormulaError(f"unknown observation {f.obs!r}")
            go(f.body, scope | {f.var}, bound)
        elif isinstance(f, SBind):
            if f.var not in scope:
                raise FormulaError(f"unbound variable {f.var!r} in binding of {f.agent!r}")
            if agents is not None and f.agent not in agents:
                raise FormulaError(f"unknown agent {f.agent!r}")
            go(f.body, scope, bound | {f.agent})
        else:
            raise FormulaError(f"not an SL_ii state formula: {f!r}")

    go(phi, set(), set())


def hyper_agents(phi: HyperFormula) -> List[str]:
    out: Dict[str, None] = {}
    for f in iter_state(phi):
        if isinstance(f, HBody):
            for _, prof in f.bindings:
                for a, _ in prof:
                    out.setdefault(a, None)
    return list(out)


def wellformed_hypersl(phi: HyperFormula, agents: Optional[Sequence[str]] = None) -> None:
    """Raise :class:`FormulaError` unless ``phi`` is a well-formed HyperSL formula."""
    agent_set = set(agents) if agents is not None else set(hyper_agents(phi))

    def go(f, scope: Set[str]):
        if isinstance(f, HBody):
            if not f.bindings:
                raise FormulaError("hyper body without path bindings")
            paths = [pi for pi, _ in f.bindings]
            if len(set(paths)) != len(paths):
                raise FormulaError(f"repeated path variable in body bindings {paths}")
            for pi, prof in f.bindings:
                names = [a for a, _ in prof]
                if len(set(names)) != len(names):
                    raise FormulaError(f"agent bound twice in the profile of {pi!r}")
                if set(names) != agent_set:
                    missing = sorted(agent_set - set(names))
                    extra = sorted(set(names) - agent_set)
                    detail = f"missing {missing}" if missing else f"unknown {extra}"
                    raise FormulaError(f"non-total profile for path {pi!r} ({detail})")
                for _, v in prof:
                    if v not in scope:
                        raise FormulaError(f"unbound variable {v!r} in the profile of {pi!r}")
            for a in ltl.atoms(f.psi):
                if a.path is None:
                    raise FormulaError(f"atom {a.name!r} lacks a path variable")
                if a.path not in paths:
                    raise FormulaError(f"path variable {a.path!r} is not bound in its body")
        elif isinstance(f, (HAnd, HOr)):
            go(f.left, scope)
            go(f.right, scope)
        elif isinstance(f, (HForall, HExists)):
            go(f.body, scope | {f.var})
        else:
            raise FormulaError(f"not a HyperSL state formula: {f!r}")

    go(phi, set())


# -- lexer and parser -------------------------------------------------------------

KEYWORDS = {"forall", "exists", "bind", "true", "false", "X", "F", "G", "U", "W"}
_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<op><->|->|[()\[\];,:.=@!&|])
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str   # 'id', 'str', 'op', 'kw', 'eof'
    text: str
    pos: int


def _lex(text: str) -> List[_Tok]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind == "str":
            body = m.group()[1:-1]
            out.append(_Tok("str", re.sub(r"\\(.)", r"\1", body), pos))
        elif kind == "id":
            word = m.group()
            out.append(_Tok("kw" if word in KEYWORDS else "id", word, pos))
        elif kind == "op":
            out.append(_Tok("op", m.group(), pos))
        pos = m.end()
    out.append(_Tok("eof", "", len(text)))
    return out


class _Parser:
    """Recursive descent over a grammar shared by both logics; yields raw tuples."""

    def __init__(self, text: str, hyper: bool):
        self.text = text
        self.toks = _lex(text)
        self.i = 0
        self.hyper = hyper

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return FormulaError(msg, tok.pos, self.text)

    def at(self, *texts) -> bool:
        t = self.peek()
        return t.kind in ("op", "kw") and t.text in texts

    def expect(self, text):
        t = self.peek()
        if t.kind not in ("op", "kw") or t.text != text:
            found = t.text or "end of input"
            raise self.error(f"expected {text!r} but found {found!r}")
        return self.next()

    def name(self, what):
        t = self.peek()
        if t.kind not in ("id", "str"):
            found = t.text or "end of input"
            raise self.error(f"expected {what} but found {found!r}")
        return self.next().text

    def parse(self):
        node = self.formula()
        if self.peek().kind != "eof":
            raise self.error(f"unexpected {self.peek().text!r}")
        return node

    def formula(self):
        if self.at("forall", "exists"):
            return self.quant()
        if self.at("bind"):
            return self.bind()
        if self.at("["):
            return self.body()
        return self.iff()

    def quant(self):
        tok = self.next()
        decls = []
        while True:
            var = self.name("strategy variable")
            obs = None
            if self.at(":"):
                self.next()
                obs = self.name("observation")
            decls.append((var, obs))
            if not self.at(","):
                break
            self.next()
        self.expect(".")
        body = self.formula()
        for var, obs in reversed(decls):
            body = ("quant", tok.text, var, obs, body, tok.pos)
        return body

    def bind(self):
        tok = self.next()
        agent = self.name("agent")
        var = self.name("strategy variable")
        self.expect(".")
        return ("bind", agent, var, self.formula(), tok.pos)

    def body(self):
        tok = self.expect("[")
        bindings = []
        while True:
            pi = self.name("path variable")
            self.expect(":")
            self.expect("(")
            prof = []
            while True:
                agent = self.name("agent")
                self.expect("=")
                prof.append((agent, self.name("strategy variable")))
                if not self.at(","):
                    break
                self.next()
            self.expect(")")
            bindings.append((pi, tuple(prof)))
            if not self.at(";"):
                break
            self.next()
        self.expect("]")
        return ("body", tuple(bindings), self.formula(), tok.pos)

    def iff(self):
        left = self.implication()
        if self.at("<->"):
            self.next()
            return ("iff", left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.next()
            return ("implies", left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.at("|"):
            self.next()
            left = ("or", left, self.conjunction())
        return left

    def conjunction(self):
        left = self.until()
        while self.at("&"):
            self.next()
            left = ("and", left, self.until())
        return left

    def until(self):
        left = self.unary()
        if self.at("U", "W"):
            op = self.next().text
            return (op, left, self.until())
        return left

    def unary(self):
        if self.at("!"):
            self.next()
            return ("not", self.unary())
        if self.at("X", "F", "G"):
            op = self.next().text
            return (op, self.unary())
        return self.primary()

    def primary(self):
        t = self.peek()
        if self.at("("):
            self.next()
            node = self.formula()
            self.expect(")")
            return node
        if self.at("true"):
            self.next()
            return ("true",)
        if self.at("false"):
            self.next()
            return ("false",)
        if self.at("forall", "exists", "bind", "["):
            return self.formula()
        if t.kind in ("id", "str"):
            self.next()
            path = None
            if self.at("@"):
                self.next()
                path = self.name("path variable")
            return ("atom", t.text, path, t.pos)
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}")


_STATE_TAGS = ("quant", "bind", "body")


def _is_state(raw) -> bool:
    if raw[0] in _STATE_TAGS:
        return True
    return any(isinstance(c, tuple) and _is_state(c) for c in raw[1:])


def _lower_path(raw, text, hyper: bool) -> PathFormula:
    tag = raw[0]
    if tag == "atom":
        _, name, path, pos = raw
        if hyper and path is None:
            raise FormulaError(f"atom {name!r} needs a path variable (write {name}@pi)", pos, text)
        if not hyper and path is not None:
            raise FormulaError(f"indexed atom {name}@{path} is not SL_ii syntax", pos, text)
        return Atom(name, path)
    if tag == "true":
        return TRUE
    if tag == "false":
        return FALSE
    args = [_lower_path(c, text, hyper) for c in raw[1:]]
    if tag == "not":
        return neg(args[0])
    if tag == "X":
        return Next(args[0])
    if tag == "F":
        return eventually(args[0])
    if tag == "G":
        return globally(args[0])
    if tag == "and":
        return And(*args)
    if tag == "or":
        return lor(*args)
    if tag == "implies":
        return implies(*args)
    if tag == "iff":
        return iff(*args)
    if tag == "U":
        return Until(*args)
    if tag == "W":
        return weak_until(*args)
    raise AssertionError(tag)


def _nested_error(raw, text):
    pos = _first_pos(raw)
    return FormulaError("state formula nested under a temporal or negation operator",
                        pos, text)


def _first_pos(raw):
    if raw[0] in _STATE_TAGS:
        return raw[-1]
    for c in raw[1:]:
        if isinstance(c, tuple) and _is_state(c):
            return _first_pos(c)
    return None


def _lower_slii(raw, text) -> SlFormula:
    if not _is_state(raw):
        return SPath(_lower_path(raw, text, hyper=False))
    tag = raw[0]
    if tag == "quant":
        _, kind, var, obs, body, pos = raw
        if obs is None:
            raise FormulaError(f"SL_ii quantifier over {var!r} needs an observation "
                               f"(write {var}:o)", pos, text)
        cls = SForall if kind == "forall" else SExists
        return cls(var, obs, _lower_slii(body, text))
    if tag == "bind":
        _, agent, var, body, _pos = raw
        return SBind(agent, var, _lower_slii(body, text))
    if tag == "body":
        raise FormulaError("hyper path bindings are not SL_ii syntax", raw[-1], text)
    if tag == "and":
        return s_and(_lower_slii(raw[1], text), _lower_slii(raw[2], text))
    if tag == "or":
        return s_or(_lower_slii(raw[1], text), _lower_slii(raw[2], text))
    if tag == "implies":
        return s_or(negate_state(_lower_slii(raw[1], text)), _lower_slii(raw[2], text))
    raise _nested_error(raw, text)


def _lower_hyper(raw, text) -> HyperFormula:
    tag = raw[0]
    if tag == "quant":
        _, kind, var, obs, body, pos = raw
        if obs is not None:
            raise FormulaError("HyperSL quantifiers carry no observation", pos, text)
        cls = HForall if kind == "forall" else HExists
        return cls(var, _lower_hyper(body, text))
    if tag == "body":
        _, bindings, psi, pos = raw
        if _is_state(psi):
            raise _nested_error(psi, text)
        return HBody(_lower_path(psi, text, hyper=True), bindings)
    if tag == "bind":
        raise FormulaError("agent bindings are not HyperSL syntax", raw[-1], text)
    if not _is_state(raw):
        raise FormulaError("path formula outside of a [path: profile] body",
                           _atom_pos(raw), text)
    if tag == "and":
        return HAnd(_lower_hyper(raw[1], text), _lower_hyper(raw[2], text))
    if tag == "or":
        return HOr(_lower_hyper(raw[1], text), _lower_hyper(raw[2], text))
    if tag == "implies":
        return HOr(negate_state(_lower_hyper(raw[1], text)), _lower_hyper(raw[2], text))
    raise _nested_error(raw, text)


def _atom_pos(raw):
    if raw[0] == "atom":
        return raw[3]
    for c in raw[1:]:
        if isinstance(c, tuple):
            p = _atom_pos(c)
            if p is not None:
                return p
    return None


def parse_slii(text: str, agents: Optional[Sequence[str]] = None,
               observations: Optional[Sequence[str]] = None) -> SlFormula:
    phi = _lower_slii(_Parser(text, hyper=False).parse(), text)
    wellformed_slii(phi, agents, observations)
    return phi


def parse_hypersl(text: str, agents: Optional[Sequence[str]] = None) -> HyperFormula:
    phi = _lower_hyper(_Parser(text, hyper=True).parse(), text)
    wellformed_hypersl(phi, agents)
    return phi


def parse_path(text: str, hyper: bool = False) -> PathFormula:
    raw = _Parser(text, hyper).parse()
    if _is_state(raw):
        raise _nested_error(raw, text)
    return _lower_path(raw, text, hyper)


# -- printer ----------------------------------------------------------------------

def quote(name: str) -> str:
    if _BARE.match(name) and name not in KEYWORDS:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


# precedence levels, loosest first
_P_IFF, _P_IMP, _P_OR, _P_AND, _P_UNTIL, _P_UNARY, _P_ATOM = range(7)


def _as_implication(f):
    """``(a, b)`` if ``f`` is the desugared form of ``a -> b``."""
    if isinstance(f, Not) and isinstance(f.arg, And) and isinstance(f.arg.right, Not):
        return f.arg.left, f.arg.right.arg
    return None


def _sugar(f):
    """Recognize desugared sugar; returns (tag, operands) or None."""
    if isinstance(f, Not):
        g = f.arg
        if isinstance(g, TrueConst):
            return ("false", ())
        if isinstance(g, Until) and isinstance(g.left, TrueConst):
            return ("G", (neg(g.right),))
        if isinstance(g, And):
            l, r = g.left, g.right
            if (isinstance(l, Not) and isinstance(l.arg, Until) and isinstance(r, Until)
                    and isinstance(r.left, TrueConst) and r.right == neg(l.arg.left)):
                return ("W", (l.arg.left, l.arg.right))
            if isinstance(l, Not) and isinstance(r, Not):
                return ("|", (l.arg, r.arg))
            if isinstance(r, Not):
                return ("->", (l, r.arg))
        return None
    if isinstance(f, Until) and isinstance(f.left, TrueConst):
        return ("F", (f.right,))
    if isinstance(f, And):
        a, b = _as_implication(f.left), _as_implication(f.right)
        if a and b and a == (b[1], b[0]):
            return ("<->", a)
    return None


def path_to_text(f: PathFormula, prec: int = _P_IFF) -> str:
    s, p = _path(f)
    return f"({s})" if p < prec else s


def _path(f) -> Tuple[str, int]:
    sug = _sugar(f)
    if sug is not None:
        tag, ops = sug
        if tag == "false":
            return "false", _P_ATOM
        if tag in ("G", "F"):
            return f"{tag} {path_to_text(ops[0], _P_UNARY)}", _P_UNARY
        if tag == "W":
            return (f"{path_to_text(ops[0], _P_UNTIL + 1)} W {path_to_text(ops[1], _P_UNTIL)}",
                    _P_UNTIL)
        if tag == "|":
            return f"{path_to_text(ops[0], _P_OR)} | {path_to_text(ops[1], _P_OR + 1)}", _P_OR
        if tag == "->":
            return (f"{path_to_text(ops[0], _P_IMP + 1)} -> {path_to_text(ops[1], _P_IMP)}",
                    _P_IMP)
        if tag == "<->":
            return (f"{path_to_text(ops[0], _P_IMP)} <-> {path_to_text(ops[1], _P_IMP)}",
                    _P_IFF)
    if isinstance(f, Atom):
        s = quote(f.name)
        return (s if f.path is None else f"{s}@{quote(f.path)}"), _P_ATOM
    if isinstance(f, TrueConst):
        return "true", _P_ATOM
    if isinstance(f, Not):
        return "!" + path_to_text(f.arg, _P_UNARY), _P_UNARY
    if isinstance(f, Next):
        return "X " + path_to_text(f.arg, _P_UNARY), _P_UNARY
    if isinstance(f, And):
        return f"{path_to_text(f.left, _P_AND)} & {path_to_text(f.right, _P_AND + 1)}", _P_AND
    if isinstance(f, Until):
        return (f"{path_to_text(f.left, _P_UNTIL + 1)} U {path_to_text(f.right, _P_UNTIL)}",
                _P_UNTIL)
    raise TypeError(f"not a path formula: {f!r}")


def to_text(phi) -> str:
    """Canonical text; ``parse(to_text(phi)) == phi`` for parsed formulas."""
    if isinstance(phi, PathFormula):
        return path_to_text(phi)
    return _state(phi, tail=True)


def _operand(phi, prec_needed: int) -> str:
    if isinstance(phi, (SPath,)):
        return path_to_text(phi.psi, prec_needed)
    if isinstance(phi, (SAnd, HAnd)) and prec_needed <= _P_AND:
        return _state(phi, tail=False)
    if isinstance(phi, (SOr, HOr)) and prec_needed <= _P_OR:
        return _state(phi, tail=False)
    return "(" + _state(phi, tail=True) + ")"


def _state(phi, tail: bool) -> str:
    if isinstance(phi, SPath):
        return path_to_text(phi.psi)
    if isinstance(phi, (SAnd, HAnd)):
        return f"{_operand(phi.left, _P_AND)} & {_operand(phi.right, _P_AND + 1)}"
    if isinstance(phi, (SOr, HOr)):
        return f"{_operand(phi.left, _P_OR)} | {_operand(phi.right, _P_OR + 1)}"
    if isinstance(phi, (SForall, SExists)):
        kw = "forall" if isinstance(phi, SForall) else "exists"
        s = f"{kw} {quote(phi.var)}:{quote(phi.obs)}. {_state(phi.body, True)}"
    elif isinstance(phi, (HForall, HExists)):
        kw = "forall" if isinstance(phi, HForall) else "exists"
        s = f"{kw} {quote(phi.var)}. {_state(phi.body, True)}"
    elif isinstance(phi, SBind):
        s = f"bind {quote(phi.agent)} {quote(phi.var)}. {_state(phi.body, True)}"
    elif isinstance(phi, HBody):
        binds = "; ".join(
            f"{quote(pi)}:(" + ", ".join(f"{quote(a)}={quote(v)}" for a, v in prof) + ")"
            for pi, prof in phi.bindings)
        s = f"[{binds}] {path_to_text(phi.psi)}"
    else:
        raise TypeError(f"not a state formula: {phi!r}")
    return s if tail else f"({s})"


# -- JSON trees -------------------------------------------------------------------

def path_to_json(f: PathFormula) -> dict:
    if isinstance(f, Atom):
        d = {"op": "atom", "name": f.name}
        if f.path is not None:
            d["path"] = f.path
        return d
    if isinstance(f, TrueConst):
        return {"op": "true"}
    if isinstance(f, Not):
        return {"op": "not", "arg": path_to_json(f.arg)}
    if isinstance(f, Next):
        return {"op": "next", "arg": path_to_json(f.arg)}
    if isinstance(f, And):
        return {"op": "and", "left": path_to_json(f.left), "right": path_to_json(f.right)}
    if isinstance(f, Until):
        return {"op": "until", "left": path_to_json(f.left), "right": path_to_json(f.right)}
    raise TypeError(f"not a path formula: {f!r}")


def path_from_json(d: Mapping) -> PathFormula:
    op = d.get("op")
    if op == "atom":
        return Atom(d["name"], d.get("path"))
    if op == "true":
        return TRUE
    if op == "not":
        return Not(path_from_json(d["arg"]))
    if op == "next":
        return Next(path_from_json(d["arg"]))
    if op == "and":
        return And(path_from_json(d["left"]), path_from_json(d["right"]))
    if op == "until":
        return Until(path_from_json(d["left"]), path_from_json(d["right"]))
    raise FormulaError(f"unknown path operator {op!r}")


def to_json(phi) -> dict:
    if isinstance(phi, PathFormula):
        return path_to_json(phi)
    if isinstance(phi, SPath):
        return {"op": "path", "psi": path_to_json(phi.psi)}
    if isinstance(phi, (SAnd, HAnd)):
        return {"op": "and", "left": to_json(phi.left), "right": to_json(phi.right)}
    if isinstance(phi, (SOr, HOr)):
        return {"op": "or", "left": to_json(phi.left), "right": to_json(phi.right)}
    if isinstance(phi, (SForall, SExists)):
        return {"op": "forall" if isinstance(phi, SForall) else "exists",
                "var": phi.var, "obs": phi.obs, "body": to_json(phi.body)}
    if isinstance(phi, (HForall, HExists)):
        return {"op": "forall" if isinstance(phi, HForall) else "exists",
                "var": phi.var, "body": to_json(phi.body)}
    if isinstance(phi, SBind):
        return {"op": "bind", "agent": phi.agent, "var": phi.var, "body": to_json(phi.body)}
    if isinstance(phi, HBody):
        return {"op": "body", "psi": path_to_json(phi.psi),
                "bindings": [{"path": pi, "profile": dict(prof)} for pi, prof in phi.bindings]}
    raise TypeError(f"not a formula: {phi!r}")


def from_json(d: Mapping, hyper: bool):
    op = d.get("op")
    if op == "path" and not hyper:
        return SPath(path_from_json(d["psi"]))
    if op in ("and", "or"):
        l, r = from_json(d["left"], hyper), from_json(d["right"], hyper)
        if hyper:
            return (HAnd if op == "and" else HOr)(l, r)
        return (SAnd if op == "and" else SOr)(l, r)
    if op in ("forall", "exists"):
        body = from_json(d["body"], hyper)
        if hyper:
            return (HForall if op == "forall" else HExists)(d["var"], body)
        return (SForall if op == "forall" else SExists)(d["var"], d["obs"], body)
    if op == "bind" and not hyper:
        return SBind(d["agent"], d["var"], from_json(d["body"], hyper))
    if op == "body" and hyper:
        return HBody(path_from_json(d["psi"]),
                     tuple((b["path"], tuple(b["profile"].items())) for b in d["bindings"]))
    raise FormulaError(f"unknown state operator {op!r}")
