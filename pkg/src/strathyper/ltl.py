"""LTL path formulas and their exact evaluation on ultimately periodic words.

Only the core connectives are represented: atoms, ``true``, negation, conjunction,
next and until.  The remaining operators are helper functions that desugar on
construction, so every formula object is in core form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .cgs import Lasso


class PathFormula:
    __slots__ = ()

    # operator sugar for tests and interactive use
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return lor(self, other)

    def __invert__(self):
        return neg(self)


@dataclass(frozen=True)
class Atom(PathFormula):
    """An atomic proposition; ``path`` is set for path-indexed (hyper) atoms."""

    name: str
    path: str | None = None


@dataclass(frozen=True)
class TrueConst(PathFormula):
    pass


@dataclass(frozen=True)
class Not(PathFormula):
    arg: PathFormula


@dataclass(frozen=True)
class And(PathFormula):
    left: PathFormula
    right: PathFormula


@dataclass(frozen=True)
class Next(PathFormula):
    arg: PathFormula


@dataclass(frozen=True)
class Until(PathFormula):
    left: PathFormula
    right: PathFormula


TRUE = TrueConst()


def neg(f: PathFormula) -> PathFormula:
    """Negation with double-negation elimination."""
    return f.arg if isinstance(f, Not) else Not(f)


FALSE = neg(TRUE)


def lor(a: PathFormula, b: PathFormula) -> PathFormula:
    return neg(And(neg(a), neg(b)))


def implies(a: PathFormula, b: PathFormula) -> PathFormula:
    return neg(And(a, neg(b)))


def iff(a: PathFormula, b: PathFormula) -> PathFormula:
    return And(implies(a, b), implies(b, a))


def xor(a: PathFormula, b: PathFormula) -> PathFormula:
    return neg(iff(a, b))


def eventually(f: PathFormula) -> PathFormula:
    return Until(TRUE, f)


def globally(f: PathFormula) -> PathFormula:
    return neg(Until(TRUE, neg(f)))


def weak_until(a: PathFormula, b: PathFormula) -> PathFormula:
    return lor(Until(a, b), neg(Until(TRUE, neg(a))))


def _balanced(fs, op):
    if len(fs) == 1:
        return fs[0]
    mid = (len(fs) + 1) // 2
    return op(_balanced(fs[:mid], op), _balanced(fs[mid:], op))


def conj(fs: Iterable[PathFormula]) -> PathFormula:
    """Balanced conjunction (keeps big gadgets shallow); empty means ``true``."""
    fs = list(fs)
    return _balanced(fs, And) if fs else TRUE


def disj(fs: Iterable[PathFormula]) -> PathFormula:
    """Balanced disjunction; the empty disjunction is ``false``."""
    fs = list(fs)
    return _balanced(fs, lor) if fs else FALSE


# -- traversal --------------------------------------------------------------------

def children(f: PathFormula) -> Tuple[PathFormula, ...]:
    if isinstance(f, (Not, Next)):
        return (f.arg,)
    if isinstance(f, (And, Until)):
        return (f.left, f.right)
    return ()


def size(f: PathFormula) -> int:
    """Number of AST nodes (shared subtrees counted every time)."""
    stack, n = [f], 0
    while stack:
        g = stack.pop()
        n += 1
        stack.extend(children(g))
    return n


def atoms(f: PathFormula) -> List[Atom]:
    out: Dict[Atom, None] = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            out[g] = None
        stack.extend(reversed(children(g)))
    return list(out)


def temporal_depth(f: PathFormula) -> int:
    best, stack = 0, [(f, 0)]
    while stack:
        g, d = stack.pop()
        if isinstance(g, (Next, Until)):
            d += 1
        best = max(best, d)
        stack.extend((c, d) for c in children(g))
    return best


def map_atoms(f: PathFormula, fn: Callable[[Atom], PathFormula]) -> PathFormula:
    memo: Dict[int, PathFormula] = {}

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Atom):
            r = fn(g)
        elif isinstance(g, TrueConst):
            r = g
        elif isinstance(g, Not):
            r = neg(go(g.arg))
        elif isinstance(g, Next):
            r = Next(go(g.arg))
        elif isinstance(g, And):
            r = And(go(g.left), go(g.right))
        elif isinstance(g, Until):
            r = Until(go(g.left), go(g.right))
        else:
            raise TypeError(f"not a path formula: {g!r}")
        memo[key] = r
        return r

    return go(f)


# -- evaluation -------------------------------------------------------------------

class LassoError(ValueError):
    pass


class CompiledFormula:
    """A path formula flattened into a DAG of integer-indexed nodes.

    ``atom_fn`` maps an atom to a predicate on position letters.  Letters can be
    anything hashable (a label set, a tuple of states...).  All temporal-free nodes
    are evaluated together once per distinct letter and cached, which keeps large
    propositional gadgets cheap.
    """

    def __init__(self, f: PathFormula, atom_fn: Callable[[Atom], Callable[[Hashable], bool]]):
        self.ops: List[tuple] = []
        self.temporal: List[bool] = []
        index: Dict[object, int] = {}
        by_id: Dict[int, int] = {}
        stack = [(f, False)]
        while stack:  # post-order; formulas can be deeper than the recursion limit
            g, expanded = stack.pop()
            if id(g) in by_id:
                continue
            if not expanded:
                stack.append((g, True))
                stack.extend((c, False) for c in reversed(children(g)))
                continue
            if isinstance(g, Atom):
                key, op = g, ("atom", atom_fn(g))
            elif isinstance(g, TrueConst):
                key = op = ("true",)
            else:
                key = op = (type(g).__name__.lower(),) + tuple(by_id[id(c)] for c in children(g))
            if key not in index:
                index[key] = len(self.ops)
                self.ops.append(op)
                tag = op[0]
                self.temporal.append(tag in ("next", "until")
                                     or (tag in ("not", "and")
                                         and any(self.temporal[k] for k in op[1:])))
            by_id[id(g)] = index[key]
        self.root = by_id[id(f)]
        self._static = [i for i, t in enumerate(self.temporal) if not t]
        self._letters: Dict[Hashable, List[bool]] = {}

    def letter_values(self, letter) -> List[bool]:
        v = self._letters.get(letter)
        if v is None:
            v = [False] * len(self.ops)
            for i in self._static:
                op = self.ops[i]
                tag = op[0]
                if tag == "atom":
                    v[i] = bool(op[1](letter))
                elif tag == "true":
                    v[i] = True
                elif tag == "not":
                    v[i] = not v[op[1]]
                else:
                    v[i] = v[op[1]] and v[op[2]]
            self._letters[letter] = v
        return v

    def evaluate(self, letters: Sequence, loop_start: int) -> bool:
        """Truth value at position 0 of ``letters[:loop_start] . letters[loop_start:]^omega``."""
        n = len(letters)
        if not 0 <= loop_start < n:
            raise LassoError("loop must be non-empty")
        static = [self.letter_values(x) for x in letters]
        if not self.temporal[self.root]:
            return static[0][self.root]
        succ = list(range(1, n)) + [loop_start]
        vals: Dict[int, List[bool]] = {}

        def get(i):
            return vals[i] if self.temporal[i] else [row[i] for row in static]

        for i, op in enumerate(self.ops):  # children precede parents
            if not self.temporal[i]:
                continue
            tag = op[0]
            if tag == "not":
                v = [not b for b in get(op[1])]
            elif tag == "and":
                v = [x and y for x, y in zip(get(op[1]), get(op[2]))]
            elif tag == "next":
                a = get(op[1])
                v = [a[succ[j]] for j in range(n)]
            else:
                a, b = get(op[1]), get(op[2])
                v = [False] * n
                # least fixpoint on the loop, then one backward sweep over the stem
                changed = True
                while changed:
                    changed = False
                    for j in range(n - 1, loop_start - 1, -1):
                        x = b[j] or (a[j] and v[succ[j]])
                        if x != v[j]:
                            v[j] = x
                            changed = True
                for j in range(loop_start - 1, -1, -1):
                    v[j] = b[j] or (a[j] and v[j + 1])
            vals[i] = v
        return vals[self.root][0]

    def evaluate_prefix(self, letters: Sequence) -> Optional[bool]:
        """Value at position 0 shared by every infinite extension of ``letters``,
        or ``None`` if the finite prefix does not decide it (Kleene semantics)."""
        n = len(letters)
        if n == 0:
            return None
        static = [self.letter_values(x) for x in letters]
        if not self.temporal[self.root]:
            return static[0][self.root]
        vals: Dict[int, List[Optional[bool]]] = {}

        def get(i):
            return vals[i] if self.temporal[i] else [row[i] for row in static]

        for i, op in enumerate(self.ops):
            if not self.temporal[i]:
                continue
            tag = op[0]
            if tag == "not":
                v = [None if b is None else not b for b in get(op[1])]
            elif tag == "and":
                v = [_k_and(x, y) for x, y in zip(get(op[1]), get(op[2]))]
            elif tag == "next":
                a = get(op[1])
                v = a[1:] + [None]
            else:
                a, b = get(op[1]), get(op[2])
                v = [None] * n
                nxt = None
                for j in range(n - 1, -1, -1):
                    nxt = v[j] = _k_or(b[j], _k_and(a[j], nxt))
            vals[i] = v
        return vals[self.root][0]


def _k_and(x: Optional[bool], y: Optional[bool]) -> Optional[bool]:
    if x is False or y is False:
        return False
    if x is None or y is None:
        return None
    return True


def _k_or(x: Optional[bool], y: Optional[bool]) -> Optional[bool]:
    if x is True or y is True:
        return True
    if x is None or y is None:
        return None
    return False


def _label_atom(a: Atom):
    name = a.name
    return lambda letter: name in letter


def eval_ltl_lasso(psi: PathFormula, trace: Lasso) -> bool:
    """Evaluate ``psi`` on a lasso whose letters are sets of atom names.

    For path-indexed atoms pass a lasso of ``{(name, path), ...}`` letters, for
    instance the result of :func:`zip_lassos`.
    """
    def atom_fn(a: Atom):
        if a.path is None:
            return _label_atom(a)
        key = (a.name, a.path)
        return lambda letter: key in letter

    cf = CompiledFormula(psi, atom_fn)
    return cf.evaluate(list(trace.stem) + list(trace.loop), len(trace.stem))


def align(lassos: Sequence[Lasso]) -> List[Lasso]:
    """Unroll lassos to a common stem length and a common (lcm) loop length."""
    if not lassos:
        raise LassoError("nothing to align")
    stem = max(len(l.stem) for l in lassos)
    loop = math.lcm(*(len(l.loop) for l in lassos))
    return [l.unrolled(stem, loop) for l in lassos]


def zip_lassos(named: Sequence[Tuple[str, Lasso]]) -> Lasso:
    """Combine per-path lassos of label sets into one lasso of ``(ap, path)`` letters."""
    aligned = align([l for _, l in named])
    names = [n for n, _ in named]
    stem_len, loop_len = len(aligned[0].stem), len(aligned[0].loop)
    for l in aligned:
        if len(l.stem) != stem_len or len(l.loop) != loop_len:
            raise LassoError("misaligned lassos")

    def letter(i):
        return frozenset((a, n) for n, l in zip(names, aligned) for a in l.at(i))

    return Lasso(tuple(letter(i) for i in range(stem_len)),
                 tuple(letter(stem_len + i) for i in range(loop_len)))
