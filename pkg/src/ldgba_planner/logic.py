"""LTL formulas over a finite set of atomic propositions.

Formulas are immutable dataclass trees.  Symbols (elements of 2^atoms) are
plain ints: bit ``i`` is set when ``atoms[i]`` holds, with atoms kept in
lexicographic order so the encoding is stable everywhere downstream.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class LtlSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownAtomError(ValueError):
    pass


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"true", "X", "U", "F", "G"})


class AtomSet:
    """Ordered, duplicate-free set of proposition names."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = sorted(set(names))
        for n in names:
            if not _NAME.match(n) or n in KEYWORDS:
                raise ValueError(f"invalid atom name {n!r}")
        self.names: tuple[str, ...] = tuple(names)
        self._index = {n: i for i, n in enumerate(self.names)}

    @classmethod
    def parse(cls, text: str) -> "AtomSet":
        return cls(t.strip() for t in text.split(",") if t.strip())

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AtomSet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"AtomSet({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownAtomError(f"unknown atom {name!r}") from None

    @property
    def n_symbols(self) -> int:
        return 1 << len(self.names)

    def symbols(self) -> range:
        return range(self.n_symbols)

    def symbol(self, names: Iterable[str] = ()) -> int:
        sym = 0
        for n in names:
            sym |= 1 << self.index(n)
        return sym

    def names_of(self, sym: int) -> tuple[str, ...]:
        return tuple(n for i, n in enumerate(self.names) if sym >> i & 1)

    def format_symbol(self, sym: int) -> str:
        return "{" + ",".join(self.names_of(sym)) + "}"

    def projection(self, sub: "AtomSet") -> list[int]:
        """Table mapping each symbol of ``self`` to the symbol of ``sub``
        that keeps only the atoms ``sub`` knows about."""
        bits = [(i, sub.index(n)) for i, n in enumerate(self.names) if n in sub]
        table = []
        for sym in self.symbols():
            out = 0
            for i, j in bits:
                if sym >> i & 1:
                    out |= 1 << j
            table.append(out)
        return table


# ---------------------------------------------------------------- AST


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


TRUE = TrueF()
UNARY = (Not, Next, Eventually, Always)
BINARY = (And, Or, Until)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, UNARY):
        return (f.operand,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def atoms_of(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    out: set[str] = set()
    for c in children(f):
        out |= atoms_of(c)
    return out


def depth(f: Formula) -> int:
    return 1 + max((depth(c) for c in children(f)), default=0)


def is_boolean(f: Formula) -> bool:
    """True when ``f`` contains no temporal operator."""
    if isinstance(f, (TrueF, Atom)):
        return True
    if isinstance(f, (Not, And, Or)):
        return all(is_boolean(c) for c in children(f))
    return False


def holds(f: Formula, atoms: AtomSet, sym: int) -> bool:
    """Evaluate a temporal-free formula on one symbol."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, Atom):
        return bool(sym >> atoms.index(f.name) & 1)
    if isinstance(f, Not):
        return not holds(f.operand, atoms, sym)
    if isinstance(f, And):
        return holds(f.left, atoms, sym) and holds(f.right, atoms, sym)
    if isinstance(f, Or):
        return holds(f.left, atoms, sym) or holds(f.right, atoms, sym)
    raise ValueError(f"temporal operator in state formula: {to_text(f)}")


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[!&|()]))")


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenize(text: str) -> list[tuple[str, int]]:
    """Split into (token, byte offset) pairs, terminated by ``<end>``."""
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip():
                bad = pos + len(rest) - len(rest.lstrip())
                raise LtlSyntaxError(f"unexpected character {text[bad]!r}", _byte_offset(text, bad))
            break
        start = m.start(m.lastgroup)
        tokens.append((m.group(m.lastgroup), _byte_offset(text, start)))
        pos = m.end()
    tokens.append(("<end>", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str, atoms: AtomSet | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.atoms = atoms

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        tok, off = self.take()
        if tok != value:
            raise LtlSyntaxError(f"expected {value!r}, got {tok!r}", off)

    def parse(self) -> Formula:
        f = self.disjunction()
        tok, off = self.tokens[self.i]
        if tok != "<end>":
            raise LtlSyntaxError(f"unexpected token {tok!r}", off)
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        f = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(f, self.until())
        return f

    def unary(self) -> Formula:
        tok, off = self.take()
        if tok == "!":
            return Not(self.unary())
        if tok == "X":
            return Next(self.unary())
        if tok == "F":
            return Eventually(self.unary())
        if tok == "G":
            return Always(self.unary())
        if tok == "(":
            f = self.disjunction()
            self.expect(")")
            return f
        if tok == "true":
            return TRUE
        if tok in ("<end>", ")", "&", "|", "U"):
            raise LtlSyntaxError(f"expected operand, got {tok!r}", off)
        if self.atoms is not None and tok not in self.atoms:
            raise UnknownAtomError(f"unknown atom {tok!r} at offset {off}")
        return Atom(tok)


def parse(text: str, atoms: AtomSet | None = None) -> Formula:
    """Parse LTL text.

    Precedence from tightest: unary ``! X F G``, then ``U`` (right
    associative), then ``&``, then ``|``.  When ``atoms`` is given every
    identifier must name one of them.
    """
    return _Parser(text, atoms).parse()


_PREC = {Or: 1, And: 2, Until: 3}
_UNARY_TEXT = {Not: "!", Next: "X ", Eventually: "F ", Always: "G "}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 4)


def to_text(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, UNARY):
        inner = to_text(f.operand)
        if _prec(f.operand) < 4:
            inner = f"({inner})"
        return _UNARY_TEXT[type(f)] + inner
    p = _prec(f)
    left, right = to_text(f.left), to_text(f.right)
    # & and | associate left, U associates right
    if isinstance(f, Until):
        if _prec(f.left) <= p:
            left = f"({left})"
        if _prec(f.right) < p:
            right = f"({right})"
    else:
        if _prec(f.left) < p:
            left = f"({left})"
        if _prec(f.right) <= p:
            right = f"({right})"
    sym = {And: "&", Or: "|", Until: "U"}[type(f)]
    return f"{left} {sym} {right}"


def expand_derived(f: Formula) -> Formula:
    """Rewrite F and G into the core grammar (true, atoms, !, &, |, X, U)."""
    if isinstance(f, (TrueF, Atom)):
        return f
    if isinstance(f, Eventually):
        return Until(TRUE, expand_derived(f.operand))
    if isinstance(f, Always):
        return Not(Until(TRUE, Not(expand_derived(f.operand))))
    if isinstance(f, UNARY):
        return type(f)(expand_derived(f.operand))
    return type(f)(expand_derived(f.left), expand_derived(f.right))


# ---------------------------------------------------------------- semantics


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . cycle^omega``."""

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __init__(self, prefix: Sequence[int], cycle: Sequence[int]):
        if len(cycle) == 0:
            raise ValueError("lasso cycle must be non-empty")
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "cycle", tuple(cycle))

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def __getitem__(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def successor(self, pos: int) -> int:
        """Next canonical position, looping the last one back into the cycle."""
        return pos + 1 if pos + 1 < len(self) else len(self.prefix)


def eval_lasso(f: Formula, word: LassoWord, atoms: AtomSet) -> bool:
    """Decide ``word |= f`` for an ultimately periodic word.

    Each subformula is evaluated once over the finite canonical position set;
    Until is the least fixpoint of ``r | (l & X(l U r))`` on the lasso graph.
    """
    n = len(word)
    succ = [word.successor(p) for p in range(n)]
    memo: dict[Formula, list[bool]] = {}

    def ev(g: Formula) -> list[bool]:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, TrueF):
            out = [True] * n
        elif isinstance(g, Atom):
            bit = 1 << atoms.index(g.name)
            out = [bool(word[p] & bit) for p in range(n)]
        elif isinstance(g, Not):
            out = [not v for v in ev(g.operand)]
        elif isinstance(g, And):
            a, b = ev(g.left), ev(g.right)
            out = [x and y for x, y in zip(a, b)]
        elif isinstance(g, Or):
            a, b = ev(g.left), ev(g.right)
            out = [x or y for x, y in zip(a, b)]
        elif isinstance(g, Next):
            a = ev(g.operand)
            out = [a[succ[p]] for p in range(n)]
        elif isinstance(g, Until):
            out = _until(ev(g.left), ev(g.right), succ)
        elif isinstance(g, Eventually):
            out = _until([True] * n, ev(g.operand), succ)
        elif isinstance(g, Always):
            out = [not v for v in _until([True] * n, [not v for v in ev(g.operand)], succ)]
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return ev(f)[0]


def _until(left: list[bool], right: list[bool], succ: list[int]) -> list[bool]:
    out = list(right)
    changed = True
    while changed:
        changed = False
        for p in range(len(out) - 1, -1, -1):
            if not out[p] and left[p] and out[succ[p]]:
                out[p] = True
                changed = True
    return out
