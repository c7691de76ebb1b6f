"""Limit-deterministic generalized Buchi automata (LDGBA).

States are ints ``0..n-1``.  The transition table is dense over the symbol
alphabet: ``delta[q][sym]`` is a frozenset of successors for every state,
so structurally broken automata can still be represented and reported by
:func:`validate`.  Epsilon moves are kept apart in ``eps[q]``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

from .logic import AtomSet, LassoWord


@dataclass(frozen=True, eq=False)
class Ldgba:
    atoms: AtomSet
    initial: int
    deterministic: tuple[bool, ...]
    delta: tuple[tuple[frozenset[int], ...], ...]
    eps: tuple[frozenset[int], ...]
    accepting: tuple[frozenset[int], ...]
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = len(self.deterministic)
        if len(self.delta) != n or len(self.eps) != n:
            raise ValueError("delta/eps/partition lengths disagree")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"q{i}" for i in range(n)))

    @classmethod
    def build(
        cls,
        atoms: AtomSet,
        initial: int,
        deterministic: Sequence[bool],
        delta: Sequence[Sequence[Iterable[int]]],
        eps: Sequence[Iterable[int]],
        accepting: Sequence[Iterable[int]],
        names: Sequence[str] = (),
    ) -> "Ldgba":
        return cls(
            atoms=atoms,
            initial=initial,
            deterministic=tuple(bool(d) for d in deterministic),
            delta=tuple(tuple(frozenset(t) for t in row) for row in delta),
            eps=tuple(frozenset(e) for e in eps),
            accepting=tuple(frozenset(f) for f in accepting),
            names=tuple(names),
        )

    @property
    def n_states(self) -> int:
        return len(self.deterministic)

    @property
    def n_symbols(self) -> int:
        return self.atoms.n_symbols

    @property
    def accepting_union(self) -> frozenset[int]:
        return frozenset().union(*self.accepting)

    def _check_state(self, q: int) -> None:
        if not 0 <= q < self.n_states:
            raise KeyError(f"unknown automaton state {q}")

    def step(self, q: int, sym: int) -> int | frozenset[int]:
        """Unique successor for deterministic states, successor set otherwise."""
        self._check_state(q)
        targets = self.delta[q][sym]
        if self.deterministic[q]:
            (t,) = targets
            return t
        return targets

    def eps_successors(self, q: int) -> frozenset[int]:
        self._check_state(q)
        return self.eps[q]

    def successors(self, q: int) -> set[int]:
        out = set(self.eps[q])
        for targets in self.delta[q]:
            out |= targets
        return out

    def rejecting_sinks(self) -> frozenset[int]:
        """States from which no accepting state is reachable."""
        good = set(self.accepting_union)
        preds: dict[int, set[int]] = {q: set() for q in range(self.n_states)}
        for q in range(self.n_states):
            for t in self.successors(q):
                preds[t].add(q)
        todo = deque(good)
        while todo:
            t = todo.popleft()
            for p in preds[t]:
                if p not in good:
                    good.add(p)
                    todo.append(p)
        return frozenset(set(range(self.n_states)) - good)

    def relabel(self, order: Sequence[int]) -> "Ldgba":
        """Renumber states so that new state ``i`` is old state ``order[i]``."""
        new_of = {old: new for new, old in enumerate(order)}
        return Ldgba.build(
            self.atoms,
            new_of[self.initial],
            [self.deterministic[o] for o in order],
            [[{new_of[t] for t in self.delta[o][s]} for s in range(self.n_symbols)] for o in order],
            [{new_of[t] for t in self.eps[o]} for o in order],
            [{new_of[q] for q in f} for f in self.accepting],
            [self.names[o] for o in order],
        )

    def structure(self) -> tuple:
        """Hashable description used for equality and isomorphism checks."""
        return (
            self.atoms.names,
            self.initial,
            self.deterministic,
            tuple(tuple(tuple(sorted(t)) for t in row) for row in self.delta),
            tuple(tuple(sorted(e)) for e in self.eps),
            tuple(tuple(sorted(f)) for f in self.accepting),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ldgba) and self.structure() == other.structure()

    def __hash__(self) -> int:
        return hash(self.structure())


def validate(a: Ldgba) -> list[str]:
    """List every violation of the LDGBA structural rules (empty when valid)."""
    out = []
    n = a.n_states
    if not 0 <= a.initial < n:
        out.append(f"initial state {a.initial} out of range")
    if not a.accepting:
        out.append("no accepting sets")
    for q in range(n):
        name = a.names[q]
        if len(a.delta[q]) != a.n_symbols:
            out.append(f"state {name}: {len(a.delta[q])} symbol rows, expected {a.n_symbols}")
            continue
        for sym, targets in enumerate(a.delta[q]):
            bad = [t for t in targets if not 0 <= t < n]
            if bad:
                out.append(f"state {name} on {a.atoms.format_symbol(sym)}: unknown target {bad}")
                continue
            if a.deterministic[q]:
                if len(targets) != 1:
                    out.append(
                        f"deterministic state {name} has {len(targets)} successors "
                        f"on {a.atoms.format_symbol(sym)}"
                    )
                elif not a.deterministic[next(iter(targets))]:
                    out.append(
                        f"deterministic state {name} leaves Q_D on {a.atoms.format_symbol(sym)}"
                    )
        for t in a.eps[q]:
            if not 0 <= t < n:
                out.append(f"eps from {name} to unknown state {t}")
            elif a.deterministic[q]:
                out.append(f"eps from deterministic state {name} to {a.names[t]}")
            elif not a.deterministic[t]:
                out.append(f"eps from {name} to non-deterministic state {a.names[t]}")
    for i, f in enumerate(a.accepting):
        for q in sorted(f):
            if not 0 <= q < n:
                out.append(f"accepting set {i} names unknown state {q}")
            elif not a.deterministic[q]:
                out.append(f"accepting set {i} contains non-deterministic state {a.names[q]}")
    return out


# ---------------------------------------------------------------- acceptance


def _sccs(n_nodes: int, succ: list[list[int]], root: int) -> list[list[int]]:
    """Strongly connected components reachable from ``root`` (iterative Tarjan)."""
    index = [-1] * n_nodes
    low = [0] * n_nodes
    on_stack = [False] * n_nodes
    stack: list[int] = []
    comps = []
    counter = 0
    work = [(root, 0)]
    index[root] = low[root] = counter
    counter += 1
    stack.append(root)
    on_stack[root] = True
    while work:
        v, i = work[-1]
        if i < len(succ[v]):
            work[-1] = (v, i + 1)
            w = succ[v][i]
            if index[w] < 0:
                index[w] = low[w] = counter
                counter += 1
                stack.append(w)
                on_stack[w] = True
                work.append((w, 0))
            elif on_stack[w]:
                low[v] = min(low[v], index[w])
            continue
        work.pop()
        if work:
            u = work[-1][0]
            low[u] = min(low[u], low[v])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack[w] = False
                comp.append(w)
                if w == v:
                    break
            comps.append(comp)
    return comps


def accepts_lasso(a: Ldgba, word: LassoWord) -> bool:
    """Whether some run on ``prefix . cycle^omega`` visits every accepting set
    infinitely often.  Epsilon moves consume no input position."""
    n = len(word)
    node = lambda q, p: q * n + p  # noqa: E731
    succ: list[list[int]] = [[] for _ in range(a.n_states * n)]
    for q in range(a.n_states):
        for p in range(n):
            nxt = word.successor(p)
            out = succ[node(q, p)]
            for t in sorted(a.delta[q][word[p]]):
                out.append(node(t, nxt))
            for t in sorted(a.eps[q]):
                out.append(node(t, p))
    for comp in _sccs(len(succ), succ, node(a.initial, 0)):
        if len(comp) == 1:
            v = comp[0]
            if v not in succ[v]:
                continue
        states = {v // n for v in comp}
        if all(states & f for f in a.accepting):
            return True
    return False


# ---------------------------------------------------------------- splitting


def split_accepting(a: Ldgba, labels_to_split: Iterable[int]) -> Ldgba:
    """Duplicate accepting states so each copy is entered through one label class.

    A symbol's class is the subset of ``labels_to_split`` it carries (label
    bits all set in the symbol).  An accepting state entered from other
    states by symbols of two or more non-empty classes gets one copy per
    class; entering edges are redirected to the matching copy, edges of the
    empty class go to the first copy, and each copy keeps the original's
    outgoing edges with self-loops staying on the copy.  Copies are
    bisimilar to the original, so the language is unchanged.
    """
    labels = sorted(set(labels_to_split))

    def klass(sym: int) -> tuple[int, ...]:
        return tuple(l for l in labels if l and sym & l == l)

    accepting = a.accepting_union
    copies: dict[int, list[tuple[int, ...]]] = {}
    for q in sorted(accepting):
        classes = set()
        for p in range(a.n_states):
            if p == q:
                continue
            for sym, targets in enumerate(a.delta[p]):
                if q in targets and klass(sym):
                    classes.add(klass(sym))
        if len(classes) >= 2:
            copies[q] = sorted(classes)
    if not copies:
        return a

    # copy 0 of q keeps q's index; further copies are appended
    index: dict[tuple[int, tuple[int, ...]], int] = {}
    names = list(a.names)
    origin = list(range(a.n_states))
    for q, classes in copies.items():
        index[(q, classes[0])] = q
        for c in classes[1:]:
            index[(q, c)] = len(origin)
            origin.append(q)
            names.append(f"{a.names[q]}_{'_'.join(a.atoms.format_symbol(l).strip('{}') for l in c)}")
        names[q] = f"{a.names[q]}_{'_'.join(a.atoms.format_symbol(l).strip('{}') for l in classes[0])}"

    def redirect(src: int, t: int, sym: int) -> int:
        if t not in copies:
            return t
        if origin[src] == t:
            return src
        return index.get((t, klass(sym)), t)

    delta = []
    eps = []
    for new in range(len(origin)):
        old = origin[new]
        delta.append(
            [{redirect(new, t, sym) for t in a.delta[old][sym]} for sym in range(a.n_symbols)]
        )
        eps.append({t for t in a.eps[old]})
    acc = [{new for new in range(len(origin)) if origin[new] in f} for f in a.accepting]
    return Ldgba.build(
        a.atoms,
        a.initial,
        [a.deterministic[o] for o in origin],
        delta,
        eps,
        acc,
        names,
    )


def isomorphic(a: Ldgba, b: Ldgba) -> bool:
    """Structural isomorphism (state names ignored).

    Deterministic edges force the state mapping; successor sets of
    non-deterministic states and epsilon sets are matched by backtracking.
    """
    if a.atoms != b.atoms or a.n_states != b.n_states or len(a.accepting) != len(b.accepting):
        return False
    target = b.structure()

    def pairs(q: int, r: int):
        yield a.eps[q], b.eps[r]
        for sym in range(a.n_symbols):
            yield a.delta[q][sym], b.delta[r][sym]

    def search(mapping: dict[int, int], todo: list[int]) -> bool:
        while todo:
            q = todo.pop()
            for sa, sb in pairs(q, mapping[q]):
                if len(sa) != len(sb):
                    return False
                free_a = sorted(t for t in sa if t not in mapping)
                used = set(mapping.values())
                if any(mapping[t] not in sb for t in sa if t in mapping):
                    return False
                free_b = sorted(t for t in sb if t not in used)
                if len(free_a) != len(free_b):
                    return False
                if len(free_a) == 1:
                    mapping[free_a[0]] = free_b[0]
                    todo.append(free_a[0])
                elif free_a:
                    for perm in permutations(free_b):
                        m2 = dict(mapping)
                        m2.update(zip(free_a, perm))
                        if search(m2, todo + free_a + [q]):
                            return True
                    return False
        rest_a = [q for q in range(a.n_states) if q not in mapping]
        rest_b = sorted(set(range(b.n_states)) - set(mapping.values()))
        for perm in permutations(rest_b):
            m = dict(mapping)
            m.update(zip(rest_a, perm))
            order = sorted(m, key=m.get)
            if a.relabel(order).structure() == target:
                return True
        return False

    return search({a.initial: b.initial}, [a.initial])
