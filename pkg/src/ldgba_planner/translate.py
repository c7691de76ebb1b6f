"""Direct LTL -> LDGBA translation for the task fragment used by the planners.

A formula is split into top-level conjuncts and each conjunct is matched to
a small deterministic monitor:

* ``G psi``               safety (violations lead to a shared trap)
* ``G F psi``             recurrence
* ``G F (x & F y)``       ordered surveillance, a two-phase cycle with one
                          accepting set per phase
* ``l U r``               sequencing step
* ``F psi``               reachability
* ``G F p | G F q | ...`` disjunctive recurrence: a non-deterministic
                          initial part with epsilon moves into one
                          recurrence branch per disjunct

where ``psi, x, y, l, r`` are temporal-free.  The automaton is the
reachable part of the synchronous product of the monitors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from . import logic
from .automata import Ldgba, split_accepting, validate
from .logic import (
    Always,
    And,
    AtomSet,
    Eventually,
    Formula,
    Or,
    TrueF,
    Until,
    atoms_of,
    holds,
    is_boolean,
    to_text,
)


class FragmentError(ValueError):
    def __init__(self, sub: Formula):
        super().__init__(f"unsupported subformula: {to_text(sub)}")
        self.subformula = sub


@dataclass
class _Monitor:
    kind: str
    table: list[list[int]]  # [state][sym] -> state
    accepting: list[set[int]]
    bad: set[int]


def _monitor(kind: str, n: int, rule: Callable[[int, int], int], accepting, bad, atoms):
    table = [[rule(s, sym) for sym in atoms.symbols()] for s in range(n)]
    return _Monitor(kind, table, [set(f) for f in accepting], set(bad))


def _conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _disjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return _disjuncts(f.left) + _disjuncts(f.right)
    return [f]


def _recurrence_body(f: Formula) -> Formula | None:
    if isinstance(f, Always) and isinstance(f.operand, Eventually) and is_boolean(f.operand.operand):
        return f.operand.operand
    return None


def _match(conj: Formula, atoms: AtomSet):
    """Return ('monitor', _Monitor) or ('branches', [psi...])."""
    h = lambda g, sym: holds(g, atoms, sym)  # noqa: E731
    if isinstance(conj, Or):
        bodies = [_recurrence_body(d) for d in _disjuncts(conj)]
        if all(b is not None for b in bodies):
            return "branches", bodies
        raise FragmentError(conj)
    body = _recurrence_body(conj)
    if body is not None:
        return "monitor", _monitor(
            "recurrence", 2, lambda s, sym: 1 if h(body, sym) else 0, [{1}], (), atoms
        )
    if isinstance(conj, Always):
        inner = conj.operand
        if is_boolean(inner):
            return "monitor", _monitor(
                "safety", 2, lambda s, sym: 0 if s == 0 and h(inner, sym) else 1, [], {1}, atoms
            )
        if (
            isinstance(inner, Eventually)
            and isinstance(inner.operand, And)
            and is_boolean(inner.operand.left)
            and isinstance(inner.operand.right, Eventually)
            and is_boolean(inner.operand.right.operand)
        ):
            x, y = inner.operand.left, inner.operand.right.operand

            def phase(s, sym):
                if s == 0:
                    return 1 if h(x, sym) else 0
                return 0 if h(y, sym) else 1

            return "monitor", _monitor("ordered", 2, phase, [{1}, {0}], (), atoms)
        raise FragmentError(conj)
    if isinstance(conj, Until) and is_boolean(conj.left) and is_boolean(conj.right):
        left, right = conj.left, conj.right

        def seq(s, sym):
            if s != 0:
                return s
            if h(right, sym):
                return 1
            return 0 if h(left, sym) else 2

        return "monitor", _monitor("until", 3, seq, [{1}], {2}, atoms)
    if isinstance(conj, Eventually) and is_boolean(conj.operand):
        goal = conj.operand
        return "monitor", _monitor(
            "reach", 2, lambda s, sym: 1 if s == 1 or h(goal, sym) else 0, [{1}], (), atoms
        )
    raise FragmentError(conj)


_TRAP = "trap"
_PRE = -1  # mode of the non-deterministic part


def translate(f: Formula, atoms: AtomSet | None = None) -> Ldgba:
    """Build an LDGBA for a formula of the supported fragment.

    Raises :class:`FragmentError` naming the first conjunct that matches no
    supported shape.
    """
    if atoms is None:
        atoms = AtomSet(atoms_of(f))
    monitors: list[_Monitor] = []
    branches: list[Formula] | None = None
    for conj in _conjuncts(f):
        if isinstance(conj, TrueF):
            continue
        kind, payload = _match(conj, atoms)
        if kind == "branches":
            if branches is not None:
                raise FragmentError(conj)
            branches = payload
        else:
            monitors.append(payload)

    if branches is not None:
        branch_tables = [
            [[1 if holds(psi, atoms, sym) else 0 for sym in atoms.symbols()]] * 2
            for psi in branches
        ]
    else:
        branch_tables = []

    def advance(mons: tuple[int, ...], sym: int):
        nxt = tuple(m.table[s][sym] for m, s in zip(monitors, mons))
        if any(s in m.bad for m, s in zip(monitors, nxt)):
            return None
        return nxt

    init_mons = tuple(0 for _ in monitors)
    start = (_PRE, 0, init_mons) if branches is not None else (0, 0, init_mons)
    order: list = [start]
    ids = {start: 0}
    edges: list[tuple[list, list]] = []

    def intern(key) -> int:
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
        return ids[key]

    i = 0
    while i < len(order):
        key = order[i]
        i += 1
        if key == _TRAP:
            edges.append(([ids[_TRAP]] * atoms.n_symbols, []))
            continue
        mode, b, mons = key
        eps = []
        if mode == _PRE:
            eps = [intern((k, 0, mons)) for k in range(len(branches))]
        row = []
        for sym in atoms.symbols():
            nxt = advance(mons, sym)
            if nxt is None:
                row.append(intern(_TRAP))
            elif mode == _PRE:
                row.append(intern((_PRE, 0, nxt)))
            elif branches is not None:
                row.append(intern((mode, branch_tables[mode][b][sym], nxt)))
            else:
                row.append(intern((mode, 0, nxt)))
        edges.append((row, eps))

    det = [key == _TRAP or key[0] != _PRE for key in order]
    live = [q for q, key in enumerate(order) if key != _TRAP and det[q]]
    accepting: list[set[int]] = []
    if branches is not None:
        accepting.append({q for q in live if order[q][1] == 1})
    for j, m in enumerate(monitors):
        for fset in m.accepting:
            accepting.append({q for q in live if order[q][2][j] in fset})
    if not accepting:
        accepting.append(set(live))

    names = []
    for q, key in enumerate(order):
        names.append(f"q{q}")
    aut = Ldgba.build(
        atoms,
        0,
        det,
        [[{t} for t in row] for row, _ in edges],
        [set(e) for _, e in edges],
        accepting,
        names,
    )
    problems = validate(aut)
    if problems:  # pragma: no cover - construction invariant
        raise AssertionError(f"translation produced an invalid LDGBA: {problems}")
    return aut


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class Task:
    formula: str
    split: tuple[str, ...] = ()
    reward_mode: str = "base"


TASKS: dict[str, Task] = {
    "grid_phi1": Task("(G F a | G F b) & G !c"),
    "grid_phi2": Task("G F (a & F b) & G !c", split=("a", "b"), reward_mode="redesigned"),
    "office_task1": Task(
        "G F (Print & F (a | c)) & G !S", split=("Print", "a", "c"), reward_mode="redesigned"
    ),
    "office_task2": Task(
        "(!(a | c) U Print) & (!Sply U (a | c)) & F Sply & G !S",
        split=("Print", "Sply", "a", "c"),
        reward_mode="redesigned",
    ),
    "warehouse_phi": Task("G F (a & F b)", split=("a", "b"), reward_mode="redesigned"),
    "go_to_goal": Task("F b"),
}


def task_formula(name: str) -> Formula:
    try:
        return logic.parse(TASKS[name].formula)
    except KeyError:
        raise KeyError(f"unknown task {name!r}; known: {', '.join(TASKS)}") from None


def task_automaton(name: str) -> Ldgba:
    f = task_formula(name)
    aut = translate(f)
    split = TASKS[name].split
    if split:
        aut = split_accepting(aut, [aut.atoms.symbol([s]) for s in split])
    return aut


def translate_text(text: str, atoms: Sequence[str] | None = None) -> Ldgba:
    atom_set = AtomSet(atoms) if atoms is not None else None
    f = logic.parse(text, atom_set)
    return translate(f, atom_set)
