"""Model checking of recorded traces against an automaton or formula."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..automata import Ldgba, accepts_lasso
from ..logic import Formula, LassoWord
from ..translate import translate
from .dqn import Trace


@dataclass
class Verdict:
    verdict: str  # accepted | rejected | trap | visits | insufficient
    set_counts: list[int] = field(default_factory=list)
    trap: bool = False
    lasso: bool | None = None
    steps: int = 0
    phases: list[tuple[str, list[int]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict in ("accepted", "visits")


def _word(trace: Trace, aut: Ldgba) -> list[int]:
    return [aut.atoms.symbol(n for n in st.label if n in aut.atoms) for st in trace.steps if not st.was_epsilon]


def _eps_target(aut: Ldgba, q: int, action: str) -> int | None:
    name = action.split(":", 1)[1]
    for t in aut.eps[q]:
        if aut.names[t] == name:
            return t
    return None


def check_trace(trace: Trace, spec: Ldgba | Formula, periodize: int | None = None) -> Verdict:
    """Replay the trace's labels through the automaton.

    Epsilon moves recorded in the trace are followed when the automaton has
    a matching edge.  Reports visits per accepting set, entry into a state
    from which acceptance is impossible, and, when ``periodize`` is given,
    whether ``prefix . (last periodize labels)^omega`` is accepted.
    """
    aut = spec if isinstance(spec, Ldgba) else translate(spec)
    if not trace.steps:
        return Verdict("insufficient")
    sinks = aut.rejecting_sinks()
    counts = [0] * len(aut.accepting)
    q = aut.initial
    trap = q in sinks
    phases: list[tuple[str, list[int]]] = [(aut.names[q], [trace.steps[0].s])]
    for st in trace.steps:
        if st.was_epsilon:
            t = _eps_target(aut, q, st.action)
            if t is not None:
                q = t
                phases.append((aut.names[q], [st.next_s]))
            continue
        sym = aut.atoms.symbol(n for n in st.label if n in aut.atoms)
        nxt = sorted(aut.delta[q][sym])
        q2 = nxt[0] if nxt else q
        for i, f in enumerate(aut.accepting):
            if q2 in f:
                counts[i] += 1
        if q2 != q:
            phases.append((aut.names[q2], []))
        phases[-1][1].append(st.next_s)
        q = q2
        trap = trap or q in sinks
    lasso = None
    if periodize:
        word = _word(trace, aut)
        if 0 < periodize <= len(word):
            cut = len(word) - periodize
            lasso = accepts_lasso(aut, LassoWord(word[:cut], word[cut:]))
    if trap:
        verdict = "trap"
    elif lasso is not None:
        verdict = "accepted" if lasso else "rejected"
    else:
        verdict = "visits" if all(counts) else "rejected"
    return Verdict(verdict, counts, trap, lasso, len(trace.steps), phases)


def completed_cycles(trace: Trace, aut: Ldgba) -> int:
    """Smallest number of entries (from outside) into any accepting set:
    for a recurrence over several sets this counts full rounds."""
    entries = [0] * len(aut.accepting)
    for st in trace.steps:
        if st.was_epsilon:
            continue
        for i, f in enumerate(aut.accepting):
            if st.next_q in f and st.q not in f:
                entries[i] += 1
    return min(entries) if entries else 0
