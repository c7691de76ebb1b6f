"""Reference policies evaluated with the same rollout bookkeeping as the agent."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .. import product as prod
from ..neural import QNet, make_batch
from ..pomdp import Rng
from ..product import ExplicitMdp, Product, ProductState, VIResult
from .dqn import Trace, _trace_step

Policy = Callable[[ProductState, int], prod.ProductAction]


def policy_rollout(p: Product, policy: Policy, steps: int, rng: Rng, start: ProductState) -> Trace:
    trace = Trace([], start)
    x = start
    for i in range(steps):
        a = policy(x, i)
        st = prod.step(p, x, a, rng)
        trace.steps.append(_trace_step(p, x, a, st))
        x = st.next
    return trace


def oracle_policy(mdp: ExplicitMdp, vi: VIResult) -> Policy:
    """Greedy value-iteration policy acting on the true product state."""
    greedy = vi.greedy()

    def act(x: ProductState, i: int):
        return mdp.action(int(greedy[mdp.index(x)]))

    return act


def random_policy(p: Product, gen: np.random.Generator, p_eps: float = 0.05) -> Policy:
    """Uniform environment actions; epsilon moves as in training (at most one)."""
    used = {"eps": False}

    def act(x: ProductState, i: int):
        if i == 0:
            used["eps"] = False
        targets = sorted(p.automaton.eps[x.q])
        if targets and not used["eps"] and gen.random() < p_eps:
            used["eps"] = True
            return prod.EpsAction(targets[int(gen.integers(len(targets)))])
        avail = p.pomdp.available(x.s)
        return avail[int(gen.integers(len(avail)))]

    return act


def start_pool(p: Product, starts: Sequence[int] | None) -> list[int]:
    return list(starts) if starts else list(range(p.pomdp.n_states))


@dataclass
class Agreement:
    agree: int
    total: int
    mean_gap: float
    disagreements: list[tuple[ProductState, int, list[int]]]

    @property
    def fraction(self) -> float:
        return self.agree / self.total if self.total else 1.0


def policy_agreement(
    p: Product,
    mdp: ExplicitMdp,
    vi: VIResult,
    net: QNet,
    starts: Sequence[int] | None = None,
    tol: float = 1e-6,
) -> Agreement:
    """Compare a window-1 network's greedy action with the value-iteration
    optimum on every reachable product state whose automaton state is
    deterministic (epsilon choices are not scored by the network).

    Needs deterministic observations: the network sees the single
    observation its state emits, and the current automaton state.
    """
    m = p.pomdp
    obs_of = []
    for s in range(m.n_states):
        rows = {tuple(r.support) for r in m.observations[s] if r is not None}
        if len(rows) != 1 or len(next(iter(rows))) != 1:
            raise ValueError("policy agreement needs one deterministic observation per state")
        obs_of.append(next(iter(rows))[0])
    reach = mdp.reachable([mdp.index(p.initial_state(s)) for s in start_pool(p, starts)])
    agree, gaps, bad = 0, [], []
    idx = [i for i in np.nonzero(reach)[0] if p.automaton.deterministic[mdp.state(int(i)).q]]
    if not idx:
        return Agreement(0, 0, 0.0, [])
    xs = [mdp.state(int(i)) for i in idx]
    q = net.predict(make_batch([[obs_of[x.s]] for x in xs], [[x.q] for x in xs]))
    for i, x, row in zip(idx, xs, q):
        avail = m.available(x.s)
        a = avail[int(np.argmax(row[avail]))]
        best = vi.optimal_set(int(i), tol)
        gaps.append(float(vi.V[i] - vi.Q[i, a]))
        if a in best:
            agree += 1
        else:
            bad.append((x, a, sorted(best)))
    return Agreement(agree, len(idx), float(np.mean(gaps)), bad)
