"""Two-agent decentralised training on a shared grid.

Each agent owns a product process (same environment kernel and task
automaton), its own networks and replay memory.  The task input of an
agent's network is its own automaton-state FIFO merged with the other
agent's FIFO.  Moves are resolved jointly so the agents never share a cell:
agent 0 has priority, a conflicting move of agent 1 becomes ``stay``, swaps
are refused, and agent 0 stays put if agent 1 ends up in its target cell.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .. import product as prod
from ..pomdp import Rng
from ..product import EpsAction, Product, ProductState, ProductStep
from .config import TrainConfig
from .dqn import EpisodeMetrics, EpsilonMoves, Learner, Trace, _trace_step, select_action
from .memory import Experience, HistoryWindows, merge_task_streams


def resolve_moves(current: Sequence[int], intended: Sequence[int]) -> list[int]:
    """Final cells for two agents given their sampled intended cells."""
    s0, s1 = current
    n0, n1 = intended
    if n1 == n0 or (n1 == s0 and n0 == s1):
        n1 = s1
    if n0 == n1:
        n0 = s0
    return [n0, n1]


def joint_step(
    p: Product, xs: Sequence[ProductState], actions: Sequence[prod.ProductAction], rng: Rng
) -> list[ProductStep]:
    m = p.pomdp
    intended = []
    for x, a in zip(xs, actions):
        if isinstance(a, EpsAction):
            intended.append(x.s)
        else:
            row = m.transitions[x.s][a]
            if row is None:
                raise prod.UnavailableActionError(f"action {a} unavailable at state {x.s}")
            intended.append(row.sample(rng.transition))
    final = resolve_moves([x.s for x in xs], intended)
    out = []
    for x, a, s2 in zip(xs, actions, final):
        if isinstance(a, EpsAction):
            out.append(prod.step(p, x, a, rng))
            continue
        o = m.observations[s2][a].sample(rng.observation)
        label = m.labels[s2].sample(rng.label)
        x2 = ProductState(s2, p.delta(x.q, label))
        out.append(ProductStep(x2, o, label, prod.reward(p, x, a, x2, label), False))
    return out


@dataclass
class MarlResult:
    learners: list[Learner]
    metrics: list[tuple[EpisodeMetrics, EpisodeMetrics]]
    collisions: int


class _AgentState:
    def __init__(self, cfg: TrainConfig, p: Product, x: ProductState, gen):
        self.windows = HistoryWindows(cfg.obs_window, cfg.task_window, "aware", p.automaton.initial)
        self.eps = EpsilonMoves(cfg, gen)
        self.eps.reset()
        self.x = x
        self.total, self.visits, self.trap, self.losses = 0.0, 0, False, []


def _merged(agents, i: int, n_q: int):
    return merge_task_streams(agents[i].windows.task_seq(), agents[1 - i].windows.task_seq(), n_q)


def _joint_episode(p, cfg, learners, starts, rng, epsilon, train: bool, active, traces=None):
    n_q = p.automaton.n_states
    sinks = p.automaton.rejecting_sinks()
    agents = [_AgentState(cfg, p, p.initial_state(s), rng.epsilon) for s in starts]
    collisions = 0
    for i in range(cfg.steps):
        tasks = [_merged(agents, k, n_q) for k in range(2)]
        acts = []
        for k, ag in enumerate(agents):
            if not active[k]:
                acts.append(p.pomdp.actions.index("stay"))
                continue
            acts.append(select_action(learners[k], ag.windows, p, ag.x, i, epsilon, ag.eps, rng, task_seq=tasks[k]))
        steps = joint_step(p, [ag.x for ag in agents], acts, rng)
        if steps[0].next.s == steps[1].next.s:
            collisions += 1
        olds = [(ag.windows.full, ag.windows.obs_seq()) for ag in agents]
        for ag, st in zip(agents, steps):
            if st.was_epsilon:
                ag.eps.used = True
                ag.windows.push_task(st.next.q)
            else:
                ag.windows.push_obs(st.observation)
                ag.windows.push_task(st.next.q)
        new_tasks = [_merged(agents, k, n_q) for k in range(2)]
        for k, (ag, st) in enumerate(zip(agents, steps)):
            if traces is not None:
                traces[k].steps.append(_trace_step(p, ag.x, acts[k], st))
            if train and active[k] and not st.was_epsilon and olds[k][0]:
                learners[k].memory.push(
                    Experience(olds[k][1], tasks[k], int(acts[k]), st.reward, ag.windows.obs_seq(), new_tasks[k])
                )
            ag.total += st.reward
            if not st.was_epsilon and st.next.q in p.accepting:
                ag.visits += 1
            ag.trap = ag.trap or st.next.q in sinks
            ag.x = st.next
        if train and i > 0:
            for k in range(2):
                if not active[k]:
                    continue
                if cfg.fits_at(i):
                    loss = learners[k].train_step(rng.replay)
                    if loss is not None:
                        agents[k].losses.append(loss)
                if i % cfg.sync == 0:
                    learners[k].sync()
    return agents, collisions


def marl_run_training(
    p: Product,
    cfg: TrainConfig,
    starts: Sequence[int],
    active: Sequence[bool] = (True, True),
    on_episode: Callable[[tuple[EpisodeMetrics, EpisodeMetrics]], None] | None = None,
) -> MarlResult:
    cfg.checked()
    if "stay" not in p.pomdp.actions:
        raise ValueError("two-agent worlds need a 'stay' action")
    rng = Rng(cfg.seed)
    n_task = 2 * p.automaton.n_states
    learners = [Learner(cfg, p.pomdp.n_observations, n_task, p.n_env_actions, rng.network) for _ in range(2)]
    metrics = []
    collisions = 0
    for ep in range(cfg.episodes):
        for ln in learners:
            ln.opt.lr = cfg.learning_rate(ep)
        agents, c = _joint_episode(p, cfg, learners, starts, rng, cfg.epsilon(ep), True, active)
        collisions += c
        pair = tuple(
            EpisodeMetrics(ep, ag.total, ag.visits, ag.trap, cfg.steps, float(np.mean(ag.losses)) if ag.losses else float("nan"))
            for ag in agents
        )
        metrics.append(pair)
        if on_episode is not None:
            on_episode(pair)
    return MarlResult(learners, metrics, collisions)


def marl_rollout(
    p: Product,
    learners: Sequence[Learner],
    cfg: TrainConfig,
    starts: Sequence[int],
    rng: Rng,
    steps: int | None = None,
    active: Sequence[bool] = (True, True),
) -> tuple[list[Trace], int]:
    """Greedy joint rollout; returns both traces and the co-occupancy count."""
    run_cfg = cfg if steps is None else cfg.with_(steps=steps)
    traces = [Trace([], p.initial_state(s)) for s in starts]
    _, collisions = _joint_episode(p, run_cfg, learners, starts, rng, 0.0, False, active, traces)
    return traces, collisions
