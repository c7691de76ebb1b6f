"""Recurrent deep Q-learning on the product process.

Each step the agent either takes an epsilon move of the automaton (decided
by a separate policy, the networks never score epsilon moves), or an
environment action: uniformly random until the observation window is full,
epsilon-greedy on the target network afterwards.  Transitions with full
windows go to replay memory; the evaluation network is fitted every ``M``
steps and copied into the target network every ``K`` steps.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .. import product as prod
from ..neural import DenseQNet, QNet, RecurrentQNet, TabularQNet, make_batch, make_optimizer, mse_fit
from ..pomdp import Rng
from ..product import EpsAction, Product, ProductState
from .config import TrainConfig
from .memory import Experience, HistoryWindows, ReplayMemory


class EpisodeMetrics(NamedTuple):
    episode: int
    acc_reward: float
    accepting_visits: int
    trap: bool
    steps: int
    mean_loss: float

    def csv_row(self) -> str:
        loss = "" if np.isnan(self.mean_loss) else repr(float(self.mean_loss))
        return f"{self.episode},{self.acc_reward!r},{self.accepting_visits},{int(self.trap)},{self.steps},{loss}"


METRICS_HEADER = "episode,acc_reward,accepting_visits,trap,steps,mean_loss"


class TraceStep(NamedTuple):
    s: int
    q: int
    action: str
    observation: int | None
    label: tuple[str, ...] | None
    reward: float
    next_s: int
    next_q: int
    was_epsilon: bool


@dataclass
class Trace:
    steps: list[TraceStep] = field(default_factory=list)
    start: ProductState | None = None

    def __len__(self) -> int:
        return len(self.steps)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(st._asdict(), sort_keys=True) + "\n" for st in self.steps)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        steps = []
        for line in text.splitlines():
            if line.strip():
                d = json.loads(line)
                d["label"] = tuple(d["label"]) if d["label"] is not None else None
                steps.append(TraceStep(**d))
        start = ProductState(steps[0].s, steps[0].q) if steps else None
        return cls(steps, start)

    def accepting_visits(self, accepting) -> int:
        return sum(1 for st in self.steps if not st.was_epsilon and st.next_q in accepting)

    def cells(self) -> list[int]:
        return [self.start.s] + [st.next_s for st in self.steps] if self.start else []


# ---------------------------------------------------------------- learner


def task_vocab(p: Product, mode: str) -> int:
    return p.automaton.n_states if mode == "aware" else p.automaton.n_symbols


def make_net(cfg: TrainConfig, n_obs: int, n_task: int, n_actions: int, gen: np.random.Generator) -> QNet:
    if cfg.net == "lstm":
        return RecurrentQNet(n_obs, n_task, n_actions, cfg.obs_hidden, cfg.task_hidden, cfg.dense, gen)
    if cfg.net == "dense":
        return DenseQNet(n_obs, n_task, n_actions, cfg.obs_window, cfg.task_window, cfg.dense, gen)
    return TabularQNet(n_obs, n_task, n_actions, gen)


class Learner:
    """Evaluation and target networks, optimiser and replay memory of one agent."""

    def __init__(self, cfg: TrainConfig, n_obs: int, n_task: int, n_actions: int, gen: np.random.Generator):
        self.cfg = cfg
        self.q_e = make_net(cfg, n_obs, n_task, n_actions, gen)
        self.q_t = self.q_e.copy()
        self.opt = make_optimizer(cfg.optimizer, cfg.alpha, cfg.grad_clip)
        self.memory = ReplayMemory(cfg.replay_capacity)
        self.n_actions = n_actions

    def sync(self) -> None:
        self.q_t.load_from(self.q_e)

    def q_values(self, obs_seq, task_seq, net: QNet | None = None) -> np.ndarray:
        """Action values in reward units."""
        return (net or self.q_t).predict(make_batch([obs_seq], [task_seq]))[0] * self.cfg.value_scale

    def greedy(self, obs_seq, task_seq, available: Sequence[int], net: QNet | None = None) -> int:
        q = self.q_values(obs_seq, task_seq, net)
        if len(available) == self.n_actions:
            return int(np.argmax(q))
        avail = list(available)
        return avail[int(np.argmax(q[avail]))]

    def train_step(self, gen: np.random.Generator) -> float | None:
        """One fit on a uniform minibatch; ``None`` when memory is too small."""
        M = self.cfg.batch
        if len(self.memory) < M:
            return None
        batch = self.memory.sample(M, gen)
        nxt = make_batch([e.next_obs_seq for e in batch], [e.next_task_seq for e in batch])
        rewards = np.array([e.reward for e in batch]) / self.cfg.value_scale
        if self.cfg.gamma > 0:
            targets = rewards + self.cfg.gamma * self.q_t.predict(nxt).max(axis=1)
        else:
            targets = rewards
        cur = make_batch([e.obs_seq for e in batch], [e.task_seq for e in batch])
        return mse_fit(self.q_e, self.opt, cur, [e.action for e in batch], targets)


class EpsilonMoves:
    """Per-episode policy for automaton epsilon moves (at most one per episode)."""

    def __init__(self, cfg: TrainConfig, gen: np.random.Generator):
        self.cfg = cfg
        self.gen = gen
        self.used = False
        self.trigger = 0

    def reset(self) -> None:
        self.used = False
        if self.cfg.eps_policy == "trigger":
            self.trigger = int(self.gen.integers(max(self.cfg.steps, 1)))

    def choose(self, p: Product, x: ProductState, i: int) -> EpsAction | None:
        targets = p.automaton.eps[x.q]
        if self.used or not targets:
            return None
        if self.cfg.eps_policy == "trigger":
            fire = i >= self.trigger
        else:
            fire = self.gen.random() < self.cfg.p_eps
        if not fire:
            return None
        options = sorted(targets)
        return EpsAction(options[int(self.gen.integers(len(options)))])


def select_action(
    learner: Learner,
    windows: HistoryWindows,
    p: Product,
    x: ProductState,
    i: int,
    epsilon: float,
    eps_moves: EpsilonMoves,
    rng: Rng,
    task_seq=None,
) -> prod.ProductAction:
    e = eps_moves.choose(p, x, i)
    if e is not None:
        return e
    avail = p.pomdp.available(x.s)
    if not windows.full or rng.exploration.random() < epsilon:
        return avail[int(rng.exploration.integers(len(avail)))]
    assert windows.full, "network queried with a partial observation window"
    return learner.greedy(windows.obs_seq(), task_seq if task_seq is not None else windows.task_seq(), avail)


def task_token(p: Product, mode: str, step: prod.ProductStep) -> int:
    if mode == "aware":
        return step.next.q
    return p.proj[step.label]


def observe_transition(
    p: Product, windows: HistoryWindows, a: prod.ProductAction, step: prod.ProductStep, mode: str
) -> Experience | None:
    """Update the windows in place; return the experience for replay (only
    for environment actions taken with a full observation window)."""
    if step.was_epsilon:
        if mode == "aware":
            windows.push_task(step.next.q)
        return None
    was_full = windows.full
    old_obs, old_task = windows.obs_seq(), windows.task_seq()
    windows.push_obs(step.observation)
    windows.push_task(task_token(p, mode, step))
    if not was_full:
        return None
    return Experience(old_obs, old_task, int(a), step.reward, windows.obs_seq(), windows.task_seq())


def _action_name(p: Product, a) -> str:
    if isinstance(a, EpsAction):
        return f"eps:{p.automaton.names[a.target]}"
    return p.pomdp.actions[a]


def _trace_step(p: Product, x: ProductState, a, st: prod.ProductStep) -> TraceStep:
    label = None if st.label is None else p.pomdp.atoms.names_of(st.label)
    return TraceStep(x.s, x.q, _action_name(p, a), st.observation, label, st.reward, st.next.s, st.next.q, st.was_epsilon)


def start_state(p: Product, cfg: TrainConfig, starts: Sequence[int] | None, gen: np.random.Generator) -> ProductState:
    if not isinstance(cfg.start, str):
        return p.initial_state(int(cfg.start))
    pool = list(starts) if starts else list(range(p.pomdp.n_states))
    return p.initial_state(pool[int(gen.integers(len(pool)))])


@dataclass
class TrainResult:
    learner: Learner
    metrics: list[EpisodeMetrics]

    @property
    def net(self) -> QNet:
        return self.learner.q_e


def run_training(
    p: Product,
    cfg: TrainConfig,
    starts: Sequence[int] | None = None,
    on_episode: Callable[[EpisodeMetrics], None] | None = None,
) -> TrainResult:
    cfg.checked()
    rng = Rng(cfg.seed)
    learner = Learner(cfg, p.pomdp.n_observations, task_vocab(p, cfg.mode), p.n_env_actions, rng.network)
    eps_moves = EpsilonMoves(cfg, rng.epsilon)
    sinks = p.automaton.rejecting_sinks()
    first = p.automaton.initial if cfg.mode == "aware" else 0
    metrics = []
    for ep in range(cfg.episodes):
        epsilon = cfg.epsilon(ep)
        learner.opt.lr = cfg.learning_rate(ep)
        x = start_state(p, cfg, starts, rng.init)
        windows = HistoryWindows(cfg.obs_window, cfg.task_window, cfg.mode, first)
        eps_moves.reset()
        total, visits, trap, losses = 0.0, 0, False, []
        for i in range(cfg.steps):
            a = select_action(learner, windows, p, x, i, epsilon, eps_moves, rng)
            st = prod.step(p, x, a, rng)
            if st.was_epsilon:
                eps_moves.used = True
            exp = observe_transition(p, windows, a, st, cfg.mode)
            if exp is not None:
                learner.memory.push(exp)
            total += st.reward
            if not st.was_epsilon and st.next.q in p.accepting:
                visits += 1
            trap = trap or st.next.q in sinks
            x = st.next
            if cfg.fits_at(i):
                loss = learner.train_step(rng.replay)
                if loss is not None:
                    losses.append(loss)
            if i > 0 and i % cfg.sync == 0:
                learner.sync()
        m = EpisodeMetrics(ep, total, visits, trap, cfg.steps, float(np.mean(losses)) if losses else float("nan"))
        metrics.append(m)
        if on_episode is not None:
            on_episode(m)
    return TrainResult(learner, metrics)


def rollout(
    p: Product,
    net: QNet,
    cfg: TrainConfig,
    rng: Rng,
    start: ProductState | None = None,
    steps: int | None = None,
    starts: Sequence[int] | None = None,
) -> Trace:
    """Greedy execution (epsilon = 0) with the training window mechanics."""
    n = cfg.steps if steps is None else steps
    learner = Learner.__new__(Learner)
    learner.cfg, learner.q_t, learner.q_e, learner.n_actions = cfg, net, net, net.n_actions
    x = start if start is not None else start_state(p, cfg, starts, rng.init)
    windows = HistoryWindows(cfg.obs_window, cfg.task_window, cfg.mode, p.automaton.initial if cfg.mode == "aware" else 0)
    eps_moves = EpsilonMoves(cfg, rng.epsilon)
    eps_moves.reset()
    trace = Trace([], x)
    for i in range(n):
        a = select_action(learner, windows, p, x, i, 0.0, eps_moves, rng)
        st = prod.step(p, x, a, rng)
        if st.was_epsilon:
            eps_moves.used = True
        observe_transition(p, windows, a, st, cfg.mode)
        trace.steps.append(_trace_step(p, x, a, st))
        x = st.next
    return trace


def sma(values: Sequence[float], window: int) -> np.ndarray:
    """Trailing simple moving average (shorter windows at the start)."""
    v = np.asarray(values, dtype=float)
    c = np.cumsum(np.insert(v, 0, 0.0))
    idx = np.arange(1, len(v) + 1)
    lo = np.maximum(idx - window, 0)
    return (c[idx] - c[lo]) / (idx - lo)
