"""Probabilistically labelled POMDPs (PL-POMDPs) and their simulator.

Every stochastic table is held as sparse rows ``(support, probabilities)``
so sampling is an inverse-CDF lookup over a short list regardless of the
state count.  ``dense_transitions`` / ``dense_observations`` materialise
full arrays for small models (oracles, table checks).
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .logic import AtomSet

TOL = 1e-9

STREAMS = ("transition", "observation", "label", "exploration", "init", "replay", "epsilon", "network")


class Rng:
    """Seeded bundle of independent generators, one per named stream."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        children = np.random.SeedSequence(self.seed).spawn(len(STREAMS))
        self._streams = {n: np.random.default_rng(c) for n, c in zip(STREAMS, children)}

    def __getattr__(self, name: str) -> np.random.Generator:
        try:
            return self.__dict__["_streams"][name]
        except KeyError:
            raise AttributeError(name) from None


class Row:
    """A discrete distribution over integer outcomes with cached CDF."""

    __slots__ = ("support", "probs", "cdf")

    def __init__(self, support: Sequence[int], probs: Sequence[float]):
        self.support = [int(x) for x in support]
        self.probs = [float(p) for p in probs]
        acc = 0.0
        self.cdf = []
        for p in self.probs:
            acc += p
            self.cdf.append(acc)

    @classmethod
    def from_mapping(cls, dist: Mapping[int, float]) -> "Row":
        items = sorted((k, v) for k, v in dist.items() if v > 0.0)
        return cls([k for k, _ in items], [v for _, v in items])

    def sample(self, gen: np.random.Generator) -> int:
        i = bisect.bisect_right(self.cdf, gen.random() * self.cdf[-1])
        return self.support[min(i, len(self.support) - 1)]

    def total(self) -> float:
        return float(sum(self.probs))

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.support, self.probs))

    def __repr__(self) -> str:
        return f"Row({self.as_dict()!r})"


class EnvStep(NamedTuple):
    next_state: int
    observation: int
    label: int
    reward: float


class UnavailableActionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PlPomdp:
    """PL-POMDP with states, actions, observations indexed from 0.

    ``transitions[s][a]`` and ``observations[s'][a]`` are :class:`Row`
    distributions (``None`` for unavailable actions); ``labels[s]`` is a Row
    over symbols of ``atoms`` (the empty symbol 0 marks unlabelled states).
    """

    actions: tuple[str, ...]
    observation_names: tuple[str, ...]
    atoms: AtomSet
    transitions: tuple[tuple[Row | None, ...], ...]
    observations: tuple[tuple[Row | None, ...], ...]
    labels: tuple[Row, ...]
    initial: int = 0
    rewards: Mapping[tuple[int, int, int], float] | None = None
    state_names: tuple[str, ...] = ()

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def n_observations(self) -> int:
        return len(self.observation_names)

    def available(self, s: int) -> list[int]:
        return [a for a, row in enumerate(self.transitions[s]) if row is not None]

    def observation_support(self, s: int) -> set[int]:
        out: set[int] = set()
        for row in self.observations[s]:
            if row is not None:
                out.update(o for o, p in zip(row.support, row.probs) if p > 0)
        return out

    def reward(self, s: int, a: int, s2: int) -> float:
        if not self.rewards:
            return 0.0
        return float(self.rewards.get((s, a, s2), 0.0))

    def dense_transitions(self) -> np.ndarray:
        T = np.zeros((self.n_states, self.n_actions, self.n_states))
        for s, rows in enumerate(self.transitions):
            for a, row in enumerate(rows):
                if row is not None:
                    T[s, a, row.support] = row.probs
        return T

    def dense_observations(self) -> np.ndarray:
        Z = np.zeros((self.n_states, self.n_actions, self.n_observations))
        for s, rows in enumerate(self.observations):
            for a, row in enumerate(rows):
                if row is not None:
                    Z[s, a, row.support] = row.probs
        return Z

    @classmethod
    def from_dense(
        cls,
        T: np.ndarray,
        Z: np.ndarray,
        labels: Sequence[Mapping[int, float]],
        atoms: AtomSet,
        actions: Sequence[str] | None = None,
        observation_names: Sequence[str] | None = None,
        available: np.ndarray | None = None,
        initial: int = 0,
        rewards: Mapping[tuple[int, int, int], float] | None = None,
    ) -> "PlPomdp":
        T = np.asarray(T, dtype=float)
        Z = np.asarray(Z, dtype=float)
        n_s, n_a, _ = T.shape
        if available is None:
            available = np.ones((n_s, n_a), dtype=bool)
        trans = tuple(
            tuple(
                Row.from_mapping({int(t): T[s, a, t] for t in np.nonzero(T[s, a])[0]})
                if available[s, a]
                else None
                for a in range(n_a)
            )
            for s in range(n_s)
        )
        obs = tuple(
            tuple(
                Row.from_mapping({int(o): Z[s, a, o] for o in np.nonzero(Z[s, a])[0]})
                for a in range(n_a)
            )
            for s in range(n_s)
        )
        return cls(
            actions=tuple(actions or (f"a{i}" for i in range(n_a))),
            observation_names=tuple(observation_names or (f"o{i}" for i in range(Z.shape[2]))),
            atoms=atoms,
            transitions=trans,
            observations=obs,
            labels=tuple(Row.from_mapping(dict(l)) for l in labels),
            initial=initial,
            rewards=rewards,
        )


def _row_problems(row: Row, n: int, where: str) -> list[str]:
    out = []
    if any(not 0 <= x < n for x in row.support):
        out.append(f"{where}: outcome out of range")
    if any(not (0.0 <= p <= 1.0) for p in row.probs):
        out.append(f"{where}: probability outside [0, 1]")
    total = row.total()
    if abs(total - 1.0) > TOL:
        out.append(f"{where}: probabilities sum to {total:.12g}")
    return out


def validate(m: PlPomdp) -> list[str]:
    """Every stochasticity violation, naming (s, a), (s', a) or s."""
    out = []
    n = m.n_states
    if not 0 <= m.initial < n:
        out.append(f"initial state {m.initial} out of range")
    if len(m.observations) != n or len(m.labels) != n:
        out.append("observation/label tables do not cover every state")
        return out
    for s in range(n):
        if len(m.transitions[s]) != m.n_actions:
            out.append(f"T(s={s}): expected {m.n_actions} action rows")
            continue
        if not m.available(s):
            out.append(f"A(s={s}) is empty")
        for a, row in enumerate(m.transitions[s]):
            if row is not None:
                out += _row_problems(row, n, f"T(s={s}, a={m.actions[a]})")
        for a, row in enumerate(m.observations[s]):
            if row is None:
                out.append(f"Omega(s'={s}, a={m.actions[a]}) missing")
            else:
                out += _row_problems(row, m.n_observations, f"Omega(s'={s}, a={m.actions[a]})")
        out += _row_problems(m.labels[s], m.atoms.n_symbols, f"P_L(s={s})")
    return out


def step(m: PlPomdp, s: int, a: int, rng: Rng) -> EnvStep:
    """Sample s' ~ T(s, a), o ~ Omega(s', a), l ~ P_L(s')."""
    row = m.transitions[s][a] if 0 <= a < m.n_actions else None
    if row is None:
        raise UnavailableActionError(f"action {a} unavailable at state {s}")
    s2 = row.sample(rng.transition)
    o = m.observations[s2][a].sample(rng.observation)
    label = m.labels[s2].sample(rng.label)
    return EnvStep(s2, o, label, m.reward(s, a, s2))


def label_distribution(m: PlPomdp, s: int) -> list[tuple[int, float]]:
    row = m.labels[s]
    return list(zip(row.support, row.probs))
