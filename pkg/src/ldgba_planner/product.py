"""Lazy product of a PL-POMDP with an LDGBA, plus an explicit oracle.

Product actions are plain ints for environment actions and
:class:`EpsAction` for epsilon moves of the automaton.  The automaton reads
the label sampled at the arrival state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np
import scipy.sparse as sp

from .automata import Ldgba
from .pomdp import PlPomdp, Rng, UnavailableActionError
from .pomdp import step as env_step

REWARD_MODES = ("base", "redesigned")


class ProductState(NamedTuple):
    s: int
    q: int


class EpsAction(NamedTuple):
    target: int


ProductAction = Union[int, EpsAction]


class ProductStep(NamedTuple):
    next: ProductState
    observation: int | None
    label: int | None
    reward: float
    was_epsilon: bool


@dataclass(frozen=True, eq=False)
class Product:
    pomdp: PlPomdp
    automaton: Ldgba
    reward_mode: str = "base"
    base_reward: float = 10.0
    proj: tuple[int, ...] = field(init=False, repr=False)
    accepting: frozenset[int] = field(init=False, repr=False)

    def __post_init__(self):
        if self.reward_mode not in REWARD_MODES:
            raise ValueError(f"reward_mode must be one of {REWARD_MODES}, got {self.reward_mode!r}")
        missing = [n for n in self.automaton.atoms if n not in self.pomdp.atoms]
        if missing:
            raise ValueError(f"automaton atoms not provided by the environment: {missing}")
        aut = self.automaton
        for q in range(aut.n_states):
            for sym, targets in enumerate(aut.delta[q]):
                if len(targets) != 1:
                    raise ValueError(
                        f"automaton state {aut.names[q]} has {len(targets)} successors on "
                        f"{aut.atoms.format_symbol(sym)}; product needs one"
                    )
        object.__setattr__(self, "proj", tuple(self.pomdp.atoms.projection(aut.atoms)))
        object.__setattr__(self, "accepting", aut.accepting_union)
        # successor table over environment symbols, one row per automaton state
        object.__setattr__(
            self,
            "_next_q",
            tuple(
                tuple(next(iter(aut.delta[q][self.proj[l]])) for l in range(len(self.proj)))
                for q in range(aut.n_states)
            ),
        )

    @property
    def n_env_actions(self) -> int:
        return self.pomdp.n_actions

    def initial_state(self, s: int | None = None) -> ProductState:
        return ProductState(self.pomdp.initial if s is None else s, self.automaton.initial)

    def delta(self, q: int, label: int) -> int:
        """Automaton successor of ``q`` on an environment symbol."""
        return self._next_q[q][label]

    def is_accepting(self, q: int) -> bool:
        return q in self.accepting


def available_actions(p: Product, x: ProductState) -> list[ProductAction]:
    acts: list[ProductAction] = list(p.pomdp.available(x.s))
    acts += [EpsAction(t) for t in sorted(p.automaton.eps[x.q])]
    return acts


def reward(p: Product, x: ProductState, a: ProductAction, x2: ProductState, label: int | None) -> float:
    if isinstance(a, EpsAction) or x2.q not in p.accepting:
        return 0.0
    if p.reward_mode == "redesigned" and x2.q == x.q:
        return 0.0
    return p.base_reward


def step(p: Product, x: ProductState, a: ProductAction, rng: Rng) -> ProductStep:
    if isinstance(a, EpsAction):
        if a.target not in p.automaton.eps[x.q]:
            raise UnavailableActionError(f"no epsilon edge {x.q} -> {a.target}")
        return ProductStep(ProductState(x.s, a.target), None, None, 0.0, True)
    e = env_step(p.pomdp, x.s, a, rng)
    x2 = ProductState(e.next_state, p._next_q[x.q][e.label])
    return ProductStep(x2, e.observation, e.label, reward(p, x, a, x2, e.label), False)


# ---------------------------------------------------------------- explicit oracle


@dataclass
class ExplicitMdp:
    """Explicit product MDP.  State ``s * n_q + q``; action ``a < n_env`` is an
    environment action, ``n_env + t`` is the epsilon move to automaton state t."""

    n_s: int
    n_q: int
    n_env: int
    P: list[sp.csr_matrix]  # one (N, N) matrix per action
    R: np.ndarray  # (N, n_actions) expected reward
    available: np.ndarray  # (N, n_actions) bool

    @property
    def n_states(self) -> int:
        return self.n_s * self.n_q

    @property
    def n_actions(self) -> int:
        return self.n_env + self.n_q

    def index(self, x: ProductState) -> int:
        return x.s * self.n_q + x.q

    def state(self, i: int) -> ProductState:
        return ProductState(*divmod(i, self.n_q))

    def action(self, a: int) -> ProductAction:
        return a if a < self.n_env else EpsAction(a - self.n_env)

    def action_index(self, a: ProductAction) -> int:
        return self.n_env + a.target if isinstance(a, EpsAction) else int(a)

    def row_sums(self) -> np.ndarray:
        out = np.zeros((self.n_states, self.n_actions))
        for a, P in enumerate(self.P):
            out[:, a] = np.asarray(P.sum(axis=1)).ravel()
        return out

    def reachable(self, start: list[int]) -> np.ndarray:
        seen = np.zeros(self.n_states, dtype=bool)
        seen[start] = True
        adj = sum(P for P in self.P).tocsr()
        frontier = list(start)
        while frontier:
            nxt = []
            for i in frontier:
                for j in adj.indices[adj.indptr[i] : adj.indptr[i + 1]]:
                    if not seen[j]:
                        seen[j] = True
                        nxt.append(j)
            frontier = nxt
        return seen


class BoundExceeded(ValueError):
    pass


def enumerate_explicit(p: Product, bound: int = 50_000) -> ExplicitMdp:
    m, aut = p.pomdp, p.automaton
    n_s, n_q, n_env = m.n_states, aut.n_states, m.n_actions
    n = n_s * n_q
    if n > bound:
        raise BoundExceeded(f"product has {n} states, bound is {bound}")
    n_act = n_env + n_q
    rows: list[list[int]] = [[] for _ in range(n_act)]
    cols: list[list[int]] = [[] for _ in range(n_act)]
    vals: list[list[float]] = [[] for _ in range(n_act)]
    R = np.zeros((n, n_act))
    avail = np.zeros((n, n_act), dtype=bool)
    for s in range(n_s):
        for q in range(n_q):
            i = s * n_q + q
            x = ProductState(s, q)
            for a, trow in enumerate(m.transitions[s]):
                if trow is None:
                    continue
                avail[i, a] = True
                acc: dict[int, float] = {}
                for s2, pt in zip(trow.support, trow.probs):
                    lrow = m.labels[s2]
                    for l, pl in zip(lrow.support, lrow.probs):
                        q2 = p._next_q[q][l]
                        j = s2 * n_q + q2
                        acc[j] = acc.get(j, 0.0) + pt * pl
                        R[i, a] += pt * pl * reward(p, x, a, ProductState(s2, q2), l)
                for j, v in acc.items():
                    rows[a].append(i)
                    cols[a].append(j)
                    vals[a].append(v)
            for t in aut.eps[q]:
                a = n_env + t
                avail[i, a] = True
                rows[a].append(i)
                cols[a].append(s * n_q + t)
                vals[a].append(1.0)
    P = [sp.csr_matrix((vals[a], (rows[a], cols[a])), shape=(n, n)) for a in range(n_act)]
    return ExplicitMdp(n_s, n_q, n_env, P, R, avail)


@dataclass
class VIResult:
    Q: np.ndarray  # (N, n_actions), -inf where unavailable
    V: np.ndarray
    converged: bool
    iterations: int
    residual: float

    def greedy(self) -> np.ndarray:
        """Greedy action per state, lowest index among ties."""
        return np.argmax(self.Q, axis=1)

    def optimal_set(self, i: int, tol: float = 1e-9) -> set[int]:
        row = self.Q[i]
        return {int(a) for a in np.nonzero(row >= self.V[i] - tol)[0]}


def value_iteration(
    mdp: ExplicitMdp, gamma: float, tol: float = 1e-10, max_iter: int = 100_000
) -> VIResult:
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    V = np.zeros(mdp.n_states)
    mask = ~mdp.available
    Q = np.empty((mdp.n_states, mdp.n_actions))
    residual = np.inf
    it = 0
    # stop when the contraction bound puts V within tol of the fixed point
    stop = tol * (1.0 - gamma) / max(gamma, 1e-300) if gamma > 0 else np.inf
    while it < max_iter:
        it += 1
        for a, P in enumerate(mdp.P):
            Q[:, a] = mdp.R[:, a] + gamma * (P @ V)
        Q[mask] = -np.inf
        V_new = Q.max(axis=1)
        residual = float(np.max(np.abs(V_new - V)))
        V = V_new
        if residual <= stop or gamma == 0.0:
            break
    for a, P in enumerate(mdp.P):
        Q[:, a] = mdp.R[:, a] + gamma * (P @ V)
    Q[mask] = -np.inf
    V = Q.max(axis=1)
    return VIResult(Q, V, residual <= stop or gamma == 0.0, it, bellman_residual(mdp, Q, gamma))


def bellman_residual(mdp: ExplicitMdp, Q: np.ndarray, gamma: float) -> float:
    V = Q.max(axis=1)
    worst = 0.0
    for a, P in enumerate(mdp.P):
        ok = mdp.available[:, a]
        target = mdp.R[:, a] + gamma * (P @ V)
        if ok.any():
            worst = max(worst, float(np.max(np.abs(Q[ok, a] - target[ok]))))
    return worst
