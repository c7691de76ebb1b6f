"""History windows, experiences and replay memory."""
from __future__ import annotations

from collections import deque
from typing import NamedTuple, Sequence

import numpy as np

from ..neural.network import Token


class Experience(NamedTuple):
    obs_seq: tuple[int, ...]
    task_seq: tuple[Token, ...]
    action: int
    reward: float
    next_obs_seq: tuple[int, ...]
    next_task_seq: tuple[Token, ...]


class HistoryWindows:
    """Observation ring of the last ``j + 1`` observations and a FIFO task
    window of length ``k`` that only records changes.

    In ``aware`` mode the task window holds automaton states and starts with
    the initial state; in ``unaware`` mode it holds label symbols and starts
    with the empty symbol.
    """

    def __init__(self, obs_window: int, task_window: int, mode: str = "aware", first: int = 0):
        self.mode = mode
        self.obs: deque[int] = deque(maxlen=obs_window)
        self.task: deque[int] = deque([first], maxlen=task_window)

    @property
    def full(self) -> bool:
        return len(self.obs) == self.obs.maxlen

    def push_obs(self, o: int) -> None:
        self.obs.append(o)

    def push_task(self, token: int) -> bool:
        if self.task[-1] == token:
            return False
        self.task.append(token)
        return True

    def obs_seq(self) -> tuple[int, ...]:
        return tuple(self.obs)

    def task_seq(self) -> tuple[int, ...]:
        return tuple(self.task)


def merge_task_streams(own: Sequence[int], other: Sequence[int], n_q: int) -> tuple[Token, ...]:
    """Concatenate two task streams into multi-hot tokens, aligned on the
    most recent entry; the other agent's states are offset by ``n_q``."""
    n = max(len(own), len(other))
    out = []
    for t in range(n):
        tok = []
        i = t - (n - len(own))
        if i >= 0:
            tok.append(own[i])
        i = t - (n - len(other))
        if i >= 0:
            tok.append(n_q + other[i])
        out.append(tuple(tok))
    return tuple(out)


class ReplayMemory:
    """Circular buffer with uniform sampling without replacement."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.items: list[Experience] = []
        self.pos = 0

    def __len__(self) -> int:
        return len(self.items)

    def push(self, e: Experience) -> None:
        if len(self.items) < self.capacity:
            self.items.append(e)
        else:
            self.items[self.pos] = e
        self.pos = (self.pos + 1) % self.capacity

    def sample_indices(self, m: int, gen: np.random.Generator) -> np.ndarray:
        if m > len(self.items):
            raise ValueError(f"cannot sample {m} from {len(self.items)} experiences")
        return gen.choice(len(self.items), size=m, replace=False)

    def sample(self, m: int, gen: np.random.Generator) -> list[Experience]:
        return [self.items[i] for i in self.sample_indices(m, gen)]
