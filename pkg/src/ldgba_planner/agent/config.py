"""Training configuration."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 1000
    steps: int = 200
    batch: int = 32  # M
    sync: int = 50  # K
    obs_window: int = 5  # j + 1
    task_window: int = 3  # k
    gamma: float = 0.98
    alpha: float = 1e-3
    alpha_end: float | None = None  # linear learning-rate decay over all episodes
    optimizer: str = "sgd"
    grad_clip: float | None = None
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay: float = 0.6  # fraction of episodes over which epsilon decays
    reward_mode: str = "base"
    base_reward: float = 10.0
    value_scale: float = 1.0  # networks fit Q / value_scale
    eps_policy: str = "per_step"  # or "trigger"
    p_eps: float = 0.05
    mode: str = "aware"  # or "unaware"
    net: str = "lstm"  # lstm | dense | tabular
    obs_hidden: int = 32
    task_hidden: int = 16
    dense: int = 16
    replay_capacity: int = 100_000
    fit_every_step: bool = False
    fit_interval: int | None = None  # fit every this many steps (default M)
    start: str | int = "uniform"
    seed: int = 0

    def validate(self) -> list[str]:
        out = []
        for name in ("episodes", "steps", "batch", "sync", "obs_window", "task_window", "replay_capacity"):
            if getattr(self, name) < (0 if name in ("episodes", "steps") else 1):
                out.append(f"{name} must be positive")
        if not 0.0 <= self.gamma < 1.0:
            out.append("gamma must lie in [0, 1)")
        if self.alpha <= 0 or (self.alpha_end is not None and self.alpha_end <= 0):
            out.append("alpha must be positive")
        if self.fit_interval is not None and self.fit_interval < 1:
            out.append("fit_interval must be positive")
        if self.value_scale <= 0:
            out.append("value_scale must be positive")
        if self.steps > 0 and self.sync > self.steps:
            out.append("sync exceeds steps per episode: the target network would never be updated")
        if self.batch > self.replay_capacity:
            out.append("batch larger than replay capacity")
        for name in ("eps_start", "eps_end", "p_eps"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                out.append(f"{name} must lie in [0, 1]")
        if not 0.0 < self.eps_decay <= 1.0:
            out.append("eps_decay must lie in (0, 1]")
        choices = {
            "optimizer": ("sgd", "adam"),
            "reward_mode": ("base", "redesigned"),
            "eps_policy": ("per_step", "trigger"),
            "mode": ("aware", "unaware"),
            "net": ("lstm", "dense", "tabular"),
        }
        for name, allowed in choices.items():
            if getattr(self, name) not in allowed:
                out.append(f"{name} must be one of {allowed}")
        if self.net == "tabular" and (self.obs_window != 1 or self.task_window != 1):
            out.append("tabular net needs obs_window = task_window = 1")
        if isinstance(self.start, str) and self.start != "uniform":
            out.append("start must be 'uniform' or a state index")
        return out

    def checked(self) -> "TrainConfig":
        problems = self.validate()
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def epsilon(self, episode: int) -> float:
        span = max(1.0, self.eps_decay * self.episodes)
        frac = min(1.0, episode / span)
        return self.eps_start + frac * (self.eps_end - self.eps_start)

    def fits_at(self, i: int) -> bool:
        """Whether the evaluation network is fitted after step ``i`` of an episode."""
        if i == 0:
            return False
        if self.fit_every_step:
            return True
        return i % (self.fit_interval or self.batch) == 0

    def learning_rate(self, episode: int) -> float:
        if self.alpha_end is None:
            return self.alpha
        frac = episode / max(1, self.episodes - 1)
        return self.alpha + frac * (self.alpha_end - self.alpha)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def with_(self, **kw) -> "TrainConfig":
        return replace(self, **kw)
