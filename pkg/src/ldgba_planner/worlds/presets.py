"""Named environments with their task automaton and training configuration.

The label and obstacle coordinates in the shipped ``envs/*.env`` files are a
figure-derived layout; nothing downstream depends on exact positions.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import NamedTuple

from ..agent.config import TrainConfig
from ..automata import Ldgba
from ..pomdp import PlPomdp
from ..translate import TASKS, task_automaton
from .envfile import GridSpec, parse_env
from .grid import World, build_grid

_SCALE_GRID = dict(episodes=15_000, steps=600, obs_window=5, task_window=3, batch=32, sync=50, gamma=0.98)

PRESETS: dict[str, tuple[str, dict]] = {
    "go_to_goal_10x10": ("go_to_goal", dict(episodes=1000, steps=500, obs_window=5, task_window=3, batch=32, sync=50, gamma=0.98, start=0)),
    "grid_phi1": ("grid_phi1", dict(_SCALE_GRID)),
    "grid_phi2_static": ("grid_phi2", dict(_SCALE_GRID)),
    "grid_phi2_dynamic": ("grid_phi2", dict(_SCALE_GRID)),
    "office_full_obs": ("office_task1", dict(_SCALE_GRID, episodes=10_000, steps=300, start=0)),
    "office_single_obs": ("office_task1", dict(_SCALE_GRID, episodes=10_000, steps=300, start=0)),
    "warehouse_2agent": ("warehouse_phi", dict(_SCALE_GRID, episodes=30_000, steps=300, start=0)),
}

# shared learning settings for every preset (not taken from the task descriptions)
_LEARNING = dict(optimizer="adam", alpha=1e-3)


class Preset(NamedTuple):
    pomdp: PlPomdp
    automaton: Ldgba
    config: TrainConfig
    world: World
    task: str


class UnknownPresetError(KeyError):
    pass


def env_path(name: str) -> Path:
    return Path(str(resources.files("ldgba_planner") / "envs" / f"{name}.env"))


def preset_spec(name: str) -> GridSpec:
    if name not in PRESETS:
        raise UnknownPresetError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    return parse_env(env_path(name).read_text(encoding="utf-8"))


def preset(name: str, task: str | None = None) -> Preset:
    spec = preset_spec(name)
    default_task, overrides = PRESETS[name]
    task = task or default_task
    world = build_grid(spec)
    cfg = dict(_LEARNING, **overrides, reward_mode=TASKS[task].reward_mode)
    if "start" in cfg:
        cfg["start"] = world.fixed_starts[0]
    if name == "office_full_obs" or name == "office_single_obs":
        if task == "office_task2":
            cfg["start"] = world.state((3, 1))
    return Preset(world.pomdp, task_automaton(task), TrainConfig(**cfg), world, task)
