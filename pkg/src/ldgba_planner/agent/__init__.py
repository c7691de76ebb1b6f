"""Recurrent deep Q-learning agents for product processes."""
from .baselines import Agreement, oracle_policy, policy_agreement, policy_rollout, random_policy, start_pool
from .check import Verdict, check_trace, completed_cycles
from .config import ConfigError, TrainConfig
from .dqn import (
    METRICS_HEADER,
    EpisodeMetrics,
    EpsilonMoves,
    Learner,
    Trace,
    TraceStep,
    TrainResult,
    observe_transition,
    rollout,
    run_training,
    select_action,
    sma,
)
from .marl import MarlResult, joint_step, marl_rollout, marl_run_training, resolve_moves
from .memory import Experience, HistoryWindows, ReplayMemory, merge_task_streams

__all__ = [
    "METRICS_HEADER",
    "Agreement",
    "ConfigError",
    "EpisodeMetrics",
    "EpsilonMoves",
    "Experience",
    "HistoryWindows",
    "Learner",
    "MarlResult",
    "ReplayMemory",
    "Trace",
    "TraceStep",
    "TrainConfig",
    "TrainResult",
    "Verdict",
    "check_trace",
    "completed_cycles",
    "joint_step",
    "marl_rollout",
    "marl_run_training",
    "merge_task_streams",
    "observe_transition",
    "oracle_policy",
    "policy_agreement",
    "policy_rollout",
    "random_policy",
    "resolve_moves",
    "rollout",
    "run_training",
    "select_action",
    "sma",
    "start_pool",
]
