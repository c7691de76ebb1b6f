import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ldgba_planner.agent import (
    ConfigError,
    EpsilonMoves,
    Experience,
    HistoryWindows,
    ReplayMemory,
    Trace,
    TraceStep,
    TrainConfig,
    check_trace,
    completed_cycles,
    joint_step,
    merge_task_streams,
    resolve_moves,
    rollout,
    run_training,
    sma,
)
from ldgba_planner.logic import parse
from ldgba_planner.pomdp import Rng
from ldgba_planner.product import EpsAction, Product, ProductState
from ldgba_planner.translate import task_automaton
from ldgba_planner.worlds import preset

PHI1 = task_automaton("grid_phi1")


class TestConfig:
    def test_defaults_valid(self):
        assert TrainConfig().validate() == []

    @pytest.mark.parametrize(
        "kw",
        [dict(gamma=1.0), dict(alpha=0.0), dict(alpha_end=-1.0), dict(batch=0), dict(mode="x"),
         dict(net="tabular"), dict(value_scale=0.0), dict(eps_decay=0.0), dict(start="corner"),
         dict(steps=100, sync=101), dict(fit_interval=0)],
    )
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            TrainConfig(**kw).checked()

    def test_epsilon_schedule(self):
        cfg = TrainConfig(episodes=100, eps_start=1.0, eps_end=0.1, eps_decay=0.5)
        assert cfg.epsilon(0) == 1.0
        assert cfg.epsilon(25) == pytest.approx(0.55)
        assert cfg.epsilon(50) == pytest.approx(0.1) and cfg.epsilon(99) == pytest.approx(0.1)

    def test_learning_rate(self):
        assert TrainConfig(alpha=0.5).learning_rate(7) == 0.5
        cfg = TrainConfig(episodes=11, alpha=1.0, alpha_end=0.5)
        assert cfg.learning_rate(0) == 1.0 and cfg.learning_rate(10) == pytest.approx(0.5)

    def test_fit_cadence(self):
        assert [i for i in range(10) if TrainConfig(batch=4).fits_at(i)] == [4, 8]
        assert [i for i in range(5) if TrainConfig(fit_interval=2).fits_at(i)] == [2, 4]
        assert [i for i in range(3) if TrainConfig(fit_every_step=True).fits_at(i)] == [1, 2]

    def test_dict_round_trip(self):
        cfg = TrainConfig(episodes=3, mode="unaware")
        assert TrainConfig.from_dict(cfg.to_dict()) == cfg
        with pytest.raises(ConfigError):
            TrainConfig.from_dict({"episodez": 1})


class TestWindows:
    def test_task_window_records_changes_only(self):
        w = HistoryWindows(2, 3, "aware", 0)
        for q in [0, 0, 1, 1, 2, 2, 4]:
            w.push_task(q)
        assert w.task_seq() == (1, 2, 4)

    def test_observation_window(self):
        w = HistoryWindows(3, 2)
        for o in [5, 6]:
            w.push_obs(o)
        assert not w.full
        w.push_obs(7)
        w.push_obs(8)
        assert w.full and w.obs_seq() == (6, 7, 8)

    def test_unaware_starts_with_empty_symbol(self):
        assert HistoryWindows(1, 3, "unaware", 0).task_seq() == (0,)

    def test_merge(self):
        assert merge_task_streams((0, 1), (2,), 5) == ((0,), (1, 7))
        assert merge_task_streams((3,), (0, 1), 5) == ((5,), (3, 6))


class TestReplay:
    def test_capacity_and_overwrite(self):
        mem = ReplayMemory(3)
        for r in range(5):
            mem.push(Experience((0,), (0,), 0, float(r), (0,), (0,)))
        assert len(mem) == 3
        assert sorted(e.reward for e in mem.items) == [2.0, 3.0, 4.0]

    def test_sampling_without_replacement(self):
        mem = ReplayMemory(10)
        for r in range(10):
            mem.push(Experience((0,), (0,), 0, float(r), (0,), (0,)))
        idx = mem.sample_indices(10, np.random.default_rng(0))
        assert sorted(idx.tolist()) == list(range(10))
        with pytest.raises(ValueError):
            mem.sample(11, np.random.default_rng(0))


class TestEpsilonMoves:
    def test_at_most_one_per_episode(self):
        pre = preset("grid_phi1")
        p = Product(pre.pomdp, pre.automaton)
        cfg = pre.config.with_(p_eps=1.0)
        moves = EpsilonMoves(cfg, np.random.default_rng(0))
        moves.reset()
        x = ProductState(pre.world.starts[0], 0)
        e = moves.choose(p, x, 0)
        assert isinstance(e, EpsAction) and e.target in (1, 2)
        moves.used = True
        assert moves.choose(p, x, 1) is None

    def test_trigger_policy(self):
        pre = preset("grid_phi1")
        p = Product(pre.pomdp, pre.automaton)
        cfg = pre.config.with_(eps_policy="trigger", steps=10)
        moves = EpsilonMoves(cfg, np.random.default_rng(1))
        moves.reset()
        x = ProductState(pre.world.starts[0], 0)
        fired = [i for i in range(10) if moves.choose(p, x, i) is not None]
        assert fired and fired[0] == moves.trigger


def small_run(**kw):
    pre = preset("grid_phi1")
    p = Product(pre.pomdp, pre.automaton)
    cfg = pre.config.with_(episodes=3, steps=40, batch=8, sync=10, obs_hidden=4, task_hidden=3, dense=4, **kw)
    return p, pre, cfg, run_training(p, cfg, pre.world.starts)


class TestTraining:
    def test_deterministic_given_seed(self):
        _, _, _, a = small_run(seed=5)
        _, _, _, b = small_run(seed=5)
        assert [m.csv_row() for m in a.metrics] == [m.csv_row() for m in b.metrics]
        for k in a.net.params:
            assert np.array_equal(a.net.params[k], b.net.params[k])

    def test_unaware_mode_runs(self):
        p, _, _, res = small_run(mode="unaware")
        assert res.net.n_task == p.automaton.n_symbols

    def test_rollout_trace_round_trip(self):
        p, pre, cfg, res = small_run()
        tr = rollout(p, res.net, cfg, Rng(3), starts=pre.world.starts, steps=30)
        assert len(tr) == 30
        again = Trace.from_jsonl(tr.to_jsonl())
        assert again.steps == tr.steps
        assert again.cells() == tr.cells()
        for a, b in zip(tr.steps, tr.steps[1:]):
            assert (b.s, b.q) == (a.next_s, a.next_q)

    def test_sma(self):
        assert sma([1, 2, 3, 4], 2).tolist() == [1.0, 1.5, 2.5, 3.5]


def trace_of(labels, aut=PHI1, eps=None):
    """Build a trace over labels, optionally starting with an epsilon move to state ``eps``."""
    steps, q = [], aut.initial
    if eps is not None:
        steps.append(TraceStep(0, q, f"eps:{aut.names[eps]}", None, None, 0.0, 0, eps, True))
        q = eps
    for k, lab in enumerate(labels):
        q2 = sorted(aut.delta[q][aut.atoms.symbol(lab)])[0]
        steps.append(TraceStep(k, q, "up", 0, tuple(lab), 0.0, k + 1, q2, False))
        q = q2
    return Trace(steps, ProductState(0, aut.initial))


class TestCheck:
    def test_trap(self):
        assert check_trace(trace_of([(), ("c",)]), PHI1).verdict == "trap"

    def test_visits_and_periodize(self):
        accepting = next(t for t in sorted(PHI1.eps[PHI1.initial]) if any(t in f or any(
            u in f for u in PHI1.delta[t][PHI1.atoms.symbol(["a"])]) for f in PHI1.accepting))
        v = check_trace(trace_of([("a",), ("a",), ("a",)], eps=accepting), PHI1, periodize=1)
        assert v.ok and v.lasso is True
        assert v.set_counts[0] >= 1

    def test_formula_spec(self):
        v = check_trace(trace_of([()]), parse("F a", ["a", "b", "c"]))
        assert v.verdict == "rejected"

    def test_empty(self):
        assert check_trace(Trace([], None), PHI1).verdict == "insufficient"

    def test_completed_cycles(self):
        aut = task_automaton("warehouse_phi")
        labels = [("a",), (), ("b",), ("a",), ("b",), ()]
        assert completed_cycles(trace_of(labels, aut), aut) == 2


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_resolve_moves_never_co_occupies(s0, s1, n0, n1):
    if s0 == s1:
        return
    f0, f1 = resolve_moves([s0, s1], [n0, n1])
    assert f0 != f1
    assert f0 in (s0, n0) and f1 in (s1, n1)
    assert not (f0 == s1 and f1 == s0)


def test_joint_step_keeps_agents_apart():
    pre = preset("warehouse_2agent")
    p = Product(pre.pomdp, pre.automaton)
    rng = Rng(0)
    xs = [p.initial_state(s) for s in pre.world.fixed_starts[:2]]
    gen = np.random.default_rng(0)
    for _ in range(2000):
        acts = [int(gen.integers(5)), int(gen.integers(5))]
        steps = joint_step(p, xs, acts, rng)
        xs = [s.next for s in steps]
        assert xs[0].s != xs[1].s
