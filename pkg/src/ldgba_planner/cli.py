"""Command-line entry point: ``ldgba-planner <command> ...``.

Commands: convert, validate, train, rollout, check, oracle, gradcheck.
Exit codes: 0 success or passing verdict, 1 failing verdict, 2 usage or
input error, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import automata, logic, product
from .agent import (
    METRICS_HEADER,
    ConfigError,
    Trace,
    TrainConfig,
    check_trace,
    marl_rollout,
    marl_run_training,
    policy_agreement,
    rollout,
    run_training,
    sma,
)
from .agent.dqn import Learner, task_vocab
from .hoa import HoaError, dump_hoa, load_hoa
from .neural import CheckpointError, grad_check, load_checkpoint, random_check_case, save_checkpoint
from .pomdp import Rng
from .translate import TASKS, FragmentError, task_automaton, translate
from .worlds import EnvFileError, GridError, PRESETS, build_grid, format_env, parse_env, preset, preset_spec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
MANIFEST_VERSION = 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- task and world sources


def _add_task_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--task", help=f"registry task ({', '.join(TASKS)})")
    p.add_argument("--formula", help="LTL formula text")
    p.add_argument("--atoms", help="comma separated atom names for --formula")
    p.add_argument("--hoa", help="automaton file in the HOA subset")


def _task_source(args) -> dict | None:
    given = [k for k in ("task", "formula", "hoa") if getattr(args, k, None)]
    if len(given) > 1:
        raise UsageError("give only one of --task, --formula, --hoa")
    if not given:
        return None
    if args.task:
        if args.task not in TASKS:
            raise UsageError(f"unknown task {args.task!r}; known: {', '.join(TASKS)}")
        return {"kind": "registry", "value": args.task}
    if args.formula:
        return {"kind": "formula", "value": args.formula, "atoms": args.atoms}
    return {"kind": "hoa", "value": str(args.hoa), "text": Path(args.hoa).read_text(encoding="utf-8")}


def _automaton(src: dict) -> automata.Ldgba:
    if src["kind"] == "registry":
        return task_automaton(src["value"])
    if src["kind"] == "formula":
        atoms = logic.AtomSet.parse(src["atoms"]) if src.get("atoms") else None
        return translate(logic.parse(src["value"], atoms), atoms)
    return load_hoa(src["text"])


def _formula_diagnostic(text: str, exc: logic.LtlSyntaxError) -> str:
    return f"{exc}\n  {text}\n  {' ' * exc.offset}^"


# ---------------------------------------------------------------- manifests


def _hash(*parts: str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode())
        h.update(b"\x00")
    return h.hexdigest()


def _config_from_args(args, base: dict) -> dict:
    """Precedence: flags > config file > preset defaults > seed env variable."""
    cfg = dict(base)
    if os.environ.get("LDGBA_PLANNER_SEED") and "seed" not in base:
        cfg["seed"] = int(os.environ["LDGBA_PLANNER_SEED"])
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update(data)
    flags = {
        "episodes": args.episodes,
        "steps": args.steps,
        "batch": args.batch,
        "sync": args.sync,
        "obs_window": args.obs_window,
        "task_window": args.task_window,
        "gamma": args.gamma,
        "alpha": args.alpha,
        "seed": args.seed,
        "mode": args.mode,
        "reward_mode": args.reward,
        "optimizer": args.optimizer,
        "net": args.net or args.baseline,
        "fit_interval": args.fit_interval,
        "value_scale": args.value_scale,
    }
    cfg.update({k: v for k, v in flags.items() if v is not None})
    if args.fit_every_step:
        cfg["fit_every_step"] = True
    return cfg


def build_manifest(args) -> dict:
    src = _task_source(args)
    if args.preset:
        if args.env:
            raise UsageError("give --preset or --env, not both")
        spec = preset_spec(args.preset)
        if src and src["kind"] != "registry":
            raise UsageError("presets take registry tasks only (--task)")
        pre = preset(args.preset, src["value"] if src else None)
        src = {"kind": "registry", "value": pre.task}
        base = pre.config.to_dict()
        if "seed" in base and os.environ.get("LDGBA_PLANNER_SEED"):
            base["seed"] = int(os.environ["LDGBA_PLANNER_SEED"])
        env = {"preset": args.preset, "path": None}
    elif args.env:
        spec = parse_env(Path(args.env).read_text(encoding="utf-8"))
        if src is None:
            raise UsageError("--env needs a task (--task, --formula or --hoa)")
        base = {}
        if src["kind"] == "registry":
            base["reward_mode"] = TASKS[src["value"]].reward_mode
        world = build_grid(spec)
        if world.fixed_starts:
            base["start"] = world.fixed_starts[0]
        env = {"preset": None, "path": str(args.env)}
    else:
        raise UsageError("give --preset or --env")
    cfg = TrainConfig.from_dict(_config_from_args(args, base)).checked()
    env_text = format_env(spec)
    hoa = dump_hoa(_automaton(src))
    agents = 2 if not isinstance(spec.start, str) and len(spec.start) == 2 else 1
    config = cfg.to_dict()
    return {
        "version": MANIFEST_VERSION,
        "config": config,
        "seed": cfg.seed,
        "mode": cfg.mode,
        "env": dict(env, text=env_text),
        "task": dict(src, hoa=hoa),
        "agents": agents,
        "hash": _hash(json.dumps(config, sort_keys=True), env_text, hoa),
    }


def _manifest_parts(man: dict):
    """Rebuild world, automaton, product and config from a manifest."""
    world = build_grid(parse_env(man["env"]["text"]))
    aut = load_hoa(man["task"]["hoa"])
    cfg = TrainConfig.from_dict(man["config"]).checked()
    p = product.Product(world.pomdp, aut, cfg.reward_mode, cfg.base_reward)
    return world, aut, cfg, p


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- commands


def cmd_convert(args) -> int:
    src = _task_source(args)
    if src is None:
        raise UsageError("give --formula (with --atoms) or --task")
    aut = _automaton(src)
    text = dump_hoa(aut, name=src["value"] if src["kind"] == "registry" else None)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    n_eps = sum(len(e) for e in aut.eps)
    print(f"states: {aut.n_states}  acceptance sets: {len(aut.accepting)}  epsilon edges: {n_eps}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    problems = []
    if args.env:
        spec = parse_env(Path(args.env).read_text(encoding="utf-8"))
        world = build_grid(spec)
        print(f"{args.env}: {spec.height}x{spec.width} grid, {world.pomdp.n_states} states, "
              f"{world.pomdp.n_observations} observations")
    if args.hoa:
        aut = load_hoa(Path(args.hoa).read_text(encoding="utf-8"))
        problems += automata.validate(aut)
        print(f"{args.hoa}: {aut.n_states} states, {len(aut.accepting)} acceptance sets")
    if not args.env and not args.hoa:
        raise UsageError("give --env and/or --hoa")
    for msg in problems:
        print(f"problem: {msg}")
    return EXIT_FAIL if problems else EXIT_OK


def _checkpoint_extra(man: dict) -> dict:
    return {"manifest": man}


def cmd_train(args) -> int:
    if args.manifest:
        man = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        if man.get("version") != MANIFEST_VERSION:
            raise UsageError("unsupported manifest version")
    else:
        man = build_manifest(args)
    world, aut, cfg, p = _manifest_parts(man)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "manifest.json", man)
    starts = world.starts
    with open(out / "metrics.csv", "w", encoding="utf-8", newline="") as fh:
        if man["agents"] == 2:
            fh.write("agent," + METRICS_HEADER + "\n")

            def on_pair(pair):
                for k, m in enumerate(pair):
                    fh.write(f"{k},{m.csv_row()}\n")

            res = marl_run_training(p, cfg, world.fixed_starts, on_episode=on_pair)
            rewards = [pair[0].acc_reward + pair[1].acc_reward for pair in res.metrics]
            for k, ln in enumerate(res.learners):
                save_checkpoint(ln.q_e, out / f"agent{k}.qnet", dict(_checkpoint_extra(man), agent=k))
        else:
            fh.write(METRICS_HEADER + "\n")
            res = run_training(p, cfg, starts, on_episode=lambda m: fh.write(m.csv_row() + "\n"))
            rewards = [m.acc_reward for m in res.metrics]
            save_checkpoint(res.net, out / "checkpoint.qnet", _checkpoint_extra(man))
    _write_sma(out / "sma.csv", rewards)
    tail = rewards[-min(len(rewards), 50):]
    print(f"trained {cfg.episodes} episodes x {cfg.steps} steps; manifest {man['hash'][:12]}; "
          f"final SMA-50 reward {np.mean(tail) if tail else float('nan'):.3f}")
    return EXIT_OK


def _write_sma(path: Path, rewards) -> None:
    s10, s50 = sma(rewards, 10), sma(rewards, 50)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("episode,raw,sma10,sma50\n")
        for i, r in enumerate(rewards):
            fh.write(f"{i},{float(r)!r},{float(s10[i])!r},{float(s50[i])!r}\n")


def _load_run(args):
    """Manifest and networks from --run DIR or --checkpoint FILE."""
    if args.run:
        run = Path(args.run)
        paths = sorted(run.glob("agent*.qnet")) or [run / "checkpoint.qnet"]
    elif args.checkpoint:
        paths = [Path(c) for c in args.checkpoint]
    else:
        raise UsageError("give --run or --checkpoint")
    nets, man = [], None
    for path in paths:
        net, extra = load_checkpoint(path)
        nets.append(net)
        man = man or extra.get("manifest")
    if man is None:
        raise CheckpointError("checkpoint carries no manifest")
    man = json.loads(json.dumps(man))
    if getattr(args, "preset", None) or getattr(args, "env", None):
        spec = preset_spec(args.preset) if args.preset else parse_env(Path(args.env).read_text(encoding="utf-8"))
        man["env"] = {"preset": args.preset, "path": args.env, "text": format_env(spec)}
    world, aut, cfg, p = _manifest_parts(man)
    for net in nets:
        want = (p.pomdp.n_observations, task_vocab(p, cfg.mode) * (2 if man["agents"] == 2 else 1), p.n_env_actions)
        if (net.n_obs, net.n_task, net.n_actions) != want:
            raise CheckpointError(
                f"checkpoint expects {net.n_obs} observations, {net.n_task} task tokens, {net.n_actions} actions; "
                f"environment and task give {want[0]}, {want[1]}, {want[2]}"
            )
    return man, nets, world, aut, cfg, p


def _single_rollout(job):
    man, net, i, seed, steps = job
    world, aut, cfg, p = _manifest_parts(man)
    trace = rollout(p, net, cfg, Rng(seed + i), steps=steps, starts=world.starts)
    return i, trace


def cmd_rollout(args) -> int:
    man, nets, world, aut, cfg, p = _load_run(args)
    seed = args.seed if args.seed is not None else int(os.environ.get("LDGBA_PLANNER_SEED", man["seed"]))
    steps = args.steps or cfg.steps
    out = Path(args.out)
    rmanifest = {"run": man["hash"], "seed": seed, "count": args.count, "steps": steps,
                 "env": man["env"]["preset"] or man["env"]["path"]}
    if man["agents"] == 2:
        return _marl_rollouts(args, man, nets, world, aut, cfg, p, seed, steps, out, rmanifest)
    jobs = [(man, nets[0], i, seed, steps) for i in range(args.count)]
    if args.jobs > 1 and args.count > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = sorted(ex.map(_single_rollout, jobs))
    else:
        results = [_single_rollout(j) for j in jobs]
    if args.count == 1:
        trace = results[0][1]
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(trace.to_jsonl(), encoding="utf-8")
        _write_json(out.with_suffix(".manifest.json"), rmanifest)
        _print_summary(trace, aut, world)
        return EXIT_OK
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "manifest.json", rmanifest)
    with open(out / "stats.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rollout", "seed", "start", "steps", "accepting_visits"]
                   + [f"F{k}" for k in range(len(aut.accepting))] + ["trap", "verdict"])
        visits, traps = [], 0
        for i, trace in results:
            (out / f"trace_{i:04d}.jsonl").write_text(trace.to_jsonl(), encoding="utf-8")
            v = check_trace(trace, aut)
            acc = trace.accepting_visits(p.accepting)
            visits.append(acc)
            traps += v.trap
            r, c = world.cell(trace.start.s)
            w.writerow([i, seed + i, f"{r},{c}", len(trace), acc] + v.set_counts + [int(v.trap), v.verdict])
    print(f"{args.count} rollouts: mean accepting visits {np.mean(visits):.2f}, trap rate {traps / args.count:.2f}")
    return EXIT_OK


def _marl_rollouts(args, man, nets, world, aut, cfg, p, seed, steps, out, rmanifest) -> int:
    learners = []
    for net in nets:
        ln = Learner.__new__(Learner)
        ln.cfg, ln.q_e, ln.q_t, ln.n_actions = cfg, net, net, net.n_actions
        learners.append(ln)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "manifest.json", rmanifest)
    total = 0
    with open(out / "stats.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rollout", "seed", "collisions", "visits_0", "visits_1", "trap_0", "trap_1"])
        for i in range(args.count):
            traces, coll = marl_rollout(p, learners, cfg, world.fixed_starts, Rng(seed + i), steps)
            total += coll
            for k, tr in enumerate(traces):
                (out / f"trace_{i:04d}_agent{k}.jsonl").write_text(tr.to_jsonl(), encoding="utf-8")
            vs = [check_trace(tr, aut) for tr in traces]
            w.writerow([i, seed + i, coll, *(tr.accepting_visits(p.accepting) for tr in traces), *(int(v.trap) for v in vs)])
    print(f"{args.count} joint rollouts: {total} co-occupancy events")
    return EXIT_OK


def _print_summary(trace: Trace, aut: automata.Ldgba, world) -> None:
    v = check_trace(trace, aut)
    for k, n in enumerate(v.set_counts):
        print(f"F{k}: {n} visits")
    print(f"trap: {'yes' if v.trap else 'no'}")
    for name, cells in v.phases:
        path = " ".join(f"({r},{c})" for r, c in (world.cell(s) for s in cells))
        print(f"phase {name}: {path}")


def cmd_check(args) -> int:
    src = _task_source(args)
    if src is None:
        raise UsageError("give --task, --formula (with --atoms) or --hoa")
    aut = _automaton(src)
    trace = Trace.from_jsonl(Path(args.trace).read_text(encoding="utf-8"))
    used = {n for st in trace.steps if st.label for n in st.label}
    extra = sorted(used - set(aut.atoms))
    if extra and not args.project:
        raise UsageError(f"alphabet mismatch: trace uses atoms {extra} unknown to the automaton "
                         f"(pass --project to ignore them)")
    v = check_trace(trace, aut, args.periodize)
    print(f"steps: {v.steps}")
    for k, n in enumerate(v.set_counts):
        print(f"F{k}: {n} visits")
    print(f"trap: {'yes' if v.trap else 'no'}")
    if v.lasso is not None:
        print(f"lasso: {'accepted' if v.lasso else 'rejected'}")
    print(f"verdict: {v.verdict}")
    return EXIT_OK if v.ok else EXIT_FAIL


def _fmt(x: float) -> str:
    return "" if not np.isfinite(x) else repr(float(x))


def cmd_oracle(args) -> int:
    src = _task_source(args)
    if args.preset:
        pre = preset(args.preset, src["value"] if src and src["kind"] == "registry" else None)
        world, aut, gamma, mode = pre.world, pre.automaton, pre.config.gamma, pre.config.reward_mode
        if src and src["kind"] != "registry":
            aut = _automaton(src)
    elif args.env:
        if src is None:
            raise UsageError("--env needs a task")
        world = build_grid(parse_env(Path(args.env).read_text(encoding="utf-8")))
        aut = _automaton(src)
        gamma = 0.98
        mode = TASKS[src["value"]].reward_mode if src["kind"] == "registry" else "base"
    else:
        raise UsageError("give --preset or --env")
    gamma = args.gamma if args.gamma is not None else gamma
    mode = args.reward or mode
    p = product.Product(world.pomdp, aut, mode)
    mdp = product.enumerate_explicit(p, args.bound)
    vi = product.value_iteration(mdp, gamma)
    print(f"product states: {mdp.n_states}  iterations: {vi.iterations}  bellman residual: {vi.residual:.3e}")
    names = list(world.pomdp.actions) + [f"eps:{aut.names[t]}" for t in range(aut.n_states)]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("s,q,cell,automaton_state,V," + ",".join(names) + "\n")
            for i in range(mdp.n_states):
                x = mdp.state(i)
                r, c = world.cell(x.s)
                fh.write(f"{x.s},{x.q},{r}:{c},{aut.names[x.q]},{_fmt(vi.V[i])},"
                         + ",".join(_fmt(v) for v in vi.Q[i]) + "\n")
    if args.mdp_out:
        with open(args.mdp_out, "w", encoding="utf-8", newline="") as fh:
            fh.write("s,q,action,s2,q2,prob,reward\n")
            for a, P in enumerate(mdp.P):
                coo = P.tocoo()
                for i, j, pr in sorted(zip(coo.row, coo.col, coo.data)):
                    x, y = mdp.state(int(i)), mdp.state(int(j))
                    fh.write(f"{x.s},{x.q},{names[a]},{y.s},{y.q},{float(pr)!r},{float(mdp.R[i, a])!r}\n")
    if args.checkpoint:
        net, _ = load_checkpoint(args.checkpoint)
        ag = policy_agreement(p, mdp, vi, net, world.starts, args.tol)
        print(f"agreement: {ag.agree}/{ag.total} = {ag.fraction:.4f}  mean Q-gap: {ag.mean_gap:.4f}")
    return EXIT_OK


def _seed_list(text: str | None, configs: int) -> list[int]:
    if text is None:
        return list(range(configs))
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",")]


def cmd_gradcheck(args) -> int:
    ok = True
    for seed in _seed_list(args.seed, args.configs):
        report = grad_check(*random_check_case(seed), tol=args.tol)
        print(f"seed {seed}: {report}")
        ok = ok and report.passed
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldgba-planner", description="LTL motion planning on labelled POMDPs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="translate a formula or registry task to HOA")
    _add_task_args(p)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("validate", help="check an environment file or HOA automaton")
    p.add_argument("--env", help="environment file")
    p.add_argument("--hoa", help="HOA file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("train", help="train a Q-network on a product process")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--env", help="environment file")
    _add_task_args(p)
    p.add_argument("--manifest", help="re-run exactly the run described by a manifest")
    p.add_argument("--config", help="JSON file of configuration keys")
    p.add_argument("--out", required=True, help="output directory")
    for flag, typ in (("episodes", int), ("steps", int), ("batch", int), ("sync", int), ("obs-window", int),
                      ("task-window", int), ("gamma", float), ("alpha", float), ("seed", int),
                      ("fit-interval", int), ("value-scale", float)):
        p.add_argument(f"--{flag}", type=typ)
    p.add_argument("--mode", choices=("aware", "unaware"))
    p.add_argument("--reward", choices=("base", "redesigned"))
    p.add_argument("--optimizer", choices=("sgd", "adam"))
    p.add_argument("--net", choices=("lstm", "dense", "tabular"))
    p.add_argument("--baseline", choices=("dense",), help="train the fixed-window dense baseline")
    p.add_argument("--fit-every-step", action="store_true", help="fit after every step instead of every M steps")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("rollout", help="greedy rollouts of a trained network")
    p.add_argument("--run", help="training output directory")
    p.add_argument("--checkpoint", nargs="+", help="checkpoint file(s)")
    p.add_argument("--preset", choices=sorted(PRESETS), help="override the environment")
    p.add_argument("--env", help="override the environment with a file")
    p.add_argument("--count", type=int, default=1, help="number of rollouts (batch mode when > 1)")
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for batch mode")
    p.add_argument("--out", required=True, help="trace file, or directory in batch mode")
    p.set_defaults(func=cmd_rollout)

    p = sub.add_parser("check", help="model-check a recorded trace")
    p.add_argument("--trace", required=True)
    _add_task_args(p)
    p.add_argument("--periodize", type=int, help="treat the last N labels as the repeated cycle")
    p.add_argument("--project", action="store_true", help="drop trace atoms the automaton does not use")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", help="value iteration on the explicit product")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--env", help="environment file")
    _add_task_args(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--reward", choices=("base", "redesigned"))
    p.add_argument("--bound", type=int, default=50_000, help="maximum number of product states")
    p.add_argument("--out", help="Q-table CSV")
    p.add_argument("--mdp-out", help="explicit transition CSV")
    p.add_argument("--checkpoint", help="compare this window-1 network's greedy policy")
    p.add_argument("--tol", type=float, default=1e-6, help="near-optimality tolerance for agreement")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gradcheck", help="finite-difference check of network gradients")
    p.add_argument("--seed", help="seed, list a,b or range lo..hi (default: 0..configs-1)")
    p.add_argument("--configs", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_gradcheck)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except logic.LtlSyntaxError as exc:
        text = getattr(args, "formula", None) or ""
        print(f"error: {_formula_diagnostic(text, exc)}", file=sys.stderr)
    except (UsageError, ConfigError, FragmentError, HoaError, EnvFileError, GridError, CheckpointError,
            product.BoundExceeded, logic.UnknownAtomError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (AssertionError, product.UnavailableActionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
