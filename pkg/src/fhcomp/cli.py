"""Operator command line: train / eval / sweep / oracle.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import agent as agent_mod
from . import oracle as oracle_mod
from . import qnet
from .backend import backend_name
from .env import reference_policy
from .runconfig import ConfigError, RunConfig

TRAIN_LOG_SCHEMA = "# schema: fhcomp.train_log.v1"
KPI_SCHEMA = "# schema: fhcomp.kpi.v1"
HIST_SCHEMA = "# schema: fhcomp.config_hist.v1"
SWEEP_SCHEMA = "# schema: fhcomp.sweep.v1"


def _fmt(x) -> str:
    return repr(float(x))


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    cfg.apply_overrides(args.set, seed=args.seed)
    return cfg


def _add_common(parser):
    parser.add_argument("--config", help="config file (INI) or run manifest (JSON)")
    parser.add_argument("--out-dir", default="runs/out", help="output directory")
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                        help="config override, repeatable")


def write_train_log(path, log, k_cells):
    with open(path, "w") as fh:
        fh.write(TRAIN_LOG_SCHEMA + "\n")
        cols = ["step", "reward", "loss", "temperature", "beta_per",
                "cell_sum_util", "max_latency_us", "violation"]
        for c in range(k_cells):
            cols += [f"q_{c}", f"b_{c}", f"r_{c}"]
        fh.write(",".join(cols) + "\n")
        for row in log:
            vals = [str(row.step), _fmt(row.reward), _fmt(row.loss),
                    _fmt(row.temperature), _fmt(row.beta_per),
                    _fmt(row.cell_sum_util), _fmt(row.max_latency_us),
                    str(row.violation)]
            for cfg in row.configs:
                vals += [str(v) for v in cfg]
            fh.write(",".join(vals) + "\n")


def write_kpi(path, infos, k_cells):
    with open(path, "w") as fh:
        fh.write(KPI_SCHEMA + "\n")
        cols = ["step", "cell_sum_util", "max_latency_us", "violation_slots",
                "n_slots", "delivered_payload_bits"]
        for c in range(k_cells):
            cols += [f"q_{c}", f"b_{c}", f"r_{c}"]
        fh.write(",".join(cols) + "\n")
        for info in infos:
            vals = [str(info.step), _fmt(info.cell_sum_util),
                    _fmt(info.max_latency_s * 1e6), str(info.violation_slots),
                    str(info.n_slots), str(info.delivered_payload_bits)]
            for cfg in info.configs:
                vals += [str(v) for v in cfg]
            fh.write(",".join(vals) + "\n")


def write_config_hist(path, infos):
    """Heat-map data: per step, per parameter value, how many cells use it."""
    with open(path, "w") as fh:
        fh.write(HIST_SCHEMA + "\n")
        fh.write("step,parameter,value,cell_count\n")
        for info in infos:
            counts = {}
            for q, b, r in info.configs:
                for param, val in (("q", q), ("b_w", b), ("r_w", r)):
                    counts[(param, val)] = counts.get((param, val), 0) + 1
            for (param, val), n in sorted(counts.items()):
                fh.write(f"{info.step},{param},{val},{n}\n")


def summarize(infos) -> dict:
    n_slots = sum(i.n_slots for i in infos)
    viol = sum(i.violation_slots for i in infos)
    return {
        "n_steps": len(infos),
        "n_slots": n_slots,
        "mean_cell_sum_util": (float(np.mean([i.cell_sum_util for i in infos]))
                               if infos else 0.0),
        "violation_freq": (viol / n_slots) if n_slots else 0.0,
        "mean_delivered_payload_bits": (float(np.mean(
            [i.delivered_payload_bits for i in infos])) if infos else 0.0),
        "final_configs": [list(c) for c in infos[-1].configs] if infos else [],
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_train(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg.save_manifest(out / "manifest.json")
    env = cfg.env(training=True)
    tc = cfg.train_config()

    ckpt_every = args.checkpoint_every
    meta = {"backend": backend_name(), "config": cfg.manifest_dict()["config"]}

    def cb(step, net, target):
        if ckpt_every and (step + 1) % ckpt_every == 0:
            qnet.save_checkpoint(out / f"checkpoint_{step + 1:06d}.json",
                                 net, target, meta)

    result = agent_mod.train(env, tc, checkpoint_cb=cb)
    write_train_log(out / "train_log.csv", result.log, env.sys.k_cells)
    qnet.save_checkpoint(out / "checkpoint_final.json", result.net,
                         result.target_net, meta)
    tail = result.log[-min(50, len(result.log)):]
    print(f"trained {len(result.log)} steps; "
          f"final-50 mean cell-sum util "
          f"{np.mean([r.cell_sum_util for r in tail]):.4f}; "
          f"outputs in {out}")
    return 0


def _eval_rollout(cfg: RunConfig, policy, n_steps, reset_configs=None):
    env = cfg.env()
    s = env.reset(configs=reset_configs)
    infos = []
    for _ in range(n_steps):
        s, _, info = env.step(policy(s))
        infos.append(info)
    return env, infos


def cmd_eval(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    steps_per_episode = cfg.get("train", "episode_len")
    n_steps = args.episodes * steps_per_episode

    if args.policy == "reference":
        ref = reference_policy(cfg.system(), cfg.space())
        k = cfg.get("system", "k_cells")
        policy = lambda s: 0  # NOOP; configuration is static
        reset_configs = [ref] * k
    else:
        if not args.checkpoint:
            print("error: eval needs --checkpoint or --policy reference",
                  file=sys.stderr)
            return 2
        net, _, _ = qnet.load_checkpoint(args.checkpoint)
        env_probe = cfg.env()
        if net.spec.input_dim != env_probe.obs_dim or \
                net.spec.output_dim != env_probe.n_actions:
            raise RuntimeError(
                f"checkpoint architecture ({net.spec.input_dim}->"
                f"{net.spec.output_dim}) does not match environment "
                f"({env_probe.obs_dim}->{env_probe.n_actions})")
        policy = agent_mod.greedy_policy(net)
        reset_configs = None

    infos = []
    if n_steps > 0:
        _, infos = _eval_rollout(cfg, policy, n_steps, reset_configs)
    k_cells = cfg.get("system", "k_cells")
    write_kpi(out / "kpi.csv", infos, k_cells)
    write_config_hist(out / "config_hist.csv", infos)
    summary = summarize(infos)
    summary["delta_target"] = cfg.get("reward", "delta")
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(json.dumps(summary))
    return 0


def sweep_point(cfg: RunConfig, mean_prb: float, eval_steps: int,
                burn_in: int = 100):
    """Train at one load, then evaluate DRL and reference policies."""
    point = RunConfig(cfg.values)
    point.set("traffic", "mean_prb", mean_prb)
    env = point.env(training=True)
    result = agent_mod.train(env, point.train_config())
    _, infos_drl = _eval_rollout(point, agent_mod.greedy_policy(result.net),
                                 eval_steps)
    ref = reference_policy(point.system(), point.space())
    k = point.get("system", "k_cells")
    _, infos_ref = _eval_rollout(point, lambda s: 0, eval_steps,
                                 reset_configs=[ref] * k)
    tail_drl = infos_drl[burn_in:] if len(infos_drl) > burn_in else infos_drl
    util_drl = float(np.mean([i.cell_sum_util for i in tail_drl]))
    util_ref = float(np.mean([i.cell_sum_util for i in infos_ref]))
    viol = (sum(i.violation_slots for i in infos_drl)
            / max(1, sum(i.n_slots for i in infos_drl)))
    gain = (util_drl - util_ref) / util_ref * 100.0
    return {"mean_prb": mean_prb, "util_drlfc": util_drl,
            "util_ref": util_ref, "gain_percent": gain,
            "violation_freq_drlfc": viol, "result": result}


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg.save_manifest(out / "manifest.json")
    loads = [float(v) for v in args.loads.split(",") if v.strip()]
    rows = []
    for mean_prb in loads:
        row = sweep_point(cfg, mean_prb, args.eval_steps)
        rows.append(row)
        print(f"mean_prb={mean_prb:g} util_drlfc={row['util_drlfc']:.4f} "
              f"util_ref={row['util_ref']:.4f} gain={row['gain_percent']:.1f}% "
              f"viol={row['violation_freq_drlfc']:.2e}")
    with open(out / "sweep.csv", "w") as fh:
        fh.write(SWEEP_SCHEMA + "\n")
        fh.write("mean_prb,util_drlfc,util_ref,gain_percent,violation_freq_drlfc\n")
        for row in rows:
            fh.write(",".join([
                _fmt(row["mean_prb"]), _fmt(row["util_drlfc"]),
                _fmt(row["util_ref"]), _fmt(row["gain_percent"]),
                _fmt(row["violation_freq_drlfc"])]) + "\n")
    return 0


def cmd_oracle(args) -> int:
    cfg = _load_config(args)
    sys_cfg = cfg.system()
    space = cfg.space()
    n_prb = args.n_prb if args.n_prb is not None else sys_cfg.n_prb_max
    kwargs = {}
    if args.mode == "latency":
        kwargs = {"latency_cfg": cfg.latency(),
                  "tau_max_s": cfg.get("reward", "tau_max_s")}
    res = oracle_mod.best_static_config(sys_cfg, n_prb, args.mode, space,
                                        **kwargs)
    print(f"n_prb={n_prb} mode={args.mode}")
    print(f"best config: q={res.config.q} b_w={res.config.b_w} "
          f"r_w={res.config.r_w}")
    print(f"aggregate rate: {res.aggregate_rate_bps / 1e9:.6f} Gb/s")
    print(f"cell-sum utilization: {res.cell_sum_util:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fhcomp",
        description="Fronthaul compression control simulator and DDQN trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the DDQN agent")
    _add_common(p)
    p.add_argument("--checkpoint-every", type=int, default=0,
                   help="write a checkpoint every N steps (0: final only)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint or the reference scheme")
    _add_common(p)
    p.add_argument("--checkpoint", help="checkpoint JSON from train")
    p.add_argument("--policy", choices=["greedy", "reference"],
                   default="greedy")
    p.add_argument("--episodes", type=int, default=5)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="train+evaluate across mean PRB loads")
    _add_common(p)
    p.add_argument("--loads", default="50,100,175,225,273",
                   help="comma-separated mean PRB values")
    p.add_argument("--eval-steps", type=int, default=1000,
                   help="greedy evaluation decision steps per load")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="print the best static configuration")
    _add_common(p)
    p.add_argument("--n-prb", type=int, default=None)
    p.add_argument("--mode", choices=["capacity", "latency"],
                   default="capacity")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
