"""Command-line interface.

Subcommands:

* ``run``       one seeded simulation -> run_result.json + run.png
* ``sweep``     replicated sweep over sharing probabilities -> sweep.csv + sweep.png
* ``baseline``  centralized single-node reference -> baseline.json + baseline.png
* ``bench``     learner scaling study -> bench.csv + bench.png
* ``epidemic``  closed form vs numerical diffusion table -> stdout (+ files with --out)

Exit codes: 0 success, 2 invalid configuration, 3 missing dataset file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import plots
from .bench import run_bench, write_bench_csv
from .datasets import DatasetError, load_dataset, load_stand_in
from .epidemic import SiParams, si_closed_form, si_numeric
from .experiment import Experiment, load_experiment
from .gossip import write_trace_csv
from .simnet import (
    ConfigError,
    run_centralized,
    run_simulation,
    sweep_t,
    write_sweep_csv,
)

__all__ = ["main"]


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ilvqsim",
        description="Decentralised prototype-sharing learning simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        p.add_argument(
            "--config", required=config_required, help="experiment JSON file"
        )
        p.add_argument("--seed", type=int, default=None, help="override the seed")
        p.add_argument(
            "--out",
            default=None,
            help="output directory (default: the experiment's out_dir, else .)",
        )

    p_run = sub.add_parser("run", help="execute one simulation")
    add_common(p_run)
    p_run.add_argument(
        "--trace", action="store_true", help="also write the message trace CSV"
    )
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="replicated sweep over t values")
    add_common(p_sweep)
    p_sweep.add_argument(
        "--replications", type=int, default=None, help="override replications"
    )
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sweep.set_defaults(func=cmd_sweep)

    p_base = sub.add_parser("baseline", help="centralized reference run")
    add_common(p_base)
    p_base.set_defaults(func=cmd_baseline)

    p_bench = sub.add_parser("bench", help="learner scaling study")
    p_bench.add_argument("--features", type=_int_list, default=[5, 10, 20, 40])
    p_bench.add_argument("--classes", type=_int_list, default=[2, 4, 8])
    p_bench.add_argument("--samples", type=int, default=2000)
    p_bench.add_argument("--runs", type=int, default=5)
    p_bench.add_argument("--separation", type=float, default=3.0)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", default=".")
    p_bench.set_defaults(func=cmd_bench)

    p_epi = sub.add_parser("epidemic", help="diffusion closed form vs RK4")
    p_epi.add_argument("--beta", type=float, default=1.0)
    p_epi.add_argument("--n-prime", type=int, default=None, help="population size")
    p_epi.add_argument("--x0", type=float, default=None, help="initial fraction")
    p_epi.add_argument("--t-max", type=float, default=10.0)
    p_epi.add_argument("--points", type=int, default=21)
    p_epi.add_argument("--dt", type=float, default=1e-3)
    p_epi.add_argument("--out", default=None)
    p_epi.set_defaults(func=cmd_epidemic)

    return parser


def _prepare(args) -> tuple[Experiment, list, Path]:
    experiment = load_experiment(args.config).with_overrides(
        seed=args.seed, replications=getattr(args, "replications", None)
    )
    if experiment.dataset_spec is None:
        dataset = load_stand_in()
    else:
        dataset = load_dataset(experiment.dataset_spec)
    out_dir = Path(args.out or experiment.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    return experiment, dataset, out_dir


def cmd_run(args) -> int:
    experiment, dataset, out_dir = _prepare(args)
    result = run_simulation(experiment.sim, dataset)
    payload = json.dumps(result.to_dict(), sort_keys=True, indent=2)
    (out_dir / "run_result.json").write_text(payload + "\n")
    plots.render_run(result, out_dir / "run.png")
    if args.trace:
        write_trace_csv(result.trace, out_dir / "trace.csv")
    tagged = result.nodes[result.tagged_node]
    print(
        f"run: {result.rounds} rounds, L={result.total_messages}, "
        f"tagged node {result.tagged_node} final F1={tagged.final_f1:.4f}"
    )
    return 0


def cmd_sweep(args) -> int:
    experiment, dataset, out_dir = _prepare(args)
    if not experiment.t_values:
        raise ConfigError("sweep needs 't_values' in the experiment file")
    rows = sweep_t(experiment.sim, dataset, experiment.t_values, jobs=args.jobs)
    write_sweep_csv(rows, out_dir / "sweep.csv")
    plots.render_sweep(rows, out_dir / "sweep.png")
    for row in rows:
        print(
            f"t={row.t:g}: F1={row.f1_mean:.4f} (+/-{row.f1_ci:.4f}), "
            f"L={row.l_mean:.1f}"
        )
    return 0


def cmd_baseline(args) -> int:
    experiment, dataset, out_dir = _prepare(args)
    result = run_centralized(dataset, experiment.sim.learner_params)
    payload = json.dumps(result.to_dict(), sort_keys=True, indent=2)
    (out_dir / "baseline.json").write_text(payload + "\n")
    plots.render_run(result, out_dir / "baseline.png")
    node = result.nodes[0]
    print(
        f"baseline: {node.samples_processed} samples, "
        f"final F1={node.final_f1:.4f}, prototypes={node.prototype_counts[-1]}"
    )
    return 0


def cmd_bench(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    feature_rows, class_rows = run_bench(
        feature_grid=args.features,
        class_grid=args.classes,
        n_samples=args.samples,
        separation=args.separation,
        runs=args.runs,
        seed=args.seed,
    )
    write_bench_csv(feature_rows + class_rows, out_dir / "bench.csv")
    plots.render_bench(feature_rows, class_rows, out_dir / "bench.png")
    for row in feature_rows + class_rows:
        print(
            f"d={row.n_features} classes={row.n_classes}: "
            f"{row.protos} prototypes, {row.bytes} bytes, {row.wall_ms:.1f} ms"
        )
    return 0


def cmd_epidemic(args) -> int:
    if args.x0 is not None:
        params = SiParams(beta=args.beta, x0=args.x0)
    else:
        params = SiParams.single_source(args.beta, args.n_prime or 5)
    if args.points < 2 or args.t_max <= 0:
        raise ConfigError("epidemic grid needs t-max > 0 and at least 2 points")
    grid = []
    for i in range(args.points):
        t = args.t_max * i / (args.points - 1)
        grid.append((t, si_closed_form(params, t), si_numeric(params, t, args.dt)))
    print(f"{'t':>10} {'closed':>12} {'numeric':>12} {'|diff|':>12}")
    for t, closed, numeric in grid:
        print(f"{t:10.4f} {closed:12.8f} {numeric:12.8f} {abs(closed - numeric):12.3e}")
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "epidemic.csv", "w", newline="") as handle:
            handle.write("t,closed_form,numeric\n")
            for t, closed, numeric in grid:
                handle.write(f"{t!r},{closed!r},{numeric!r}\n")
        plots.render_epidemic(grid, out_dir / "epidemic.png")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DatasetError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
