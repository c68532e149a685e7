"""Command-line interface: run experiments, emit datasets, measure stability."""

from __future__ import annotations

import argparse
import sys

from .errors import MassError
from .harness import (
    build_spec,
    parse_config,
    run_experiment,
    stability_run,
    sweep_experiment,
)
from .numerics import RngStream
from .simgen import export_csv, gen_sim


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="key = value manifest file")
    parser.add_argument("--study", choices=["I", "II1", "II2", "III", "IV", "V"])
    parser.add_argument("--reps", type=int, metavar="N")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--out", metavar="DIR")
    parser.add_argument("--workers", type=int, metavar="N")
    parser.add_argument(
        "--method",
        metavar="NAME[,NAME...]",
        help="comma-separated subset of fd,lars,pca,sis,mass,mfss",
    )
    parser.add_argument("--p", type=int, metavar="N")
    parser.add_argument("--iters", type=int, metavar="N")
    parser.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        metavar="X",
        help="curvature level (spline search when > 0; study-I truth for sim)",
    )
    parser.add_argument("--xi", type=float, metavar="X", help="fixed sparsity for mfss")
    parser.add_argument("--reduction", choices=["none", "pca", "sis", "pca_sis"])
    parser.add_argument("--m", type=int, metavar="N", help="intermediate dimension")
    parser.add_argument("--timing", action="store_true", default=None)


def _spec_from_args(
    args: argparse.Namespace, lam_is_sim: bool = False, extra: dict | None = None
):
    config = parse_config(args.config) if args.config else {}
    overrides = {
        "study": args.study,
        "reps": args.reps,
        "seed": args.seed,
        "out": args.out,
        "workers": args.workers,
        "p": args.p,
        "iters": args.iters,
        "xi": args.xi,
        "reduction": args.reduction,
        "m": args.m,
        "timing": args.timing,
    }
    if args.method is not None:
        overrides["methods"] = tuple(m.strip() for m in args.method.split(",") if m.strip())
    if args.lam is not None:
        overrides["sim_lambda0" if lam_is_sim else "lam"] = args.lam
    if extra:
        overrides.update(extra)
    return build_spec(config, overrides)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="massdr",
        description="Adaptive stochastic search dimensionality reduction experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a replicated experiment")
    _add_common(run_p)

    sim_p = sub.add_parser("sim", help="generate one dataset and write CSV splits")
    _add_common(sim_p)

    stab_p = sub.add_parser("stability", help="rerun the search R times on one dataset")
    _add_common(stab_p)

    sweep_p = sub.add_parser("sweep", help="sweep p for the baseline methods")
    _add_common(sweep_p)
    sweep_p.add_argument("--pmax", type=int, metavar="N")

    args = parser.parse_args(argv)
    try:
        if args.command == "sim":
            spec = _spec_from_args(args, lam_is_sim=True)
            rng = RngStream(spec.seed).child("data").child(0)
            dataset = gen_sim(
                spec.study,
                rng,
                n_train=spec.n_train,
                n_test=spec.n_test,
                d=spec.d,
                lambda0=spec.sim_lambda0,
                xi0=spec.sim_xi0,
            )
            for path in export_csv(dataset, spec.out, stem=f"{spec.study}_"):
                print(path)
            return 0
        if args.command == "run":
            table = run_experiment(_spec_from_args(args))
            print(table.to_text())
            return 0
        if args.command == "stability":
            report = stability_run(_spec_from_args(args))
            print(
                f"runs={report.runs} mean_abs_rho={report.mean_abs_rho:.3f} "
                f"pc1_var_share={report.pc1_var_share:.3f} "
                f"skipped={report.skipped_pairs} "
                f"mcr={report.mcr_mean:.3f} (se {report.mcr_se:.3f})"
            )
            return 0
        if args.command == "sweep":
            extra: dict = {}
            if args.pmax is not None:
                extra["sweep_pmax"] = args.pmax
            if args.method is None and "run.methods" not in (
                parse_config(args.config) if args.config else {}
            ):
                extra["methods"] = ("lars", "pca", "sis")
            results = sweep_experiment(_spec_from_args(args, extra=extra))
            for r in results:
                print(f"{r.method}: p*={r.p_star} MCR*={r.mcr_star:.3f}")
            return 0
    except MassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
