"""Replicated experiment runner: tables, traces, plots, stability metric.

The harness owns all I/O.  A run writes ``results.csv`` (one row per method
per replication), a per-method ``trace_<method>.csv`` averaged across
replications for the iterative searches, and SVG line charts of the traces.
Seed discipline: the data of replication r comes from
``master.child("data").child(r)``; the stochastic search of method m in
replication r is seeded by ``master.child(r).child(m)``, so adding a method
never perturbs another method's draws.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .classify import bayes_rate_estimate, fit_logistic, mcr, predict_classes
from .errors import MassError, ParameterError
from .mass import MassConfig, MassTrace, run_mass
from .numerics import RngStream, svd
from .reduce import (
    Reduction,
    _abs_corr_with,
    fingerprint,
    intermediate_dim,
    no_reduction,
    pca_reduce,
    pca_sis_reduce,
    sis_reduce,
)
from .selection import lars_path, select_first_p
from .simgen import SimDataset, gen_sim, load_csv_pair
from .svgplot import line_chart, write_svg

METHODS = ("fd", "lars", "pca", "sis", "mass", "mfss")
RESULT_COLUMNS = (
    "method",
    "p",
    "replication",
    "seed",
    "test_mcr",
    "bayes_mcr",
    "final_sparsity",
    "wall_seconds",
)
TRACE_COLUMNS = ("iteration", "L", "deviance", "xi_bar", "test_mcr")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one experiment end to end."""

    study: str | None = "II1"
    train_csv: str | None = None
    test_csv: str | None = None
    reduction: str = "none"
    m: int | None = None
    methods: tuple[str, ...] = ("mass",)
    p: int = 5
    iters: int = 500
    lam: float = 0.0
    xi: float = 0.0
    xi0: float = 0.5
    alpha: float = 5.0
    sim_lambda0: float = 5.0
    sim_xi0: float = 0.3
    n_train: int | None = None
    n_test: int | None = None
    d: int | None = None
    reps: int = 20
    seed: int = 0
    out: str = "out"
    workers: int = 1
    track_test_mcr: bool = True
    timing: bool = False
    sweep_pmax: int | None = None

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ParameterError(f"reps must be >= 1, got {self.reps}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        if not self.methods:
            raise ParameterError("at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise ParameterError(f"unknown method {m!r}; expected one of {METHODS}")
        if self.reduction not in ("none", "pca", "sis", "pca_sis"):
            raise ParameterError(f"unknown reduction {self.reduction!r}")
        if self.study is None and (self.train_csv is None or self.test_csv is None):
            raise ParameterError("either a study tag or train/test CSV paths are required")


@dataclass(frozen=True)
class ResultTable:
    """Aggregate of results.csv: one row per method."""

    rows: tuple[dict, ...]

    def to_text(self) -> str:
        lines = [f"{'method':<8}{'p':>4}{'reps':>6}{'mean_mcr':>10}{'se':>8}{'bayes':>8}"]
        for r in self.rows:
            bayes = f"{r['mean_bayes']:.3f}" if r["mean_bayes"] is not None else "   -"
            lines.append(
                f"{r['method']:<8}{r['p']:>4}{r['reps']:>6}"
                f"{r['mean_mcr']:>10.3f}{r['se_mcr']:>8.3f}{bayes:>8}"
            )
        return "\n".join(lines)


def _dataset_for(spec: ExperimentSpec, rep: int, master: RngStream) -> SimDataset:
    if spec.study is None:
        return load_csv_pair(spec.train_csv, spec.test_csv)
    return gen_sim(
        spec.study,
        master.child("data").child(rep),
        n_train=spec.n_train,
        n_test=spec.n_test,
        d=spec.d,
        lambda0=spec.sim_lambda0,
        xi0=spec.sim_xi0,
    )


def _fit_reduction(spec: ExperimentSpec, dataset: SimDataset) -> Reduction:
    x, y = dataset.x_train, dataset.y_train
    if spec.reduction == "none":
        return no_reduction(x)
    m = spec.m if spec.m is not None else intermediate_dim(x.shape[0])
    if spec.reduction == "pca":
        return pca_reduce(x, m)
    if spec.reduction == "sis":
        return sis_reduce(x, y, m)
    return pca_sis_reduce(x, y, m)


def _mass_config(spec: ExperimentSpec, method: str, seed: int) -> MassConfig:
    mode = "spline" if spec.lam > 0.0 else "linear"
    return MassConfig(
        p=spec.p,
        iters=spec.iters,
        seed=seed,
        mode=mode,
        lam=spec.lam if mode == "spline" else 0.0,
        sparsity_policy="adaptive" if method == "mass" else "fixed",
        xi0=spec.xi0,
        fixed_xi=spec.xi if method == "mfss" else None,
        alpha=spec.alpha,
    )


def _run_method(
    method: str,
    spec: ExperimentSpec,
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_test: np.ndarray,
    y_test: np.ndarray,
    seed: int,
) -> tuple[float, float | None, MassTrace | None, int]:
    """Returns (test_mcr, final_sparsity, trace, p_used)."""
    n, d = x_train.shape
    p = min(spec.p, d)
    if method == "fd":
        model = fit_logistic(x_train, y_train)
        return mcr(predict_classes(model, x_test), y_test), None, None, d
    if method == "lars":
        path = lars_path(x_train, y_train, max_steps=min(p, n - 1, d))
        chosen, _ = select_first_p(path, p)
        if not chosen:
            raise MassError("no variable ever activated")
        model = fit_logistic(x_train[:, chosen], y_train)
        return (
            mcr(predict_classes(model, x_test[:, chosen]), y_test),
            None,
            None,
            len(chosen),
        )
    if method == "pca":
        red = pca_reduce(x_train, p)
        model = fit_logistic(red.apply(x_train), y_train)
        return mcr(predict_classes(model, red.apply(x_test)), y_test), None, None, red.m
    if method == "sis":
        red = sis_reduce(x_train, y_train, p)
        model = fit_logistic(red.apply(x_train), y_train)
        return mcr(predict_classes(model, red.apply(x_test)), y_test), None, None, red.m
    config = _mass_config(spec, method, seed)
    eval_set = (x_test, y_test) if spec.track_test_mcr else None
    result = run_mass(x_train, y_train, config, eval_set=eval_set)
    test_mcr = mcr(result.predict(x_test), y_test)
    return test_mcr, result.final_sparsity, result.trace, p


def _run_replication(spec: ExperimentSpec, rep: int) -> dict:
    """One replication: data, reduction, every method; returns rows and traces."""
    master = RngStream(spec.seed)
    dataset = _dataset_for(spec, rep, master)
    reduction = _fit_reduction(spec, dataset)
    if reduction.fitted_on != fingerprint(dataset.x_train):
        raise MassError("reduction was not fitted on this replication's training data")
    x_train = reduction.apply(dataset.x_train)
    x_test = reduction.apply(dataset.x_test)
    y_train, y_test = dataset.y_train, dataset.y_test
    bayes = bayes_rate_estimate(dataset) if dataset.truth is not None else None

    rows: list[dict] = []
    traces: dict[str, MassTrace] = {}
    failures: list[dict] = []
    for method in spec.methods:
        seed = master.child(rep).child(method).derive_seed()
        started = time.perf_counter()
        try:
            test_mcr, sparsity, trace, p_used = _run_method(
                method, spec, x_train, y_train, x_test, y_test, seed
            )
        except MassError as exc:
            failures.append({"method": method, "replication": rep, "reason": str(exc)})
            rows.append(
                {
                    "method": method,
                    "p": spec.p,
                    "replication": rep,
                    "seed": seed,
                    "test_mcr": None,
                    "bayes_mcr": bayes,
                    "final_sparsity": None,
                    "wall_seconds": None,
                }
            )
            continue
        elapsed = time.perf_counter() - started
        rows.append(
            {
                "method": method,
                "p": p_used,
                "replication": rep,
                "seed": seed,
                "test_mcr": test_mcr,
                "bayes_mcr": bayes,
                "final_sparsity": sparsity,
                "wall_seconds": elapsed if spec.timing else None,
            }
        )
        if trace is not None:
            traces[method] = trace
    return {"rep": rep, "rows": rows, "traces": traces, "failures": failures}


def _mean_trace(traces: list[MassTrace]) -> MassTrace:
    """Average traces across replications (NaN-aware for trace gaps)."""
    dev = np.vstack([t.deviance for t in traces])
    xi = np.vstack([t.xi_bar for t in traces])
    with np.errstate(invalid="ignore"):
        mean_dev = np.nanmean(dev, axis=0)
        mean_xi = np.nanmean(xi, axis=0)
    test = None
    if all(t.test_mcr is not None for t in traces):
        test = np.vstack([t.test_mcr for t in traces]).mean(axis=0)
    return MassTrace(
        deviance=mean_dev,
        xi_bar=mean_xi,
        bank_size=traces[0].bank_size,
        shortfall=np.any(np.vstack([t.shortfall for t in traces]), axis=0),
        test_mcr=test,
    )


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "NA" if np.isnan(value) else repr(value)
    return str(value)


def _write_results_csv(rows: list[dict], path: Path) -> None:
    rows = sorted(rows, key=lambda r: (r["method"], r["replication"]))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r["method"],
                    r["p"],
                    r["replication"],
                    r["seed"],
                    "NA" if r["test_mcr"] is None else repr(r["test_mcr"]),
                    _format_cell(r["bayes_mcr"]),
                    _format_cell(r["final_sparsity"]),
                    _format_cell(r["wall_seconds"]),
                ]
            )


def _write_trace_csv(trace: MassTrace, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for i in range(trace.deviance.shape[0]):
            writer.writerow(
                [
                    i + 1,
                    int(trace.bank_size[i]),
                    _format_cell(float(trace.deviance[i])),
                    _format_cell(float(trace.xi_bar[i])),
                    ""
                    if trace.test_mcr is None
                    else _format_cell(float(trace.test_mcr[i])),
                ]
            )


def emit_plots(trace: MassTrace, outdir: str | Path, stem: str = "trace") -> list[Path]:
    """Write deviance / test-MCR / sparsity line charts for one trace."""
    if trace.deviance.shape[0] == 0:
        raise ParameterError("trace is empty")
    outdir = Path(outdir)
    iters = list(range(1, trace.deviance.shape[0] + 1))
    written = [
        write_svg(
            outdir / f"{stem}_deviance.svg",
            line_chart(
                [("deviance", iters, list(trace.deviance))],
                title="Training deviance",
                x_label="iteration",
                y_label="deviance",
            ),
        ),
        write_svg(
            outdir / f"{stem}_xi.svg",
            line_chart(
                [("xi_bar", iters, list(trace.xi_bar))],
                title="Average sparsity",
                x_label="iteration",
                y_label="xi_bar",
            ),
        ),
    ]
    if trace.test_mcr is not None:
        written.append(
            write_svg(
                outdir / f"{stem}_mcr.svg",
                line_chart(
                    [("test MCR", iters, list(trace.test_mcr))],
                    title="Test misclassification rate",
                    x_label="iteration",
                    y_label="MCR",
                ),
            )
        )
    return written


def aggregate_rows(rows: list[dict]) -> ResultTable:
    """Mean and standard error of test MCR per method."""
    out = []
    for method in sorted({r["method"] for r in rows}):
        sub = [r for r in rows if r["method"] == method]
        vals = np.asarray([r["test_mcr"] for r in sub if r["test_mcr"] is not None])
        bayes = [r["bayes_mcr"] for r in sub if r["bayes_mcr"] is not None]
        if vals.size == 0:
            mean = se = float("nan")
        else:
            mean = float(vals.mean())
            se = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0
        out.append(
            {
                "method": method,
                "p": sub[0]["p"],
                "reps": len(sub),
                "mean_mcr": mean,
                "se_mcr": se,
                "mean_bayes": float(np.mean(bayes)) if bayes else None,
            }
        )
    return ResultTable(rows=tuple(out))


def run_experiment(spec: ExperimentSpec) -> ResultTable:
    """Run all replications and methods; write results, traces, and plots."""
    outdir = Path(spec.out)
    outdir.mkdir(parents=True, exist_ok=True)
    reps = list(range(spec.reps))
    if spec.workers > 1 and spec.reps > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            records = list(pool.map(_run_replication, [spec] * len(reps), reps))
    else:
        records = [_run_replication(spec, rep) for rep in reps]
    records.sort(key=lambda rec: rec["rep"])

    rows = [row for rec in records for row in rec["rows"]]
    failures = [f for rec in records for f in rec["failures"]]
    _write_results_csv(rows, outdir / "results.csv")
    if failures:
        with open(outdir / "failures.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "replication", "reason"])
            for f in failures:
                writer.writerow([f["method"], f["replication"], f["reason"]])

    for method in spec.methods:
        collected = [rec["traces"][method] for rec in records if method in rec["traces"]]
        if not collected:
            continue
        trace = _mean_trace(collected)
        _write_trace_csv(trace, outdir / f"trace_{method}.csv")
        emit_plots(trace, outdir, stem=f"trace_{method}")

    return aggregate_rows(rows)


@dataclass(frozen=True)
class SweepResult:
    """Per-method optimum over the p grid."""

    method: str
    p_star: int
    mcr_star: float
    per_p: tuple[tuple[int, float, float], ...]  # (p, mean_mcr, se)


def sweep_experiment(spec: ExperimentSpec) -> list[SweepResult]:
    """Sweep p over 1..pmax for the baseline methods; report MCR* and p*.

    Only lars, pca, and sis support the sweep (the stochastic searches fix p
    by design).  Writes ``sweep_<method>.csv`` per method and a combined
    ``sweep_summary.csv``.
    """
    for m in spec.methods:
        if m not in ("lars", "pca", "sis"):
            raise ParameterError(f"p-sweep supports lars/pca/sis, not {m!r}")
    outdir = Path(spec.out)
    outdir.mkdir(parents=True, exist_ok=True)
    master = RngStream(spec.seed)
    per_method: dict[str, list[list[float]]] = {m: [] for m in spec.methods}
    pmax_used = None
    for rep in range(spec.reps):
        dataset = _dataset_for(spec, rep, master)
        reduction = _fit_reduction(spec, dataset)
        x_train = reduction.apply(dataset.x_train)
        x_test = reduction.apply(dataset.x_test)
        y_train, y_test = dataset.y_train, dataset.y_test
        n, d = x_train.shape
        pmax = min(spec.sweep_pmax or d, d, n - 2)
        pmax_used = pmax if pmax_used is None else min(pmax_used, pmax)
        for method in spec.methods:
            per_method[method].append(
                _sweep_one(method, x_train, y_train, x_test, y_test, pmax)
            )

    results = []
    for method in spec.methods:
        curves = np.asarray([c[:pmax_used] for c in per_method[method]])
        means = curves.mean(axis=0)
        ses = (
            curves.std(axis=0, ddof=1) / np.sqrt(curves.shape[0])
            if curves.shape[0] > 1
            else np.zeros(curves.shape[1])
        )
        best = int(np.argmin(means))
        per_p = tuple(
            (p + 1, float(means[p]), float(ses[p])) for p in range(pmax_used)
        )
        results.append(
            SweepResult(
                method=method,
                p_star=best + 1,
                mcr_star=float(means[best]),
                per_p=per_p,
            )
        )
        with open(outdir / f"sweep_{method}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["p", "mean_mcr", "se"])
            for p, mean, se in per_p:
                writer.writerow([p, repr(mean), repr(se)])
    with open(outdir / "sweep_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "p_star", "mcr_star"])
        for r in results:
            writer.writerow([r.method, r.p_star, repr(r.mcr_star)])
    return results


def _sweep_one(
    method: str,
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_test: np.ndarray,
    y_test: np.ndarray,
    pmax: int,
) -> list[float]:
    """Test MCR for p = 1..pmax for one baseline method on one replication."""
    n, d = x_train.shape
    out: list[float] = []
    if method == "lars":
        path = lars_path(x_train, y_train, max_steps=min(pmax, n - 1, d))
        order = path.entry_order
        last = None
        for p in range(1, pmax + 1):
            cols = order[: min(p, len(order))]
            if not cols:
                out.append(float("nan"))
                continue
            if last is not None and len(cols) < p:
                out.append(last)
                continue
            model = fit_logistic(x_train[:, cols], y_train)
            last = mcr(predict_classes(model, x_test[:, cols]), y_test)
            out.append(last)
        return out
    if method == "pca":
        red = pca_reduce(x_train, pmax)
        s_train, s_test = red.apply(x_train), red.apply(x_test)
    else:
        order = np.argsort(-_abs_corr_with(np.asarray(y_train, float), x_train), kind="stable")
        s_train, s_test = x_train[:, order], x_test[:, order]
    kmax = s_train.shape[1]
    last = None
    for p in range(1, pmax + 1):
        k = min(p, kmax)
        if last is not None and k < p:
            out.append(last)
            continue
        model = fit_logistic(s_train[:, :k], y_train)
        last = mcr(predict_classes(model, s_test[:, :k]), y_test)
        out.append(last)
    return out


@dataclass(frozen=True)
class StabilityReport:
    """Similarity of repeated stochastic runs on one fixed dataset."""

    mean_abs_rho: float
    pc1_var_share: float
    skipped_pairs: int
    mcr_mean: float
    mcr_se: float
    runs: int


def stability_metric(z_list: list[np.ndarray]) -> tuple[float, float, int]:
    """Mean |Pearson rho| between first-PC scores of each pair of runs.

    Returns (mean absolute pairwise correlation, mean PC1 variance share,
    number of skipped pairs).  Pairs involving a constant score vector are
    skipped and counted.
    """
    if len(z_list) < 2:
        raise ParameterError("need at least two runs to measure stability")
    n = z_list[0].shape[0]
    scores = np.empty((n, len(z_list)))
    shares = np.empty(len(z_list))
    for i, z in enumerate(z_list):
        if z.shape[0] != n:
            raise ParameterError("all runs must share one test set")
        centered = z - z.mean(axis=0)
        u, s, v = svd(centered)
        total = float(np.sum(s**2))
        shares[i] = float(s[0] ** 2 / total) if total > 0.0 else 0.0
        scores[:, i] = centered @ v[:, 0]
    sd = scores.std(axis=0)
    rho_sum = 0.0
    pairs = 0
    skipped = 0
    r = len(z_list)
    centered_scores = scores - scores.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->j", centered_scores, centered_scores))
    for i in range(r):
        for j in range(i + 1, r):
            if sd[i] == 0.0 or sd[j] == 0.0:
                skipped += 1
                continue
            rho = centered_scores[:, i] @ centered_scores[:, j] / (norms[i] * norms[j])
            rho_sum += abs(float(rho))
            pairs += 1
    mean_rho = rho_sum / pairs if pairs else float("nan")
    return mean_rho, float(shares.mean()), skipped


def stability_run(spec: ExperimentSpec) -> StabilityReport:
    """Run the stochastic search ``spec.reps`` times on one fixed dataset.

    Measures how similar the learned subspaces are across reruns that differ
    only in their random draws; writes ``stability.csv``.
    """
    method = "mass" if "mass" in spec.methods else spec.methods[0]
    if method not in ("mass", "mfss"):
        raise ParameterError("stability is defined for the stochastic searches")
    master = RngStream(spec.seed)
    dataset = _dataset_for(spec, 0, master)
    reduction = _fit_reduction(spec, dataset)
    x_train = reduction.apply(dataset.x_train)
    x_test = reduction.apply(dataset.x_test)
    z_list: list[np.ndarray] = []
    mcrs: list[float] = []
    for r in range(spec.reps):
        seed = master.child(r).child(method).derive_seed()
        config = _mass_config(spec, method, seed)
        result = run_mass(x_train, dataset.y_train, config)
        z_list.append(result.transform(x_test))
        mcrs.append(mcr(result.predict(x_test), dataset.y_test))
    mean_rho, share, skipped = stability_metric(z_list)
    arr = np.asarray(mcrs)
    report = StabilityReport(
        mean_abs_rho=mean_rho,
        pc1_var_share=share,
        skipped_pairs=skipped,
        mcr_mean=float(arr.mean()),
        mcr_se=float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0,
        runs=spec.reps,
    )
    outdir = Path(spec.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "stability.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["runs", "mean_abs_rho", "pc1_var_share", "skipped_pairs", "mcr_mean", "mcr_se"]
        )
        writer.writerow(
            [
                report.runs,
                repr(report.mean_abs_rho),
                repr(report.pc1_var_share),
                report.skipped_pairs,
                repr(report.mcr_mean),
                repr(report.mcr_se),
            ]
        )
    return report


def parse_config(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` config file with # comments."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


_CONFIG_KEYS = {
    "sim.study": ("study", str),
    "sim.lambda0": ("sim_lambda0", float),
    "sim.xi0": ("sim_xi0", float),
    "sim.n_train": ("n_train", int),
    "sim.n_test": ("n_test", int),
    "sim.d": ("d", int),
    "data.train_csv": ("train_csv", str),
    "data.test_csv": ("test_csv", str),
    "reduce.kind": ("reduction", str),
    "reduce.m": ("m", int),
    "run.methods": ("methods", "methods"),
    "run.reps": ("reps", int),
    "run.seed": ("seed", int),
    "run.out": ("out", str),
    "run.workers": ("workers", int),
    "run.timing": ("timing", "bool"),
    "run.track_test_mcr": ("track_test_mcr", "bool"),
    "mass.p": ("p", int),
    "mass.iters": ("iters", int),
    "mass.lambda": ("lam", float),
    "mass.xi": ("xi", float),
    "mass.xi0": ("xi0", float),
    "mass.alpha": ("alpha", float),
    "sweep.pmax": ("sweep_pmax", int),
}


def _convert(value: str, kind):
    if kind is str:
        return value
    if kind is int:
        return int(value)
    if kind is float:
        return float(value)
    if kind == "bool":
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ParameterError(f"expected a boolean, got {value!r}")
    if kind == "methods":
        return tuple(m.strip() for m in value.split(",") if m.strip())
    raise ParameterError(f"unhandled config kind {kind!r}")


def build_spec(
    config: dict[str, str] | None = None, overrides: dict | None = None
) -> ExperimentSpec:
    """Construct an ExperimentSpec from a config mapping plus CLI overrides.

    CLI overrides win over file values; unknown config keys are an error so
    that typos in manifests fail loudly.
    """
    fields: dict = {}
    for key, value in (config or {}).items():
        if key not in _CONFIG_KEYS:
            raise ParameterError(f"unknown config key {key!r}")
        attr, kind = _CONFIG_KEYS[key]
        fields[attr] = _convert(value, kind)
    for attr, value in (overrides or {}).items():
        if value is not None:
            fields[attr] = value
    if fields.get("train_csv") and "study" not in fields:
        fields["study"] = None
    return ExperimentSpec(**fields)


def default_workers() -> int:
    return max(os.cpu_count() or 1, 1)
