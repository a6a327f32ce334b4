"""Batch front end: one config file in, deterministic artifacts out.

Subcommands
    simulate             integrate the model, write diagnostics + checkpoint
    verify-operators     symbol tables and bound margins over a parameter grid
    verify-inequalities  ratio sweeps for the anisotropic estimates
    dependence           perturbation growth against its exponential envelope
    spectrum             vertical energy spectrum of a checkpoint

Every run writes a ``manifest.json`` (config echo, hash, versions, seed,
wall time, assertion outcomes) next to its CSV artifacts.  CSV content is
a pure function of config + seed: floats are serialized with ``repr`` and
each file opens with a ``# config_hash=...`` comment line, so artifacts
from different configurations cannot be mixed silently.

Exit codes: 0 success, 1 validation error, 2 embedded assertion failure,
3 runtime abort (CFL violation or non-finite state).
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, RunConfig, parse_config, with_overrides
from .diagnostics import attach_residuals, vertical_spectrum
from .ensembles import EnsembleSpec
from .filters import (
    DeconvSpec,
    FilterSpec,
    deconv_symbol,
    deconv_symbol_iterative,
    filter_symbol,
)
from .grid import Grid
from .inequalities import (
    run_agmon,
    run_ladyzhenskaya,
    run_trilinear,
    run_vertical_embedding,
)
from .solver import (
    SolverAbort,
    ZeroForcing,
    dependence_experiment,
    read_checkpoint,
    run,
    write_checkpoint,
)
from .spectral import divergence_residual, l2_norm

_BOUND_TOL = 1e-12
_DIAGNOSTIC_COLUMNS = (
    "t", "model_energy", "dissipation", "forcing_power", "budget_residual",
    "l2_norm", "theta_seminorm", "gronwall_integrand",
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on bad usage; convert to exit code 1
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _fmt_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class _Context:
    """Collects artifacts and assertion outcomes for the manifest."""

    def __init__(self, outdir: Path, config_hash: str, quiet: bool):
        self.outdir = outdir
        self.config_hash = config_hash
        self.quiet = quiet
        self.outputs: list[str] = []
        self.assertions: list[dict] = []
        self.abort: dict | None = None
        self.extra: dict = {}

    def say(self, message: str) -> None:
        if not self.quiet:
            print(message)

    def check(self, name: str, passed: bool, detail: str) -> None:
        self.assertions.append(
            {"name": name, "passed": bool(passed), "detail": detail}
        )
        self.say(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")

    def all_passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def write_csv(self, relpath: str, columns, rows) -> None:
        path = self.outdir / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(f"# config_hash={self.config_hash}\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt_cell(cell) for cell in row) + "\n")
        self.outputs.append(relpath)


# ---------------------------------------------------------------------------
# Subcommands


def _write_diagnostics(ctx: _Context, records) -> None:
    rows = [
        (r.t, r.model_energy, r.dissipation, r.forcing_power,
         r.budget_residual, r.l2_norm, r.theta_seminorm, r.gronwall_integrand)
        for r in records
    ]
    ctx.write_csv("diagnostics.csv", _DIAGNOSTIC_COLUMNS, rows)


def _record_finite(record) -> bool:
    values = (record.t, record.model_energy, record.dissipation,
              record.forcing_power, record.l2_norm, record.theta_seminorm,
              record.gronwall_integrand)
    return all(math.isfinite(v) for v in values)


def _cmd_simulate(rc: RunConfig, ctx: _Context) -> int:
    cfg = rc.solver
    try:
        states, records = run(cfg)
    except SolverAbort as exc:
        if exc.records:
            _write_diagnostics(ctx, attach_residuals(exc.records))
        if exc.states:
            last = exc.states[-1]
            write_checkpoint(ctx.outdir / "state.ckpt", last, cfg,
                             config_hash=ctx.config_hash)
            ctx.outputs.append("state.ckpt")
        ctx.abort = {
            "reason": type(exc).__name__,
            "message": str(exc),
            "steps_completed": exc.states[-1].step_index if exc.states else 0,
        }
        ctx.say(f"aborted: {exc}")
        return 3

    records = attach_residuals(records)
    _write_diagnostics(ctx, records)
    write_checkpoint(ctx.outdir / "state.ckpt", states[-1], cfg,
                     config_hash=ctx.config_hash)
    ctx.outputs.append("state.ckpt")

    bad = [r.t for r in records if not _record_finite(r)]
    ctx.check("records_finite", not bad,
              f"{len(bad)} non-finite records" if bad
              else f"{len(records)} records")
    scale = float(np.max(np.abs(states[-1].w.coeffs)))
    residual = divergence_residual(states[-1].w)
    ctx.check("final_state_divergence_free",
              residual <= 1e-10 * max(scale, 1e-300),
              f"residual={residual!r}")
    if isinstance(cfg.forcing, ZeroForcing):
        energies = [r.model_energy for r in records]
        rises = [
            (a, b) for a, b in zip(energies, energies[1:])
            if b > a * (1.0 + 1e-12)
        ]
        ctx.check("model_energy_nonincreasing", not rises,
                  f"{len(rises)} increases" if rises
                  else f"E(0)={energies[0]!r} -> E(T)={energies[-1]!r}")
    return 0 if ctx.all_passed() else 2


def _cmd_verify_operators(rc: RunConfig, ctx: _Context) -> int:
    sweep = rc.operators
    k3 = np.arange(-sweep.k3_max, sweep.k3_max + 1, dtype=float)
    worst_margin = math.inf
    max_deviation = 0.0
    for alpha in sweep.alpha_values:
        for theta in sweep.theta_values:
            filt = FilterSpec(alpha, theta)
            a = filter_symbol(filt, k3)
            for order in sweep.order_values:
                dspec = DeconvSpec(filt, order)
                d = deconv_symbol(dspec, k3)
                d_iter = deconv_symbol_iterative(dspec, k3)
                max_deviation = max(
                    max_deviation, float(np.max(np.abs(d - d_iter) / d))
                )
                margin = np.minimum.reduce([d - 1.0, (order + 1.0) - d, a - d])
                worst_margin = min(worst_margin, float(np.min(margin)))
                rows = zip(k3.astype(int), a, d, margin)
                name = f"operators/alpha-{alpha!r}_theta-{theta!r}_N-{order}.csv"
                ctx.write_csv(
                    name, ("k3", "A_symbol", "D_symbol", "bound_margin"), rows
                )
    ctx.check("symbol_bounds", worst_margin >= -_BOUND_TOL,
              f"worst margin {worst_margin!r}")
    ctx.check("closed_vs_iterative", max_deviation <= _BOUND_TOL,
              f"max relative deviation {max_deviation!r}")
    return 0 if ctx.all_passed() else 2


def _cmd_verify_inequalities(rc: RunConfig, ctx: _Context) -> int:
    sweep = rc.inequalities
    n = sweep.resolution
    grid = Grid(n, n, n)
    spec = EnsembleSpec(count=sweep.count, band_limit=sweep.band,
                        seed=rc.seed, amplitude_decay=sweep.amplitude_decay)
    reports = []
    agmon_violations: list[str] = []
    for lemma in sweep.lemmas:
        if lemma == "agmon":
            for s in sweep.s_values:
                try:
                    reports.append(run_agmon(spec, s, sweep.line_length))
                except AssertionError as exc:
                    agmon_violations.append(f"s={s}: {exc}")
        elif lemma == "ladyzhenskaya":
            reports.append(run_ladyzhenskaya(spec, grid))
        elif lemma == "vertical_embedding":
            for s in sweep.s_values:
                reports.append(run_vertical_embedding(spec, grid, s))
        else:
            form = lemma.split("_", 1)[1]
            for s in sweep.s_values:
                reports.append(run_trilinear(spec, grid, s, form))
    rows = [
        (r.lemma, r.s, r.count, r.max_ratio, r.mean_ratio, r.resolution,
         r.seed)
        for r in reports
    ]
    ctx.write_csv(
        "inequalities.csv",
        ("lemma", "s", "count", "max_ratio", "mean_ratio", "resolution",
         "seed"),
        rows,
    )
    ctx.check("agmon_split_bound", not agmon_violations,
              "; ".join(agmon_violations) if agmon_violations
              else "every sample under the bound")
    nonfinite = [r.lemma for r in reports if not math.isfinite(r.max_ratio)]
    ctx.check("ratios_finite", not nonfinite,
              f"non-finite maxima in {nonfinite}" if nonfinite
              else f"{len(reports)} sweeps")
    return 0 if ctx.all_passed() else 2


def _cmd_dependence(rc: RunConfig, ctx: _Context) -> int:
    report = dependence_experiment(
        rc.solver, rc.dependence.epsilon,
        perturbation_seed=rc.dependence.perturbation_seed,
    )
    envelope = report.envelope()
    rows = zip(report.times, report.delta_norms, report.integrands,
               report.integrals, envelope)
    ctx.write_csv(
        "dependence.csv",
        ("t", "delta_norm", "gronwall_integrand", "cumulative_integral",
         "envelope"),
        rows,
    )
    ctx.extra["fitted_c"] = report.fitted_c
    ctx.check("fitted_constant_finite", math.isfinite(report.fitted_c),
              f"C={report.fitted_c!r}")
    over = np.max(report.delta_norms - envelope * (1.0 + 1e-10))
    ctx.check("delta_under_envelope", over <= 0.0,
              f"max excess {float(over)!r}")
    return 0 if ctx.all_passed() else 2


def _cmd_spectrum(rc: RunConfig, ctx: _Context) -> int:
    if not rc.spectrum_checkpoint:
        raise ValueError(
            "spectrum.checkpoint: a checkpoint path is required for the "
            "spectrum subcommand"
        )
    state, header = read_checkpoint(rc.spectrum_checkpoint)
    shells = vertical_spectrum(state.w)
    ctx.write_csv("spectrum.csv", ("k3", "energy"), shells)
    ctx.extra["checkpoint"] = {
        "path": rc.spectrum_checkpoint,
        "t": state.t,
        "config_hash": header.get("config_hash", ""),
    }
    total = sum(e for _, e in shells)
    squared = l2_norm(state.w) ** 2
    ctx.check(
        "parseval_partition",
        abs(total - squared) <= 1e-12 * max(squared, 1e-300),
        f"sum={total!r} vs norm^2={squared!r}",
    )
    return 0 if ctx.all_passed() else 2


_COMMANDS = {
    "simulate": _cmd_simulate,
    "verify-operators": _cmd_verify_operators,
    "verify-inequalities": _cmd_verify_inequalities,
    "dependence": _cmd_dependence,
    "spectrum": _cmd_spectrum,
}


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="configuration file (defaults apply if omitted)")
    common.add_argument("--output", metavar="DIR",
                        help="output directory (overrides run.output_dir)")
    common.add_argument("--seed", type=int, metavar="INT",
                        help="ensemble seed (overrides run.seed)")
    common.add_argument("--quiet", action="store_true",
                        help="suppress progress output")
    parser = _Parser(prog="admles", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1

    text = ""
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            print(f"config file not found: {path}", file=sys.stderr)
            return 1
        text = path.read_text()
    try:
        rc = parse_config(text)
    except ConfigError as exc:
        for line in exc.errors:
            print(f"config error: {line}", file=sys.stderr)
        return 1
    rc = with_overrides(rc, seed=args.seed, output_dir=args.output)

    config_hash = rc.config_hash()
    outdir = Path(rc.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    ctx = _Context(outdir, config_hash, quiet=args.quiet)

    start = time.perf_counter()
    try:
        code = _COMMANDS[args.command](rc, ctx)
    except SolverAbort as exc:
        ctx.abort = {"reason": type(exc).__name__, "message": str(exc)}
        ctx.say(f"aborted: {exc}")
        code = 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - start

    status = {0: "ok", 2: "assertion-failure", 3: "aborted"}[code]
    manifest = {
        "subcommand": args.command,
        "status": status,
        "config_hash": config_hash,
        "config": rc.effective,
        "seed": rc.seed,
        "versions": {
            "admles": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_time_seconds": wall,
        "outputs": ctx.outputs,
        "assertions": ctx.assertions,
    }
    if ctx.abort is not None:
        manifest["abort"] = ctx.abort
    manifest.update(ctx.extra)
    with open(outdir / "manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    ctx.say(f"wrote {len(ctx.outputs) + 1} artifacts to {outdir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
