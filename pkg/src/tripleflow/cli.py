"""Command-line front end.

Three subcommands share one flat config format: ``run`` marches a free-form
simulation, ``verify`` executes one named verification scenario (or all of
them) and checks the measurements against their analytic targets, and
``report`` summarizes the diagnostics of a finished run directory.

Exit codes: 0 success, 1 configuration or validation problem, 2 a scenario
check missed its tolerance, 3 the solver aborted mid-run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, runner, scenarios
from .config import RunConfig, RunSettings, load_config, load_tol_overrides
from .errors import ConfigError, SolverAbort, TripleflowError
from .params import ModelParams, validate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SCENARIO = 2
EXIT_ABORT = 3


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit status 2 for usage errors; we need it for
    scenario failures, so usage problems are rerouted through ConfigError."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tripleflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="free-form run from a config file")
    p_run.add_argument("config_pos", nargs="?", default=None, metavar="config")
    p_run.add_argument("--config", default=None, help="config file path")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--snapshot-every", type=int, default=None, metavar="N")
    p_run.add_argument("--binary-output", action="store_true", default=None)
    p_run.add_argument("--max-steps", type=int, default=None, metavar="N")
    p_run.set_defaults(func=_cmd_run)

    p_ver = sub.add_parser("verify", help="run verification scenarios")
    p_ver.add_argument("scenario", help="scenario name or 'all'")
    p_ver.add_argument("config_pos", nargs="?", default=None, metavar="config")
    p_ver.add_argument("--config", default=None, help="config file path")
    p_ver.add_argument("--out", default=None, help="report/series directory")
    p_ver.add_argument("--tol-overrides", default=None, metavar="PATH",
                       help="file of tolerance_name = value lines")
    p_ver.set_defaults(func=_cmd_verify)

    p_rep = sub.add_parser("report", help="summarize a finished run directory")
    p_rep.add_argument("run_dir", help="directory holding diagnostics.csv")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def _resolve_config(args) -> RunConfig | None:
    if args.config_pos and args.config:
        raise ConfigError("config given both positionally and via --config")
    path = args.config_pos or args.config
    if path is None:
        return None
    return load_config(path)


def _cmd_run(args) -> int:
    cfg = _resolve_config(args)
    if cfg is None:
        raise ConfigError("run needs a config file")
    if args.out is not None:
        cfg.settings.out_dir = args.out
    if args.snapshot_every is not None:
        cfg.settings.snapshot_every = args.snapshot_every
    if args.binary_output:
        cfg.settings.binary_output = True
    if args.max_steps is not None:
        cfg.settings.max_steps = args.max_steps

    plan = runner.RunPlan.from_config(cfg)
    state = runner.build_initial_state(plan)
    art = runner.time_loop(state, plan, write_outputs=True)
    last = art.records[-1]
    print(f"run finished: {art.n_steps} steps to t = {art.final_state.time:.6g} "
          f"({art.stop_reason}), {art.rejections} rejected substeps")
    print(f"outputs in {art.out_dir}")
    if art.stop_reason == "aborted":
        print(f"solver abort: {type(art.abort).__name__}: {art.abort}",
              file=sys.stderr)
        return EXIT_ABORT
    print(f"final mass {last.total_mass:.12g}, ions {last.total_ions:.12g}, "
          f"free energy {last.F_total:.12g}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = _resolve_config(args)
    params = cfg.params if cfg is not None else validate(ModelParams())
    out_dir = args.out
    if out_dir is None and cfg is not None:
        out_dir = cfg.settings.out_dir
    if out_dir is None:
        out_dir = "out"
    tols = None
    if args.tol_overrides:
        tols = load_tol_overrides(
            args.tol_overrides, set(scenarios.DEFAULT_TOLERANCES)
        )

    if args.scenario == "all":
        names = list(scenarios.SCENARIOS)
    elif args.scenario in scenarios.SCENARIOS:
        names = [args.scenario]
    else:
        raise ConfigError(
            f"unknown scenario {args.scenario!r}; "
            f"choose from {', '.join(scenarios.SCENARIOS)} or 'all'"
        )

    n_failed = 0
    for name in names:
        report = scenarios.run_scenario(
            name, params, out_dir=out_dir, tol_overrides=tols
        )
        verdict = "pass" if report.passed else "FAIL"
        print(f"{name}: {verdict}")
        for key, ok in report.checks.items():
            line = f"  [{'pass' if ok else 'FAIL'}] {key}"
            if key in report.relative_errors:
                line += f"  (rel err {report.relative_errors[key]:.4g})"
            print(line)
        for note in report.notes:
            print(f"  note: {note}")
        if not report.passed:
            n_failed += 1
    print(f"verify: {len(names)} scenario(s), {n_failed} failed")
    return EXIT_OK if n_failed == 0 else EXIT_SCENARIO


def _cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    csv = run_dir / "diagnostics.csv"
    if not csv.is_file():
        raise ConfigError(f"no diagnostics.csv in {run_dir}")
    series = diagnostics.read_diagnostics(csv)
    t = series["time"]
    print(f"run directory {run_dir}: {t.size} records, "
          f"t = {t[0]:.6g} .. {t[-1]:.6g}")
    mass, ions = series["total_mass"], series["total_ions"]
    print(f"mass drift      {abs(mass[-1] - mass[0]):.3e}")
    print(f"ion drift       {abs(ions[-1] - ions[0]):.3e}")
    print(f"free energy     {series['F_total'][0]:.9g} -> "
          f"{series['F_total'][-1]:.9g}")
    print(f"max |sum phi-1| {np.max(series['res_partition']):.3e}")
    print(f"max |sum mu/S|  {np.max(series['res_chempot']):.3e}")
    print(f"max |div const| {np.max(series['res_divergence']):.3e}")
    print(f"max speed       {np.max(series['max_speed']):.3e}")
    records = [
        diagnostics.DiagnosticsRecord(*row)
        for row in zip(*(series[name] for name in diagnostics.DIAG_COLUMNS))
    ]
    audit = diagnostics.dissipation_audit(records)
    word = "pass" if audit.passed else "FAIL"
    print(f"dissipation audit: {word} "
          f"(bad-step fraction {audit.fraction:.4g}; "
          f"worst dF = {audit.worst_dF:.3e} at step {audit.worst_step})")
    snaps = sorted(run_dir.glob("snapshot_*.dat"))
    if snaps:
        print(f"snapshots: {len(snaps)} ({snaps[0].name} .. {snaps[-1].name})")
    return EXIT_OK


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverAbort as exc:
        print(f"solver abort: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except TripleflowError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
