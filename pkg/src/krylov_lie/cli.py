"""Command-line scenario runner.

    krylov-lie list
    krylov-lie run su4_sech ho_quench:tau=5 my_config.json --out results/

Each scenario writes ``<name>_series.csv``, ``<name>_generator.csv`` and
``<name>_summary.json``. Exit status: 0 when every enabled check passes,
1 when a check fails (its name is printed), 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from .algebra import HW
from .errors import ConfigError, DomainError, IntegrationError
from .pipeline import ScenarioResult, SectorResult, run_scenario
from .scenarios import Scenario, list_scenarios, parse_builtin_spec, scenario_from_config

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
THREADS_ENV = "KRYLOV_LIE_THREADS"
NAN = float("nan")


def _fmt(x: float) -> str:
    # Adding 0.0 folds -0.0 into 0.0 so signed zeros never reach the CSV.
    return "%.17g" % (float(x) + 0.0)


def load_scenario(target: str) -> Scenario:
    """A path to a JSON config, or a built-in name with optional ``:key=value`` list."""
    path = Path(target)
    if target.endswith(".json") or path.is_file():
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {target}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{target} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{target}: top level must be an object")
        return scenario_from_config(doc)
    return parse_builtin_spec(target)


# --- serialization -----------------------------------------------------------

def _sector_series(res: SectorResult) -> tuple[list[str], list[list[float]]]:
    hw = res.spec.sector.sigma == HW
    dim = res.spec.sector.dim
    header = ["re_z", "im_z", "re_eta", "im_eta", "K", "dK", "dK_dt", "bound", "gap"]
    header += [f"P_{n}" for n in range(dim)]
    rows = []
    for state, wf, rep in zip(res.states, res.wavefunctions, res.reports):
        if hw:
            z, eta = complex(state.alpha), complex(NAN, NAN)
        else:
            z, eta = complex(state.z), complex(state.eta)
        rows.append([z.real, z.imag, eta.real, eta.imag, wf.complexity, wf.complexity_std,
                     rep.dK_dt, rep.bound, rep.gap, *wf.probabilities])
    return header, rows


def _sector_generator(res: SectorResult) -> tuple[list[str], list[list[float]]]:
    header = ["theta0", "re_theta_plus", "im_theta_plus", "re_chi", "im_chi"]
    rows = []
    for k in range(len(res.grid)):
        p = res.generator[k] if k < len(res.generator) else None
        if p is None:
            rows.append([NAN] * 5)
        elif res.spec.sector.sigma == HW:
            # Heisenberg-Weyl: U = exp(-i G) with G = -Phi 1 + alpha a^dag + conj(alpha) a
            rows.append([-p.phi, p.alpha.real, p.alpha.imag, NAN, NAN])
        else:
            rows.append([p.theta0, p.theta_plus.real, p.theta_plus.imag, p.chi.real, p.chi.imag])
    return header, rows


def _join(result: ScenarioResult, part) -> tuple[list[str], list[list[float]]]:
    """Concatenate per-sector columns; multi-sector columns get ``<label>.`` prefixes."""
    multi = len(result.sectors) > 1
    header = ["t"]
    rows = [[float(t)] for t in result.scenario.grid]
    for res in result.sectors:
        h, r = part(res)
        header += [f"{res.spec.label}.{c}" for c in h] if multi else h
        for row, extra in zip(rows, r):
            row.extend(extra)
    return header, rows


def _write_csv(path: Path, header: list[str], rows: list[list[float]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_outputs(result: ScenarioResult, out: Path) -> list[Path]:
    name = result.scenario.name
    out.mkdir(parents=True, exist_ok=True)
    header, rows = _join(result, _sector_series)
    if len(result.sectors) > 1:
        header.append("K_total")
        for row, k in zip(rows, result.complexity_total):
            row.append(float(k))
    paths = [out / f"{name}_series.csv", out / f"{name}_generator.csv", out / f"{name}_summary.json"]
    _write_csv(paths[0], header, rows)
    _write_csv(paths[1], *_join(result, _sector_generator))
    with open(paths[2], "w", newline="\n") as fh:
        json.dump(result.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


# --- commands ----------------------------------------------------------------

def _thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _run_one(scn: Scenario, out: Path, oracle: bool, tol: float | None) -> tuple[str, int, list[str]]:
    try:
        result = run_scenario(scn, oracle=oracle, tol=tol)
    except (DomainError, IntegrationError) as exc:
        return scn.name, EXIT_CHECK_FAILED, [f"pipeline error: {exc}"]
    write_outputs(result, out)
    failed = [f"{c.name} = {c.value:.3e} > {c.tol:g}" for c in result.failed]
    return scn.name, EXIT_OK if result.passed else EXIT_CHECK_FAILED, failed


def cmd_run(args: argparse.Namespace) -> int:
    if args.tol is not None and not (math.isfinite(args.tol) and args.tol > 0):
        raise ConfigError("--tol must be a positive number")
    scenarios = [load_scenario(t) for t in args.targets]
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ConfigError("scenario names in one batch must be distinct (outputs would clash)")
    out = Path(args.out)
    with ThreadPoolExecutor(max_workers=min(_thread_cap(), len(scenarios))) as pool:
        outcomes = list(pool.map(lambda s: _run_one(s, out, not args.no_oracle, args.tol),
                                 scenarios))
    status = EXIT_OK
    for name, code, failed in outcomes:
        print(f"{name}: {'PASS' if code == EXIT_OK else 'FAIL'}")
        for msg in failed:
            print(f"  failed check {msg}", file=sys.stderr)
        status = max(status, code)
    return status


def cmd_list(args: argparse.Namespace) -> int:
    for name, desc in list_scenarios():
        print(f"{name:20s} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="krylov-lie",
                                     description="Exact Krylov dynamics on rank-one Lie sectors.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run scenarios and write CSV/JSON outputs")
    run.add_argument("targets", nargs="+", metavar="config.json|builtin[:key=value,...]")
    run.add_argument("--out", default=".", help="output directory (default: .)")
    run.add_argument("--tol", type=float, default=None, help="override the integration tolerance")
    run.add_argument("--no-oracle", action="store_true", help="skip the brute-force oracle check")
    run.set_defaults(func=cmd_run)
    lst = sub.add_parser("list", help="list built-in scenarios")
    lst.set_defaults(func=cmd_list)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
