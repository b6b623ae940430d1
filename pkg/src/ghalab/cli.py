"""Command-line interface.

Subcommands:
  spectrum    closed-form vs recursed (and discrete) spectrum table
  verify      undeformed algebra checks (spectrum, ladder, weighted family)
  deform      deformed-algebra checks (families, frames, quasi-basis)
  eigensolve  grid checks (FD spectra, similarity, eigenvector shapes)
  potential   effective-potential data of the tanh-deformed oscillator
  report      everything, plus file emission
  selftest    canned configs covering every operation, with a coverage audit

Exit codes: 0 all gated checks pass, 1 some gated check failed,
2 configuration problem, 3 I/O problem.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import config_from_dict, parse_config
from .errors import ConfigError
from .report import (
    OPERATIONS,
    coverage_audit,
    emit,
    run_suite,
    selftest_configs,
    _render_table,
)

_GROUPS_BY_COMMAND = {
    "spectrum": ("spectrum",),
    "verify": ("spectrum", "algebra", "weighted", "model"),
    "deform": ("spectrum", "deformation"),
    "eigensolve": ("grid",),
    "potential": (),
    "report": None,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghalab",
        description="Ladder-algebra laboratory: build, deform, and verify solvable models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("spectrum", "emit the spectrum table"),
        ("verify", "run the undeformed algebra checks"),
        ("deform", "run the deformed-algebra checks"),
        ("eigensolve", "run the grid-level checks"),
        ("potential", "emit the deformed-oscillator effective potential"),
        ("report", "run every applicable check and emit a report"),
        ("selftest", "run canned configs and audit operation coverage"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="path to a JSON config file")
        cmd.add_argument("--out", help="output directory for emitted files")
        cmd.add_argument(
            "--format", choices=("json", "csv", "table"), default="table", dest="fmt"
        )
        cmd.add_argument("--seed", type=int, help="override the config seed")
        cmd.add_argument("--n", type=int, help="override the family depth n_max")
        cmd.add_argument("--grid", type=int, help="override the grid node count")
    return parser


def _load_config(args):
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    else:
        raw = {"model": "infinite_well"}
        if args.command == "potential":
            raw = {"model": "harmonic_oscillator", "deformation": {"kind": "tanh_shift"}}
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.n is not None:
        raw["n_max"] = args.n
    if args.grid is not None:
        raw.setdefault("grid", {})["n_points"] = args.grid
    if args.command == "spectrum":
        raw["outputs"] = sorted(set(raw.get("outputs", [])) | {"spectrum"})
    if args.command == "potential":
        raw["outputs"] = sorted(set(raw.get("outputs", [])) | {"potential"})
    return config_from_dict(raw)


def _run_command(args) -> int:
    if args.command == "selftest":
        reports = [run_suite(cfg) for cfg in selftest_configs()]
        covered, missing = coverage_audit(reports)
        ok = all(r.passed for r in reports) and not missing
        for cfg_report in reports:
            status = "PASS" if cfg_report.passed else "FAIL"
            print(f"{status}  {cfg_report.config['model']}  ({len(cfg_report.checks)} checks)")
            for name in cfg_report.failed_names():
                print(f"      failed: {name}")
        print(f"operations covered: {len(covered)}/{len(OPERATIONS)}")
        if missing:
            print(f"missing: {sorted(missing)}")
        return 0 if ok else 1

    cfg = _load_config(args)
    report = run_suite(cfg, groups=_GROUPS_BY_COMMAND[args.command])
    if args.out:
        paths = emit(report, args.fmt, args.out)
        for path in paths:
            print(f"wrote {path}")
    if args.fmt == "table" or not args.out:
        print(_render_table(report), end="")
    if args.command == "spectrum" and "spectrum" in report.tables:
        header, rows = report.tables["spectrum"]
        print(",".join(header))
        for row in rows:
            print(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return 0 if report.passed else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run_command(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
