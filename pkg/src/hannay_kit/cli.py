"""Command-line interface.

Subcommands: validate, classify, hannay, phases, full, sweep.
Exit codes: 0 success, 2 refusal (a failed existence condition), 1 internal
error.  HANNAY_KIT_THREADS caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import config_from_dict, load_config, set_by_path
from .errors import HannayKitError
from .pipeline import (
    REFUSAL_TYPES,
    build_frame_from_config,
    classify,
    emit_plot_data,
    run_pipeline,
)
from .report import RefusalReport, format_float, render_json

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_REFUSED = 2


def _common_flags(parser):
    parser.add_argument("--config", required=True, help="TOML config path")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    parser.add_argument("--tolerance", type=float, default=None,
                        help="override solver.ode_tol")
    parser.add_argument("--t0", type=float, default=None,
                        help="override run.t0")
    parser.add_argument("--pair", choices=("canonical", "explicit"),
                        default=None, help="override pair.mode")
    parser.add_argument("--m-max", type=int, default=None,
                        help="override run.m_max")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hannay-kit",
        description="Action-angle structure, Hannay angle and geometric "
                    "phases of the time-periodic generalized oscillator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("validate", "parse the config and run the invariant checks only"),
        ("classify", "Floquet stability classification only"),
        ("hannay", "compute the Hannay angle by all three routes"),
        ("phases", "full report including the quantum phase ladder"),
        ("full", "phases plus CSV plot data"),
        ("sweep", "grid over one named parameter, in parallel"),
    ):
        p = sub.add_parser(name, help=text)
        _common_flags(p)
        if name == "sweep":
            p.add_argument("--sweep", required=True, metavar="KEY=A:B:N",
                           help="dotted config key and grid, e.g. "
                                "spec.a.constant=0:0.2:11")
    return parser


def _load_with_overrides(args):
    config = load_config(args.config)
    doc = config.to_dict()
    if args.tolerance is not None:
        set_by_path(doc, "solver.ode_tol", args.tolerance)
    if args.t0 is not None:
        set_by_path(doc, "run.t0", args.t0)
    if args.pair is not None:
        set_by_path(doc, "pair.mode", args.pair)
    if args.m_max is not None:
        set_by_path(doc, "run.m_max", args.m_max)
    if args.out is not None:
        set_by_path(doc, "output.dir", args.out)
    if args.format is not None:
        set_by_path(doc, "output.format", args.format)
    return config_from_dict(doc)


def _emit(report, config, write_files):
    text = report.to_json()
    sys.stdout.write(text)
    if write_files:
        os.makedirs(config.out_dir, exist_ok=True)
        if config.out_format == "csv":
            from .report import render_csv

            path = os.path.join(config.out_dir, "report.csv")
            payload = render_csv(report.to_dict())
        else:
            path = os.path.join(config.out_dir, "report.json")
            payload = text
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    return EXIT_REFUSED if report.status == "refused" else EXIT_OK


def _parse_sweep(expr):
    try:
        key, grid = expr.split("=", 1)
        start, stop, num = grid.split(":")
        return key.strip(), float(start), float(stop), int(num)
    except ValueError as exc:
        raise HannayKitError(f"bad --sweep expression {expr!r}; expected "
                             "KEY=START:STOP:N") from exc


def _sweep_worker(payload):
    index, doc, key, value = payload
    set_by_path(doc, key, value)
    try:
        config = config_from_dict(doc)
        report = run_pipeline(config, stage="phases")
    except REFUSAL_TYPES as exc:
        report = RefusalReport(code=exc.code, message=str(exc))
    return index, value, report.to_dict()


def _max_workers(n_points):
    cap = os.environ.get("HANNAY_KIT_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_points, limit))


def _run_sweep(args):
    config = _load_with_overrides(args)
    key, start, stop, num = _parse_sweep(args.sweep)
    if num < 1:
        raise HannayKitError("sweep needs at least one point")
    values = [start + (stop - start) * i / max(1, num - 1) for i in range(num)]
    payloads = [(i, config.to_dict(), key, v) for i, v in enumerate(values)]
    results = [None] * num
    with ProcessPoolExecutor(max_workers=_max_workers(num)) as pool:
        for index, value, report in pool.map(_sweep_worker, payloads):
            results[index] = (value, report)

    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for i, (value, report) in enumerate(results):
        path = os.path.join(out_dir, f"sweep_{i:04d}.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_json(report) + "\n")
        hannay = report.get("hannay", {})
        rows.append((value, report["status"],
                     hannay.get("closed_form", float("nan"))))
    summary = os.path.join(out_dir, "sweep_summary.csv")
    with open(summary, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{key},status,hannay_closed_form [rad]\n")
        for value, status, q_h in rows:
            fh.write(f"{format_float(value)},{status},{format_float(q_h)}\n")
    sys.stdout.write(render_json({
        "schema_version": 1, "status": "ok", "sweep_key": key,
        "points": num, "summary": summary}) + "\n")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _run_sweep(args)
        config = _load_with_overrides(args)
        if args.command == "validate":
            report = {"schema_version": 1, "status": "ok",
                      "message": "configuration is valid"}
            sys.stdout.write(render_json(report) + "\n")
            return EXIT_OK
        if args.command == "classify":
            return _emit(classify(config), config,
                         write_files=args.out is not None)
        stage = "hannay" if args.command == "hannay" else "phases"
        report = run_pipeline(config, stage=stage)
        code = _emit(report, config,
                     write_files=args.out is not None
                     or args.command == "full")
        if args.command == "full" and report.status == "ok":
            frame = build_frame_from_config(config)
            emit_plot_data(frame, config.out_dir)
        return code
    except REFUSAL_TYPES as exc:
        report = RefusalReport(code=exc.code, message=str(exc))
        sys.stdout.write(report.to_json())
        return EXIT_REFUSED
    except HannayKitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
