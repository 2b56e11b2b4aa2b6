"""Command-line entry point: ``geoparallels <subcommand> --config <path> [--out DIR] [--seed N]``.

Exit codes: 0 when every check passes, 1 when a check fails or the
computation raises, 2 for usage errors (unknown subcommand, target or
configuration field).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
import traceback
from dataclasses import replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .. import __version__
from .artifacts import sha256_file, write_csv
from .config import SUBCOMMANDS, ConfigError, ExperimentConfig, load_config
from .manifest import MANIFEST_NAME, ManifestError, RunManifest, read_manifest, verify_manifest
from .runners import RUNNERS, RunContext

__all__ = ["run", "run_dir_for", "IndexRow", "report_index", "write_index", "build_parser", "main"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="microseconds")


def run_dir_for(config: ExperimentConfig, out: str | Path | None = None) -> Path:
    base = Path(out or config.out_dir or "results")
    target = config.target or "default"
    return base / f"{config.subcommand}-{target}-{config.content_hash()[:12]}"


def run(config: ExperimentConfig, out: str | Path | None = None) -> RunManifest:
    """Execute one configured experiment and write its manifest last.

    Any existing manifest in the run directory is removed first, so a run
    that raises leaves no manifest behind.
    """
    if config.subcommand == "report":
        raise ConfigError("report is not an experiment; use report_index")
    run_dir = run_dir_for(config, out)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / MANIFEST_NAME).unlink(missing_ok=True)
    started = _now()
    cfg_path = run_dir / "config.json"
    cfg_path.write_text(config.to_text(), encoding="utf-8")
    ctx = RunContext(run_dir, config.resolved(), config.target, np.random.default_rng(config.seed), [cfg_path])
    RUNNERS[config.subcommand](ctx)
    ctx.certification()
    arts = {str(p.relative_to(run_dir)): sha256_file(p) for p in ctx.files}
    verdicts = {c.name: {None: "n/a", True: "pass", False: "fail"}[c.passed] for c in ctx.checks}
    manifest = RunManifest(
        config.content_hash(), __version__, config.subcommand, config.target, config.seed, started, _now(),
        arts, verdicts,
    )
    manifest.write(run_dir)
    return manifest


class IndexRow(NamedTuple):
    run: str
    config_hash: str
    subcommand: str
    target: str
    started: str
    passed: int
    failed: int
    flag: str  # ok | corrupt:<reason> | missing:<file> | hash-mismatch:<file>


def report_index(results_dir) -> list[IndexRow]:
    """One row per manifest below ``results_dir``, ordered by start time then hash."""
    root = Path(results_dir)
    rows = []
    for mpath in sorted(root.rglob(MANIFEST_NAME)) if root.is_dir() else []:
        run_dir = mpath.parent
        rel = str(run_dir.relative_to(root))
        try:
            m = read_manifest(run_dir)
        except ManifestError as exc:
            rows.append(IndexRow(rel, "", "", "", "", 0, 0, f"corrupt:{exc}"))
            continue
        problems = verify_manifest(run_dir, m)
        rows.append(IndexRow(rel, m.config_hash, m.subcommand, m.target, m.started, m.passed, m.failed,
                             ";".join(problems) or "ok"))
    return sorted(rows, key=lambda r: (r.started, r.config_hash, r.run))


def write_index(rows, path) -> Path:
    return write_csv(path, IndexRow._fields, rows)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geoparallels", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="subcommand", metavar="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=name != "report", help="JSON experiment configuration")
        sp.add_argument("--out", help="results directory (overrides the configuration)")
        sp.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides the configuration)")
        if name == "einstein-check":
            sp.add_argument("--chart", help="chart name (overrides the configuration target)")
    return ap


def _print_rows(rows, stream):
    for r in rows:
        print(f"{r.started}  {r.config_hash[:12] or '-':12}  {r.subcommand or '-':15} {r.target or '-':20} "
              f"pass={r.passed} fail={r.failed}  {r.flag}  {r.run}", file=stream)


def _report(args, stream) -> int:
    results = args.out
    if args.config:
        cfg = load_config(args.config)
        if cfg.subcommand != "report":
            raise ConfigError("configuration is not a report configuration")
        results = results or cfg.target or cfg.out_dir
    rows = report_index(results or "results")
    _print_rows(rows, stream)
    return EXIT_FAIL if any(r.flag != "ok" for r in rows) else EXIT_OK


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.subcommand == "report":
            return _report(args, stream)
        cfg = load_config(args.config)
        if cfg.subcommand != args.subcommand:
            raise ConfigError(f"configuration is for {cfg.subcommand!r}, not {args.subcommand!r}")
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if getattr(args, "chart", None):
            cfg = replace(cfg, target=args.chart)
        manifest = run(cfg, args.out)
    except ConfigError as exc:
        print(f"geoparallels: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:  # computation failures are reported, not raised
        traceback.print_exc()
        return EXIT_FAIL
    run_dir = run_dir_for(cfg, args.out)
    for name, verdict in manifest.checks.items():
        print(f"{verdict:4} {name}", file=stream)
    print(f"{manifest.status}: {manifest.passed} passed, {manifest.failed} failed -> {run_dir}", file=stream)
    return EXIT_OK if manifest.status == "pass" else EXIT_FAIL

