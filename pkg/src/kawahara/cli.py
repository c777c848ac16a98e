"""
Command-line runner: ``kawahara <experiment> --config cfg.json --out dir``.

Every run writes ``manifest.json`` into the output directory with the fully
materialized configuration, the toolkit version, per-criterion results and the
artifact list.  Wall-clock information sits under the single ``wall_clock``
key, so two runs with the same configuration and seed produce manifests that
differ only there.

Exit status: 0 when every criterion passes, 2 when a criterion fails, 1 when
the study crashes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from scipy import fft as sp_fft

from . import __version__
from .experiments import EXPERIMENTS, StudyResult, materialize, run_study
from .integrator import BlowUpError
from .io import atomic_write_json
from .rng import GENERATOR_NAME

EXIT_PASS, EXIT_CRASH, EXIT_FAIL = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kawahara", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name.replace('_', ' ')} study")
        p.add_argument("--config", type=Path, help="JSON document overriding the study defaults")
        p.add_argument("--out", type=Path, required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized studies (default 0)")
        p.add_argument("--threads", type=int, default=1, help="FFT worker threads (default 1)")
        p.add_argument("--print-config", action="store_true", help="print the materialized config and exit")
    return parser


def load_config(path: Optional[Path], experiment: str) -> dict:
    user = {}
    if path is not None:
        with open(path) as fh:
            user = json.load(fh)
        declared = user.get("experiment")
        if declared is not None and declared != experiment:
            raise ValueError(f"config declares experiment {declared!r} but {experiment!r} was requested")
    return materialize(experiment, user)


def _manifest(experiment: str, cfg: dict, seed: int, threads: int) -> dict:
    return {
        "experiment": experiment,
        "config": cfg,
        "seed": seed,
        "threads": threads,
        "generator": GENERATOR_NAME,
        "version": __version__,
    }


def _status_line(c) -> str:
    mark = "PASS" if c.passed else "FAIL"
    return f"[{mark}] {c.name}: value={c.value} {c.relation} {c.threshold}"


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.experiment)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"kawahara: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CRASH
    if args.print_config:
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return EXIT_PASS

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    manifest = _manifest(args.experiment, cfg, args.seed, args.threads)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    result: Optional[StudyResult] = None
    try:
        with sp_fft.set_workers(args.threads):
            result = run_study(args.experiment, cfg, out, args.seed)
    except Exception as exc:  # a crash still leaves a manifest behind
        error = {"type": type(exc).__name__, "message": str(exc), "traceback": traceback.format_exc()}
        if isinstance(exc, BlowUpError):
            error.update(t_last_finite=exc.t_last_finite, max_abs=exc.max_abs)
        manifest.update(status="crash", criteria=[], artifacts=[], report={}, error=error)
        code = EXIT_CRASH
        print(f"kawahara: {args.experiment} crashed: {exc}", file=sys.stderr)
    else:
        manifest.update(
            status="pass" if result.passed else "fail",
            criteria=[c.to_json() for c in result.criteria],
            artifacts=sorted(result.artifacts),
            report=result.report,
            error=None,
        )
        code = EXIT_PASS if result.passed else EXIT_FAIL
        for c in result.criteria:
            print(_status_line(c))
    manifest["wall_clock"] = {"started_utc": started, "elapsed_s": round(time.perf_counter() - t0, 3)}
    atomic_write_json(out / "manifest.json", manifest)
    print(f"{args.experiment}: {manifest['status']} (manifest at {out / 'manifest.json'})")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
