"""
Running studies from the command line
=====================================

Every study is a ``kawahara`` subcommand.  A run writes its artifacts and a
manifest.json with the materialized configuration, per-criterion results and
the artifact list.  Exit status 0 means every criterion passed, 2 means one
failed and 1 means the run crashed.  The same calls are made here through
``kawahara.cli.run`` so the script runs without a shell.
"""

import json
import tempfile
from pathlib import Path

from kawahara.cli import run

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp)
    # Defaults: 0.1 sin x for one time unit.
    code = run(["conservation", "--out", str(out / "ok")])
    print("exit status:", code)

    # A far too large step breaks mass conservation and the run reports a failure.
    cfg = out / "coarse.json"
    cfg.write_text(json.dumps({"dt": 0.5}))
    code = run(["conservation", "--config", str(cfg), "--out", str(out / "coarse")])
    print("exit status:", code)

    manifest = json.loads((out / "coarse" / "manifest.json").read_text())
    print("status:", manifest["status"], "| dt in manifest:", manifest["config"]["dt"])
    for c in manifest["criteria"]:
        print(f"  {c['name']}: {c['value']:.3e} ({'pass' if c['passed'] else 'fail'})")
