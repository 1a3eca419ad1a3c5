"""Command-line runner.

    statewalk <experiment> [--config FILE] [--seed N] [--out DIR]
                           [--trials N] [--quiet]

Exit codes: 0 success, 1 runtime error, 2 invalid config, 3 conformance
test failure (verify-all and any experiment that emits failing reports).
Parallel trial fan-out is bounded by the STATEWALK_LANES environment
variable (default 1); outputs are identical for any lane count.
"""

from __future__ import annotations

import argparse
import copy
import sys
import traceback
from pathlib import Path

from .config import EXPERIMENTS, ConfigError, load_config, merge_config
from .experiments import REGISTRY
from .manifest import RunManifest

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_TEST_FAILURE = 3

# --trials retargets the experiment's primary sample-count knob
_TRIALS_KNOB = {
    "gaussian-overlap": ("gaussian", "pairs"),
    "sample-gue": ("spectral", "samples"),
    "sample-goe": ("spectral", "samples"),
    "walk": ("walk", "trials"),
    "constrained-walk": ("constrained", "trials"),
    "drift-walk": ("drift", "trials"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="statewalk",
        description="Random-matrix state walks and their verification suite.",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", type=str, default=None, help="JSON config file")
    p.add_argument("--seed", type=int, default=None, help="override the root seed")
    p.add_argument("--out", type=str, default=None, help="override the output directory")
    p.add_argument("--trials", type=int, default=None,
                   help="override the experiment's primary trial count")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else merge_config({})
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    cfg = copy.deepcopy(cfg)
    cfg["experiment"] = args.experiment
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out_dir"] = args.out
    if args.trials is not None:
        knob = _TRIALS_KNOB.get(args.experiment)
        if knob is None:
            print(f"note: --trials has no effect on {args.experiment}", file=sys.stderr)
        elif args.trials <= 0:
            print("config error: --trials must be > 0", file=sys.stderr)
            return EXIT_CONFIG
        else:
            cfg[knob[0]][knob[1]] = args.trials

    manifest = RunManifest(cfg)
    try:
        out = Path(cfg["out_dir"])
        out.mkdir(parents=True, exist_ok=True)
        reports = REGISTRY[args.experiment](cfg, out, manifest, quiet=args.quiet)
    except Exception:
        traceback.print_exc()
        return EXIT_RUNTIME

    status = EXIT_OK
    failed = [r for r in reports if not r.passed]
    if failed:
        status = EXIT_TEST_FAILURE
        for r in failed:
            print(f"FAILED: {r.name} (statistic {r.statistic:g}, p {r.p_value:g})",
                  file=sys.stderr)
    manifest.finish(status)
    manifest.write(out)
    if not args.quiet:
        print(f"outputs in {out} (exit {status})")
    return status


if __name__ == "__main__":
    sys.exit(main())
