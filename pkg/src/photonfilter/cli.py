"""Command line front end.

One subcommand per experiment kind.  Each accepts an optional JSON config
file (its ``kind`` must match the subcommand) and an output directory
override, writes the data files, plot script and manifest, and prints one
line per output.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (EXPERIMENT_KINDS, ExperimentConfig, default_config,
                          run)

_DESCRIPTIONS = {
    "filter-curves": "tabulate photon-number filter functions",
    "sharpen": "sharpen a coherent field by repeated lower-state detections",
    "q-sweep": "sweep the coupling amplitude and record the Mandel Q",
    "detuning-sensitivity": "compare pulse families off resonance",
    "feasibility": "estimate interaction versus loss timescales",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonfilter",
        description="Photon-number filtering by two-level atoms in flight.")
    parser.add_argument(
        "--seedless", action="store_true",
        help="accepted for pipeline compatibility; runs are deterministic "
             "by construction and use no random numbers")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=_DESCRIPTIONS[kind])
        p.add_argument("config", nargs="?", default=None,
                       help="JSON config file (defaults are used if omitted)")
        p.add_argument("--out", default=None,
                       help="output directory (overrides the config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            cfg = ExperimentConfig.from_file(args.config)
            if cfg.kind != args.kind:
                raise ValueError(
                    f"config kind {cfg.kind!r} does not match "
                    f"subcommand {args.kind!r}")
        else:
            cfg = default_config(args.kind)
        if args.out is not None:
            cfg = ExperimentConfig.from_dict({**cfg.to_dict(),
                                              "out_dir": args.out})
        record = run(cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for name, digest in record.outputs:
        print(f"wrote {cfg.out_dir}/{name}  sha256={digest[:12]}")
    print(f"manifest: {cfg.out_dir}/manifest.json  "
          f"({record.duration_seconds:.2f} s)")
    if not record.convergence_ok:
        print("warning: some curves did not converge; see manifest notes",
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
