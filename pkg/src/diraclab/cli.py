"""Command-line interface: run experiments, verify invariants, inspect files.

    diraclab run <config.json> [--output-dir DIR]
    diraclab verify
    diraclab inspect <checkpoint>

Failures print a machine-readable error JSON on stdout and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .checkpoint import CheckpointFormatError, inspect_checkpoint
from .driver import ConfigError, run_config
from .verify import verify_suite


def _fail(kind, message, keys=None, code=2):
    payload = {"error": {"type": kind, "message": str(message)}}
    if keys:
        payload["error"]["keys"] = list(keys)
    print(json.dumps(payload))
    return code


def _cmd_run(args):
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except OSError as exc:
        return _fail("io", exc)
    except json.JSONDecodeError as exc:
        return _fail("parse", f"{args.config}: {exc}")
    try:
        out = run_config(config, output_dir=args.output_dir)
    except ConfigError as exc:
        return _fail("validation", exc, keys=exc.keys)
    except (ValueError, RuntimeError) as exc:
        return _fail(type(exc).__name__, exc, code=3)
    print(json.dumps({"ok": True, "output_dir": str(out)}))
    return 0


def _cmd_verify(_args):
    ok = verify_suite(stream=sys.stdout)
    return 0 if ok else 1


def _cmd_inspect(args):
    try:
        info = inspect_checkpoint(args.checkpoint)
    except (OSError, CheckpointFormatError) as exc:
        return _fail("checkpoint", exc)
    print(json.dumps(info, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diraclab",
        description="Pseudospectral half-wave Dirac simulator and estimate probes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("config", help="path to the JSON run configuration")
    p_run.add_argument("--output-dir", default=None,
                       help="override the config's output directory")
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="run the fast invariant suite")
    p_verify.set_defaults(func=_cmd_verify)

    p_inspect = sub.add_parser("inspect", help="summarize a field checkpoint")
    p_inspect.add_argument("checkpoint")
    p_inspect.set_defaults(func=_cmd_inspect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
