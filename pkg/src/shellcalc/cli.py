"""Command line front door.

Four batch verbs: ``stability-demo`` and ``counterexample-demo`` run one
engine each, ``convergence-report`` emits per-rung diagnostics, and
``validate-config`` parses a document and echoes its fully defaulted
normal form.  Flag overrides are applied to the document before
parsing, so the provenance block in every artifact reflects what
actually ran.

Exit codes: 0 success, 2 invalid configuration, 3 numerical
non-convergence, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

import yaml

from . import __version__
from .config import PRESET_NAMES, parse_config, preset_document
from .errors import (
    ConfigError,
    InsufficientNError,
    NonConvergedError,
    PoleProximityError,
)
from .report import run, write_convergence_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3
EXIT_INTERNAL = 4

_NONCONVERGED = (NonConvergedError, PoleProximityError, InsufficientNError)

_DEFAULT_PRESET = {
    "stability-demo": "onshell-nonzero",
    "counterexample-demo": "counterexample-default",
    "convergence-report": "counterexample-default",
}

_FORCED_MODE = {
    "stability-demo": "stability",
    "counterexample-demo": "counterexample",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shellcalc",
        description="Batch verification runs: stability ladder, counterexample model, or both.",
    )
    parser.add_argument("--version", action="version", version=f"shellcalc {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", metavar="PATH", help="YAML run configuration")
        p.add_argument(
            "--preset",
            metavar="NAME",
            choices=PRESET_NAMES,
            help=f"named preset ({', '.join(PRESET_NAMES)})",
        )
        p.add_argument("--out", metavar="DIR", help="output directory override")
        p.add_argument("--seed", type=int, metavar="INT", help="Monte-Carlo seed override")
        p.add_argument(
            "--format",
            choices=("csv", "json", "both"),
            help="output format override",
        )
        p.add_argument(
            "--workers",
            type=int,
            default=1,
            metavar="INT",
            help="Monte-Carlo worker threads (result is worker-count independent)",
        )

    for verb, text in (
        ("stability-demo", "run the stability ladder and write its report"),
        ("counterexample-demo", "run the decay model: Gram spectra and decay amplitude"),
        ("convergence-report", "emit per-rung convergence diagnostics"),
        ("validate-config", "parse a config and print its normalized form"),
    ):
        add_common(sub.add_parser(verb, help=text))
    return parser


def _load_document(args: argparse.Namespace) -> dict:
    if args.config and args.preset:
        raise ConfigError("document", "choose either --config or --preset, not both")
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError("document", f"cannot read {args.config}: {err}") from err
        loaded = yaml.safe_load(text)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("document", "top level must be a mapping")
        return loaded
    name = args.preset or _DEFAULT_PRESET.get(args.verb)
    if name is None:
        raise ConfigError("document", f"{args.verb} needs --config or --preset")
    return preset_document(name)


def _override(doc: dict, section: str, key: str, value: Any) -> None:
    # leave malformed sections alone; the parser reports them with a path
    existing = doc.get(section)
    if existing is None:
        doc[section] = {key: value}
    elif isinstance(existing, dict):
        existing[key] = value


def _apply_overrides(doc: dict, args: argparse.Namespace) -> None:
    forced = _FORCED_MODE.get(args.verb)
    if forced is not None:
        doc["mode"] = forced
    if args.out is not None:
        _override(doc, "output", "directory", args.out)
    if args.seed is not None:
        _override(doc, "mc", "seed", args.seed)
    if args.format is not None:
        formats = ["csv", "json"] if args.format == "both" else [args.format]
        _override(doc, "output", "formats", formats)


def _diagnostic(kind: str, err: Exception) -> None:
    payload = {"error": kind, "type": type(err).__name__, "detail": str(err)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = _load_document(args)
        _apply_overrides(doc, args)
        config = parse_config(doc)
    except ConfigError as err:
        _diagnostic("config", err)
        return EXIT_CONFIG

    if args.workers < 1:
        _diagnostic("config", ConfigError("workers", "must be at least 1"))
        return EXIT_CONFIG

    try:
        if args.verb == "validate-config":
            sys.stdout.write(config.serialize())
            return EXIT_OK
        if args.verb == "convergence-report":
            paths = write_convergence_report(config, workers=args.workers)
            for path in paths:
                print(f"wrote {path}")
            return EXIT_OK
        artifacts = run(config, workers=args.workers)
        for path in artifacts.paths:
            print(f"wrote {path}")
        print("summary: " + json.dumps(artifacts.summary, sort_keys=True))
        return EXIT_OK
    except _NONCONVERGED as err:
        _diagnostic("non-convergence", err)
        return EXIT_NONCONVERGED
    except ConfigError as err:
        _diagnostic("config", err)
        return EXIT_CONFIG
    except Exception as err:  # pragma: no cover - defensive
        _diagnostic("internal", err)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
