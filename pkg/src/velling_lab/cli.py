"""``velling-lab <experiment> [--config PATH] [--out PATH] [--format json|csv] [--assert]``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from .errors import ConfigInvalid, ExperimentUnknown, IoFailure, VellingLabError
from .experiments import EXPERIMENTS, ExperimentConfig, GridConfig, run_experiment
from .report import emit_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_INTERNAL = 4

# config fields whose flag value is parsed as JSON
_JSON_FIELDS = {"q_coeffs", "fourier_coeffs", "n_range", "radii"}
_SCALAR_TYPES = {"order": int, "fd_step": float, "j_max": int, "samples": int, "seed": int, "normalizer": float}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="velling-lab", description="Run a named numerical experiment and write a report.")
    p.add_argument("experiment", help=f"one of: {', '.join(EXPERIMENTS)}")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--assert", dest="assert_mode", action="store_true", help="exit 3 when a check misses its tolerance")
    over = p.add_argument_group("config overrides")
    for f in fields(ExperimentConfig):
        if f.name in ("experiment", "grid"):
            continue
        over.add_argument(_flag(f.name), dest=f.name, default=None, metavar=f.name.upper())
    for f in fields(GridConfig):
        over.add_argument(_flag(f.name), dest=f"grid.{f.name}", default=None, metavar=f.name.upper())
    return p


def _parse_value(name: str, text: str):
    try:
        if name in _JSON_FIELDS:
            return json.loads(text)
        if name in _SCALAR_TYPES:
            return _SCALAR_TYPES[name](text)
        if name.startswith("grid."):
            return float(text) if name == "grid.r_max" else int(text)
    except ValueError as exc:
        raise ConfigInvalid(f"bad value for {_flag(name.split('.')[-1])}: {text!r}") from exc
    return text


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigInvalid(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a JSON object")
    data["experiment"] = args.experiment
    for key, text in vars(args).items():
        if text is None or key in ("experiment", "config", "out", "format", "assert_mode"):
            continue
        value = _parse_value(key, text)
        if key.startswith("grid."):
            grid = data.setdefault("grid", {})
            if not isinstance(grid, dict):
                raise ConfigInvalid("grid must be an object")
            grid[key[5:]] = value
        else:
            data[key] = value
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.experiment not in EXPERIMENTS:
            raise ExperimentUnknown(f"unknown experiment {args.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        config = load_config(args)
        report = run_experiment(config)
        out = args.out or config.output_path
        text = emit_report(report, args.format, out)
    except (ConfigInvalid, ExperimentUnknown) as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IoFailure as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except VellingLabError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"error[internal.{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if not out:
        sys.stdout.write(text)
    if args.assert_mode:
        failed = [name for name, c in report.checks.items() if not c.passed]
        for name in failed:
            print(f"FAIL {report.experiment} {name}", file=sys.stderr)
        if failed:
            return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
