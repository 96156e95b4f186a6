"""Batch command line: parse survey exports, emit report tables, classify
rationality, synthesize populations, run policy scenarios, start the HTTP
service.

Exit codes: 0 success, 1 validation problem in the inputs, 2 I/O failure,
3 internal error. Every subcommand is deterministic given its inputs and
writes only to the paths named on the command line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import NoReturn, Optional, Sequence

from . import __version__
from .biases import halo_rationality_report
from .decision import SelfEvals, rationality_report
from .errors import BadConfig, ModalSimError
from .model import Population
from .policy import BiasConfig, PolicyScenario, builtin_scenarios, run_scenario
from .reports import (
    atomic_write_bytes,
    atomic_write_text,
    crowd_source,
    halo_rescue_csv,
    rationality_csv,
    transfer_csv,
    write_stats_reports,
)
from .survey import parse_survey_csv, read_canonical_json, write_canonical_json
from .synthesis import default_config, synthesize

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3

_SCENARIO_ALIASES = {
    "free-pt": 0,
    "safe-lanes": 1,
    "city-15": 2,
}


class _Parser(argparse.ArgumentParser):
    # usage mistakes are validation failures, not the stdlib's exit code 2
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _load_population(path: str) -> Population:
    return read_canonical_json(Path(path).read_bytes())


def _load_json_file(path: str) -> object:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadConfig(f"{path} is not valid JSON: {exc}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write_text(Path(out), text)
        print(out)
    else:
        sys.stdout.write(text)


def _cmd_ingest(args: argparse.Namespace) -> int:
    schema = None
    if args.schema:
        loaded = _load_json_file(args.schema)
        if not isinstance(loaded, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in loaded.items()
        ):
            raise BadConfig(f"{args.schema}: schema map must be string-to-string")
        schema = loaded
    text = Path(args.csv).read_text(encoding="utf-8")
    pop = parse_survey_csv(text, schema_map=schema, source=str(args.csv))
    atomic_write_bytes(Path(args.out), write_canonical_json(pop))
    print(f"wrote {args.out} ({len(pop)} respondents)")
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    pop = _load_population(args.population)
    for path in write_stats_reports(pop, Path(args.out_dir)):
        print(path)
    return EXIT_OK


def _cmd_rationality(args: argparse.Namespace) -> int:
    pop = _load_population(args.population)
    src = SelfEvals() if args.evals == "self" else crowd_source(pop)
    if args.halo == "on":
        report = halo_rationality_report(pop, src)
    else:
        report = rationality_report(pop, src)
    _emit(rationality_csv(report), args.out)
    return EXIT_OK


def _cmd_halo_rescue(args: argparse.Namespace) -> int:
    pop = _load_population(args.population)
    _emit(halo_rescue_csv(pop), args.out)
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    config = default_config(args.profile, n=args.n, seed=args.seed)
    pop = synthesize(config)
    atomic_write_bytes(Path(args.out), write_canonical_json(pop))
    print(f"wrote {args.out} ({len(pop)} respondents, seed {args.seed})")
    return EXIT_OK


def _resolve_scenario(value: str) -> PolicyScenario:
    if value in _SCENARIO_ALIASES:
        return builtin_scenarios()[_SCENARIO_ALIASES[value]]
    return PolicyScenario.from_json(Path(value).read_text(encoding="utf-8"))


def _cmd_scenario(args: argparse.Namespace) -> int:
    pop = _load_population(args.population)
    scenario = _resolve_scenario(args.scenario)
    bias = BiasConfig()
    if args.bias_config:
        document = _load_json_file(args.bias_config)
        if not isinstance(document, dict):
            raise BadConfig(f"{args.bias_config}: bias config must be an object")
        bias = BiasConfig.from_document(document)
    result = run_scenario(pop, scenario, bias)
    payload = json.dumps(result.as_document(), indent=2, sort_keys=True) + "\n"
    _emit(payload, args.out)
    if args.transfer:
        atomic_write_text(Path(args.transfer), transfer_csv(result))
        print(args.transfer)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    host = args.host or os.environ.get("MODALSIM_HOST", "127.0.0.1")
    if args.port is not None:
        port = args.port
    else:
        port = int(os.environ.get("MODALSIM_PORT", "8000"))
    uvicorn.run(create_app(cors=args.cors), host=host, port=port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="modalsim",
        description=__doc__.splitlines()[0],
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="parse a survey CSV export")
    ingest.add_argument("csv", help="survey CSV file")
    ingest.add_argument("--schema", help="JSON column-name map")
    ingest.add_argument("--out", required=True, help="population JSON to write")
    ingest.set_defaults(handler=_cmd_ingest)

    stats = commands.add_parser("stats", help="emit all report tables")
    stats.add_argument("population", help="population JSON file")
    stats.add_argument("--out-dir", required=True, help="directory for CSV/JSON")
    stats.set_defaults(handler=_cmd_stats)

    rationality = commands.add_parser(
        "rationality", help="rational/irrational/constrained shares per mode"
    )
    rationality.add_argument("population", help="population JSON file")
    rationality.add_argument(
        "--evals", choices=("self", "crowd"), default="self",
        help="score on own ratings or on population medians",
    )
    rationality.add_argument(
        "--halo", choices=("on", "off"), default="off",
        help="mask each respondent's worst-rated criteria",
    )
    rationality.add_argument("--out", help="CSV path (default: stdout)")
    rationality.set_defaults(handler=_cmd_rationality)

    rescue = commands.add_parser(
        "halo-rescue",
        help="how many irrational choices each ignored criterion repairs",
    )
    rescue.add_argument("population", help="population JSON file")
    rescue.add_argument("--out", help="CSV path (default: stdout)")
    rescue.set_defaults(handler=_cmd_halo_rescue)

    synth = commands.add_parser("synth", help="generate a synthetic population")
    synth.add_argument(
        "--profile", choices=("our-sample", "france"), default="our-sample"
    )
    synth.add_argument("--n", type=int, default=650, help="population size")
    synth.add_argument("--seed", type=int, default=0, help="generator seed")
    synth.add_argument("--out", required=True, help="population JSON to write")
    synth.set_defaults(handler=_cmd_synth)

    scenario = commands.add_parser("scenario", help="run one policy scenario")
    scenario.add_argument("population", help="population JSON file")
    scenario.add_argument(
        "--scenario", required=True,
        help="free-pt | safe-lanes | city-15 | path to a scenario JSON",
    )
    scenario.add_argument("--bias-config", help="bias configuration JSON file")
    scenario.add_argument("--out", help="result JSON path (default: stdout)")
    scenario.add_argument("--transfer", help="also write the transfer grid CSV")
    scenario.set_defaults(handler=_cmd_scenario)

    serve = commands.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", help="bind address (default MODALSIM_HOST)")
    serve.add_argument(
        "--port", type=int, help="bind port (default MODALSIM_PORT)"
    )
    serve.add_argument(
        "--cors", action="store_true", help="allow cross-origin requests"
    )
    serve.set_defaults(handler=_cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ModalSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
