"""Command-line front end.

Four subcommands::

    citom simulate-triadic --mode {a,b} [--steps N] [--delay D] [--seed S]
                           [--taus LIST] --out DIR
    citom simulate-mp      --algo {0,1,2} [--steps N] [--seed S]
                           [--taus LIST] --out DIR
    citom measure          --input series.csv [--taus LIST] --out DIR
    citom pikl-demo        [--config config.json]
                           [--mode {diagnostic,coupled}] --out DIR

The simulate commands write ``episode.csv``, ``series.csv``,
``measures.csv`` and ``measures.json`` into the output directory;
``measure`` writes the two measure files for an externally supplied
series; ``pikl-demo`` writes ``report.json``.  Each command prints a
summary table (lag, joint TDMI, per-agent TDMI, excess) to stdout.

Exit status: 0 on success, 2 on usage errors (bad flags or values), 1 on
runtime failures (unreadable or malformed files).  Given the same
configuration and seed, two invocations produce byte-identical
artifacts.
"""

from __future__ import annotations

import argparse
import copy
import dataclasses
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .info_measures import MeasureReport, excess_tdmi
from .io import (
    ParseError,
    SeriesFile,
    atomic_write_text,
    dump_json_text,
    format_float,
    matching_pennies_episode_csv_text,
    measures_csv_text,
    measures_json_payload,
    parse_series_csv,
    series_csv_text,
    triadic_episode_csv_text,
)
from .scenarios import (
    MatchingPenniesConfig,
    TriadicConfig,
    measure_log,
    run_matching_pennies,
    run_triadic,
)
from .tom_policy import (
    BeliefState,
    Channel,
    LatentTypeSpace,
    ObjectiveMode,
    ObjectiveParams,
    Policy,
    anchor_objective,
    bayes_update,
    induced_message_policy,
    message_expected_utilities,
    pikl_best_response,
    tom_divergence,
    unified_objective,
)

__all__ = ["main", "build_parser", "run_pikl_demo", "PIKL_DEMO_DEFAULTS"]


def _parse_taus(text: str) -> tuple[int, ...]:
    try:
        taus = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"lags must be comma-separated integers, got {text!r}"
        )
    if not taus:
        raise argparse.ArgumentTypeError("at least one lag is required")
    return taus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citom",
        description="Simulate multi-agent episodes and measure their excess "
        "time-delayed mutual information.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    triadic = commands.add_parser(
        "simulate-triadic",
        help="run the orchestrated triad and measure the log",
    )
    triadic.add_argument("--mode", choices=("a", "b"), required=True,
                         help="a: signal reporting only; b: game reconfiguration")
    triadic.add_argument("--steps", type=int, default=100_000)
    triadic.add_argument("--delay", type=int, default=1,
                         help="steps between emission and the workers' response")
    triadic.add_argument("--seed", type=int, default=0)
    triadic.add_argument("--taus", type=_parse_taus, default=(1, 2, 3),
                         help="comma-separated lags, e.g. 1,2,3")
    triadic.add_argument("--out", required=True, help="output directory")
    triadic.set_defaults(handler=_cmd_simulate_triadic)

    pennies = commands.add_parser(
        "simulate-mp",
        help="run matching pennies and measure the log",
    )
    pennies.add_argument("--algo", type=int, choices=(0, 1, 2), required=True,
                         help="computer opponent escalation level")
    pennies.add_argument("--steps", type=int, default=10_000)
    pennies.add_argument("--seed", type=int, default=0)
    pennies.add_argument("--taus", type=_parse_taus, default=(1, 2, 3))
    pennies.add_argument("--out", required=True, help="output directory")
    pennies.set_defaults(handler=_cmd_simulate_mp)

    measure = commands.add_parser(
        "measure",
        help="measure an existing symbol-series CSV",
    )
    measure.add_argument("--input", required=True, help="series CSV path")
    measure.add_argument("--taus", type=_parse_taus, default=(1, 2, 3))
    measure.add_argument("--out", required=True, help="output directory")
    measure.set_defaults(handler=_cmd_measure)

    demo = commands.add_parser(
        "pikl-demo",
        help="belief updates, message selection and anchored objectives "
        "on a small worked instance",
    )
    demo.add_argument("--config", default=None,
                      help="JSON overriding the built-in demo instance")
    demo.add_argument("--mode", choices=("diagnostic", "coupled"),
                      default="diagnostic")
    demo.add_argument("--out", required=True, help="output directory")
    demo.set_defaults(handler=_cmd_pikl_demo)

    return parser


def format_measure_table(
    reports: Sequence[MeasureReport], agent_names: Sequence[str]
) -> str:
    """Fixed-width summary: one row per lag, excess in the last column."""
    header = ["tau", "joint_tdmi", *(f"{name}_tdmi" for name in agent_names), "excess"]
    rows = [header]
    for report in reports:
        rows.append(
            [
                str(report.tau),
                format_float(report.joint_tdmi),
                *(format_float(part) for part in report.per_agent_tdmi),
                format_float(report.excess),
            ]
        )
    widths = [max(len(row[col]) for row in rows) for col in range(len(header))]
    lines = [
        "  ".join(cell.rjust(width) for cell, width in zip(row, widths))
        for row in rows
    ]
    return "\n".join(lines)


def _write_measures(
    outdir: Path,
    reports: Sequence[MeasureReport],
    agent_names: Sequence[str],
    config_payload: dict,
) -> None:
    atomic_write_text(outdir / "measures.csv", measures_csv_text(reports, agent_names))
    payload = measures_json_payload(reports, agent_names)
    payload["config"] = config_payload
    atomic_write_text(outdir / "measures.json", dump_json_text(payload))


def _prepare_outdir(raw: str) -> Path:
    outdir = Path(raw)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


def _finish_measured_run(
    outdir: Path,
    reports: Sequence[MeasureReport],
    agent_names: Sequence[str],
    config_payload: dict,
) -> int:
    _write_measures(outdir, reports, agent_names, config_payload)
    print(format_measure_table(reports, agent_names))
    print(f"wrote {outdir / 'measures.csv'} and {outdir / 'measures.json'}")
    return 0


def _cmd_simulate_triadic(args, parser: argparse.ArgumentParser) -> int:
    try:
        config = TriadicConfig(
            mode=args.mode,
            steps=args.steps,
            seed=args.seed,
            delay=args.delay,
            taus=args.taus,
        )
    except ValueError as exc:
        parser.error(str(exc))
    log = run_triadic(config)
    reports = measure_log(log)
    outdir = _prepare_outdir(args.out)
    atomic_write_text(outdir / "episode.csv", triadic_episode_csv_text(log))
    series = SeriesFile(log.agent_names, log.joint_series())
    atomic_write_text(outdir / "series.csv", series_csv_text(series))
    return _finish_measured_run(
        outdir, reports, log.agent_names, dataclasses.asdict(config)
    )


def _cmd_simulate_mp(args, parser: argparse.ArgumentParser) -> int:
    try:
        config = MatchingPenniesConfig(
            algorithm_id=args.algo,
            steps=args.steps,
            seed=args.seed,
            taus=args.taus,
        )
    except ValueError as exc:
        parser.error(str(exc))
    log = run_matching_pennies(config)
    reports = measure_log(log)
    outdir = _prepare_outdir(args.out)
    atomic_write_text(outdir / "episode.csv", matching_pennies_episode_csv_text(log))
    series = SeriesFile(log.agent_names, log.joint_series())
    atomic_write_text(outdir / "series.csv", series_csv_text(series))
    return _finish_measured_run(
        outdir, reports, log.agent_names, dataclasses.asdict(config)
    )


def _cmd_measure(args, parser: argparse.ArgumentParser) -> int:
    series_file = parse_series_csv(args.input)
    length = len(series_file.series)
    for tau in args.taus:
        if not 1 <= tau < length:
            parser.error(f"lag {tau} needs a series longer than {length} steps")
    reports = tuple(excess_tdmi(series_file.series, tau) for tau in args.taus)
    outdir = _prepare_outdir(args.out)
    config_payload = {"input": str(args.input), "taus": list(args.taus)}
    return _finish_measured_run(outdir, reports, series_file.names, config_payload)


PIKL_DEMO_DEFAULTS: dict = {
    "type_labels": ["aligned", "adversarial"],
    "prior": [0.5, 0.5],
    "channel": [[0.8, 0.2], [0.2, 0.8]],
    "conditional_policy": [[[0.9, 0.1]], [[0.2, 0.8]]],
    "anchor_policy": [[0.5, 0.5]],
    "q_values": [[1.0, 0.0]],
    "rewards": None,
    "state_distribution": [1.0],
    "lambda_anchor": 1.0,
    "lambda_tom": 1.0,
    "speaker_utility": [[1.0, 0.0], [0.0, 1.0]],
    "receiver_type_belief": [0.6, 0.4],
    "state": 0,
}


def load_pikl_config(path: str | None) -> dict:
    """Built-in demo instance, optionally overridden by a JSON file."""
    config = copy.deepcopy(PIKL_DEMO_DEFAULTS)
    if path is not None:
        try:
            overrides = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(overrides, dict):
            raise ParseError(f"{path}: top level must be a JSON object")
        unknown = sorted(set(overrides) - set(config))
        if unknown:
            raise ParseError(f"{path}: unknown config keys: {', '.join(unknown)}")
        config.update(overrides)
    return config


def run_pikl_demo(config: dict, mode: ObjectiveMode) -> dict:
    """Work one instance end to end and return the JSON-ready report.

    Covers the whole pipeline: posterior per message, induced partner
    mixtures, message selection, the anchored best response per state,
    and the anchored/unified objective values of that response.
    """
    space = LatentTypeSpace(
        np.asarray(config["prior"], dtype=np.float64),
        tuple(config["type_labels"]) if config.get("type_labels") else None,
    )
    channel = Channel(np.asarray(config["channel"], dtype=np.float64))
    conditional = Policy(np.asarray(config["conditional_policy"], dtype=np.float64), "tsa")
    state = int(config["state"])
    belief = BeliefState(np.asarray(config["receiver_type_belief"], dtype=np.float64))
    speaker_utility = np.asarray(config["speaker_utility"], dtype=np.float64)

    utilities = message_expected_utilities(
        space, channel, conditional, state, speaker_utility, belief
    )
    selected = int(np.argmax(utilities))
    induced = induced_message_policy(space, channel, conditional)

    params = ObjectiveParams(
        q_values=np.asarray(config["q_values"], dtype=np.float64),
        rewards=(
            None
            if config.get("rewards") is None
            else np.asarray(config["rewards"], dtype=np.float64)
        ),
        lambda_anchor=float(config["lambda_anchor"]),
        lambda_tom=float(config["lambda_tom"]),
    )
    anchor = Policy(np.asarray(config["anchor_policy"], dtype=np.float64), "sa")
    pikl_rows = np.stack(
        [
            pikl_best_response(params.q_values[s], anchor.table[s], params.lambda_anchor)
            for s in range(params.q_values.shape[0])
        ]
    )
    pikl_policy = Policy(pikl_rows, "sa")
    partner = Policy(induced.table[:, selected, :], "sa")
    state_distribution = np.asarray(config["state_distribution"], dtype=np.float64)

    greedy = Policy.greedy(params.q_values)
    report = {
        "mode": mode.value,
        "state": state,
        "posterior_by_message": [
            [float(v) for v in bayes_update(space, channel, m).posterior]
            for m in range(channel.n_messages)
        ],
        "receiver_mixture_by_message": [
            [float(v) for v in induced.table[state, m]]
            for m in range(channel.n_messages)
        ],
        "message_expected_utility": [float(v) for v in utilities],
        "selected_message": selected,
        "tom_divergence_bits_by_message": [
            tom_divergence(greedy, induced, state, m) for m in range(channel.n_messages)
        ],
        "pikl_policy": [[float(v) for v in row] for row in pikl_rows],
        "anchor_objective": anchor_objective(
            pikl_policy, params, anchor, state_distribution
        ),
        "unified_objective": unified_objective(
            pikl_policy, params, anchor, partner, state_distribution, mode
        ),
        "config": config,
    }
    return report


def _cmd_pikl_demo(args, parser: argparse.ArgumentParser) -> int:
    config = load_pikl_config(args.config)
    mode = ObjectiveMode(args.mode)
    report = run_pikl_demo(config, mode)
    outdir = _prepare_outdir(args.out)
    atomic_write_text(outdir / "report.json", dump_json_text(report))
    print(f"selected message: {report['selected_message']}")
    print(
        "message expected utilities: "
        + ", ".join(format_float(v) for v in report["message_expected_utility"])
    )
    print(f"anchor objective: {format_float(report['anchor_objective'])}")
    print(
        f"unified objective ({mode.value}): "
        + format_float(report["unified_objective"])
    )
    print(f"wrote {outdir / 'report.json'}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
