"""On-disk formats: symbol-series CSV, report CSV/JSON, game-table JSON.

Series files are plain CSV with one column per agent and one row per
step, integer symbols only.  An optional leading comment line declares
the alphabet sizes::

    # alphabet_size: 2,2,2
    x1,x2,x3
    0,1,1

Without the declaration, each column's alphabet is inferred as one more
than its largest symbol.  Parse failures always name the 1-based line
number.

All writers go through an atomic write-then-rename so a crashed run
never leaves a truncated artifact, and floats are rendered with six
decimal places so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .game_core import GameTable
from .info_measures import JointSeries, MeasureReport, SymbolSeries

__all__ = [
    "ParseError",
    "SeriesFile",
    "parse_series_csv",
    "atomic_write_text",
    "format_float",
    "series_csv_text",
    "triadic_episode_csv_text",
    "matching_pennies_episode_csv_text",
    "measures_csv_text",
    "measures_json_payload",
    "dump_json_text",
    "game_table_payload",
    "game_table_from_payload",
]

ALPHABET_KEY = "alphabet_size"


class ParseError(ValueError):
    """A malformed input file; the message names the offending line."""


@dataclass(frozen=True)
class SeriesFile:
    """A named joint symbol series as stored on disk."""

    names: tuple[str, ...]
    series: JointSeries

    def __post_init__(self) -> None:
        if len(self.names) != self.series.n_agents:
            raise ValueError(
                f"{len(self.names)} column names for {self.series.n_agents} series"
            )


def format_float(value: float) -> str:
    """Fixed six-decimal rendering; negative zero normalises to zero."""
    text = f"{value:.6f}"
    return "0.000000" if text == "-0.000000" else text


def atomic_write_text(path: Path, content: str) -> None:
    """Write via a temporary sibling and rename, so readers never see
    partial content."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


def _parse_alphabet_comment(line: str, line_no: int) -> tuple[int, ...] | None:
    body = line.lstrip("#").strip()
    if ":" not in body:
        return None
    key, _, value = body.partition(":")
    if key.strip() != ALPHABET_KEY:
        return None
    try:
        sizes = tuple(int(part.strip()) for part in value.split(","))
    except ValueError as exc:
        raise ParseError(
            f"line {line_no}: malformed {ALPHABET_KEY} declaration: {value.strip()!r}"
        ) from exc
    if any(size < 1 for size in sizes):
        raise ParseError(f"line {line_no}: alphabet sizes must be >= 1")
    return sizes


def parse_series_csv(path: Path | str) -> SeriesFile:
    """Read a symbol-series CSV (see the module docstring for the format)."""
    path = Path(path)
    alphabet: tuple[int, ...] | None = None
    names: tuple[str, ...] | None = None
    columns: list[list[int]] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                declared = _parse_alphabet_comment(line, line_no)
                if declared is not None:
                    if names is not None:
                        raise ParseError(
                            f"line {line_no}: {ALPHABET_KEY} must precede the header"
                        )
                    alphabet = declared
                continue
            parts = [part.strip() for part in line.split(",")]
            if names is None:
                if any(not part for part in parts):
                    raise ParseError(f"line {line_no}: empty column name in header")
                if len(set(parts)) != len(parts):
                    raise ParseError(f"line {line_no}: duplicate column names")
                names = tuple(parts)
                columns = [[] for _ in names]
                continue
            if len(parts) != len(names):
                raise ParseError(
                    f"line {line_no}: expected {len(names)} fields, got {len(parts)}"
                )
            for column, part in zip(columns, parts):
                try:
                    column.append(int(part))
                except ValueError as exc:
                    raise ParseError(
                        f"line {line_no}: not an integer symbol: {part!r}"
                    ) from exc
    if names is None:
        raise ParseError("line 1: missing header row")
    if not columns[0]:
        raise ParseError(f"no data rows under header for {path}")
    if alphabet is not None and len(alphabet) != len(names):
        raise ParseError(
            f"{ALPHABET_KEY} declares {len(alphabet)} columns, header has {len(names)}"
        )
    components = []
    for position, column in enumerate(columns):
        values = np.asarray(column, dtype=np.int64)
        if values.min() < 0:
            raise ParseError(f"column {names[position]!r} has negative symbols")
        size = alphabet[position] if alphabet else int(values.max()) + 1
        if values.max() >= size:
            raise ParseError(
                f"column {names[position]!r} has symbol {int(values.max())} outside "
                f"alphabet of size {size}"
            )
        components.append(SymbolSeries(values, size))
    return SeriesFile(names, JointSeries(tuple(components)))


def series_csv_text(series_file: SeriesFile) -> str:
    """Render a joint series with the alphabet declaration and header."""
    series = series_file.series
    sizes = ",".join(str(c.alphabet_size) for c in series.components)
    lines = [f"# {ALPHABET_KEY}: {sizes}", ",".join(series_file.names)]
    stacked = np.stack([c.symbols for c in series.components], axis=1)
    for row in stacked:
        lines.append(",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def triadic_episode_csv_text(log) -> str:
    """Full per-step record of a triadic episode."""
    lines = ["step,signal,x1,coupling,x2,x3,u1,u2,u3,value"]
    for t in range(len(log)):
        fields = [
            str(t),
            str(int(log.signal[t])),
            format_float(float(log.x1[t])),
            format_float(float(log.coupling[t])),
            str(int(log.x2[t])),
            str(int(log.x3[t])),
            format_float(float(log.u1[t])),
            format_float(float(log.u2[t])),
            format_float(float(log.u3[t])),
            str(int(log.value[t])),
        ]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def matching_pennies_episode_csv_text(log) -> str:
    """Full per-trial record of a matching-pennies episode."""
    lines = ["trial,monkey,computer,monkey_reward,computer_reward"]
    for t in range(len(log)):
        fields = [
            str(t),
            str(int(log.monkey[t])),
            str(int(log.computer[t])),
            str(int(log.monkey_reward[t])),
            str(int(log.computer_reward[t])),
        ]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def measures_csv_text(
    reports: Sequence[MeasureReport], agent_names: Sequence[str]
) -> str:
    """Tabulate reports: one row per lag, joint and per-agent TDMI, excess."""
    header = ["tau", "joint_tdmi"]
    header += [f"{name}_tdmi" for name in agent_names]
    header.append("excess")
    lines = [",".join(header)]
    for report in reports:
        if len(report.per_agent_tdmi) != len(agent_names):
            raise ValueError("agent_names must match the report arity")
        fields = [str(report.tau), format_float(report.joint_tdmi)]
        fields += [format_float(part) for part in report.per_agent_tdmi]
        fields.append(format_float(report.excess))
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def measures_json_payload(
    reports: Sequence[MeasureReport], agent_names: Sequence[str]
) -> dict:
    """JSON-ready structure mirroring :func:`measures_csv_text`."""
    measures = []
    for report in reports:
        if len(report.per_agent_tdmi) != len(agent_names):
            raise ValueError("agent_names must match the report arity")
        measures.append(
            {
                "tau": report.tau,
                "joint_tdmi": report.joint_tdmi,
                "per_agent_tdmi": {
                    name: value
                    for name, value in zip(agent_names, report.per_agent_tdmi)
                },
                "excess": report.excess,
            }
        )
    return {"agents": list(agent_names), "measures": measures}


def dump_json_text(payload: dict) -> str:
    """Canonical JSON rendering: sorted keys, two-space indent."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def game_table_payload(table: GameTable) -> dict:
    """JSON-ready game table: per-player flat payoff lists.

    The flat order is the package-wide profile order (player 1 most
    significant, Cooperate before Defect), stated in the payload so files
    are self-describing.
    """
    return {
        "n_players": table.n_players,
        "profile_order": "player 1 most significant; cooperate bit 0",
        "payoffs": [[float(v) for v in row] for row in table.payoffs],
    }


def game_table_from_payload(payload: dict) -> GameTable:
    try:
        n_players = int(payload["n_players"])
        payoffs = np.asarray(payload["payoffs"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed game table payload: {exc}") from exc
    return GameTable(n_players, payoffs)
