"""Config-file parsing and CSV serialization.

The config format is flat ``key=value`` text, one pair per line, with
``#`` comments. Keys mirror :class:`~rispilot.simulate.ExperimentConfig`
fields; the two angle intervals are given in degrees at this boundary
and converted to radians.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Callable, Sequence

from .errors import ConfigParseError
from .simulate import ExperimentConfig, RateCurvePoint, UtilityTrace

RATE_CSV_HEADER = (
    "L,mean_rate_ml,mean_rate_ls,mean_capacity,ratio_ml,ratio_ls,"
    "stderr_ml,stderr_ls,trials"
)
UTILITY_CSV_HEADER = "L,angle_rad,utility_db,is_argmax"


def _parse_int(raw: str) -> int:
    return int(raw.strip())

def _parse_float(raw: str) -> float:
    return float(raw.strip())

def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(part.strip()) for part in raw.split(",") if part.strip())

def _parse_degree_pair(raw: str) -> tuple[float, float]:
    parts = [part.strip() for part in raw.split(",")]
    if len(parts) != 2:
        raise ValueError("expected two comma-separated degree values")
    return (math.radians(float(parts[0])), math.radians(float(parts[1])))


#: Value parser per configuration key. Degrees are converted here so the
#: math core never sees them.
FIELD_PARSERS: dict[str, Callable[[str], object]] = {
    "num_elements": _parse_int,
    "spacing_ratio": _parse_float,
    "data_snr_db": _parse_float,
    "pilot_snr_offset_db": _parse_float,
    "pilot_budgets": _parse_int_list,
    "num_trials": _parse_int,
    "ue_angle_range": _parse_degree_pair,
    "search_domain": _parse_degree_pair,
    "grid_points": _parse_int,
    "rng_seed": _parse_int,
}


def _parse_pair(text: str, where: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigParseError(f"{where}: expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    parser = FIELD_PARSERS.get(key)
    if parser is None:
        raise ConfigParseError(
            f"{where}: unknown key {key!r} (known: {', '.join(sorted(FIELD_PARSERS))})"
        )
    try:
        return key, parser(raw)
    except ValueError as exc:
        raise ConfigParseError(f"{where}: bad value for {key!r}: {exc}") from exc


def parse_config(
    path: str | Path | None, overrides: Sequence[str] = ()
) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from an optional file plus overrides.

    Overrides are ``key=value`` strings applied after the file. With no
    file and no overrides the defaults reproduce the reference setup
    (40 elements, quarter-wavelength spacing, 10 dB pilot offset, UE
    angles within +-60 degrees, search domain +-90 degrees).
    """
    values: dict[str, object] = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            key, value = _parse_pair(stripped, f"{path}:{lineno}")
            values[key] = value
    for override in overrides:
        key, value = _parse_pair(override, f"override {override!r}")
        values[key] = value
    return ExperimentConfig(**values)


def _fmt(value: float) -> str:
    return format(value, ".6g")


def emit_rate_csv(points: Sequence[RateCurvePoint], path: str | Path) -> None:
    """Write rate-curve points as CSV, one row per budget, ascending."""
    if not points:
        raise ValueError("no rate points to write")
    lines = [RATE_CSV_HEADER]
    for p in sorted(points, key=lambda point: point.pilot_budget):
        lines.append(
            f"{p.pilot_budget},{_fmt(p.mean_rate_ml)},{_fmt(p.mean_rate_ls)},"
            f"{_fmt(p.mean_capacity)},{_fmt(p.ratio_ml)},{_fmt(p.ratio_ls)},"
            f"{_fmt(p.stderr_ml)},{_fmt(p.stderr_ls)},{p.trial_count}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def emit_utility_csv(trace: UtilityTrace, path: str | Path) -> None:
    """Write a utility trace in long format, one row per (L, angle)."""
    lines = [UTILITY_CSV_HEADER]
    for stage in trace.stages:
        for idx, (angle, value) in enumerate(zip(trace.angles, stage.utility_db)):
            marker = 1 if idx == stage.argmax_index else 0
            lines.append(
                f"{stage.pilot_count},{format(angle, '.9g')},"
                f"{format(value, '.9g')},{marker}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
