"""Evaluation artifacts: run directories, error CSVs, the ability matrix.

Every evaluation run writes into a directory named by wall-clock timestamp
plus a short hash of the run configuration, so reruns with identical
settings sort together and differing settings never collide silently.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ParseError
from .replay import ReplayResult, style_mse

ABILITY_KEYS = ("replay_ok", "transition_ok", "interpolation_ok")

DEFAULT_THRESHOLDS = {
    "replay_mse_over_target_variance": 0.2,
    "transition_continuity_factor": 3.0,
    "interpolation_bbox_factor": 1.5,
    "classifier_self_accuracy": 0.95,
}


@dataclass
class AbilityMatrix:
    """Per-variant verdicts; None marks an evaluation that never ran."""

    abilities: dict
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))

    def __post_init__(self):
        clean = {}
        for variant, row in self.abilities.items():
            clean[variant] = {k: row.get(k) for k in ABILITY_KEYS}
        self.abilities = clean

    def to_json(self) -> str:
        return json.dumps(
            {"thresholds": self.thresholds, "variants": self.abilities},
            sort_keys=True, indent=2)

    @staticmethod
    def from_json(text: str) -> "AbilityMatrix":
        try:
            data = json.loads(text)
            return AbilityMatrix(abilities=data["variants"],
                                 thresholds=data["thresholds"])
        except (json.JSONDecodeError, KeyError, TypeError, AttributeError) \
                as exc:
            raise ParseError(f"bad ability matrix: {exc}") from exc


def _cell(value) -> str:
    if value is None:
        return "not run"
    return "Yes" if value else "No"


def format_matrix(matrix: AbilityMatrix) -> str:
    headers = ("variant", "replay", "transition", "interpolation")
    rows = [headers]
    for variant in sorted(matrix.abilities):
        row = matrix.abilities[variant]
        rows.append((variant,) + tuple(_cell(row[k]) for k in ABILITY_KEYS))
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
        for r in rows)


def config_hash(config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"),
                      default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:8]


def make_run_dir(base, config) -> Path:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    path = Path(base) / f"{stamp}-{config_hash(config)}"
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_replay_csv(run_dir, result: ReplayResult) -> Path:
    path = Path(run_dir) / f"replay_{result.style}_{result.variant}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "e"])
        for t, e in enumerate(result.errors, start=1):
            writer.writerow([t, repr(float(e))])
    return path


def write_mse_table(run_dir, results) -> Path:
    """mse_table.csv with one row per (variant, style), frame weighted."""
    by_variant: dict = {}
    for r in results:
        by_variant.setdefault(r.variant, []).append(r)
    path = Path(run_dir) / "mse_table.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "style", "mse"])
        for variant in sorted(by_variant):
            pooled = style_mse(by_variant[variant])
            for style in sorted(pooled):
                writer.writerow([variant, style, repr(pooled[style])])
    return path


def write_ability_matrix(run_dir, matrix: AbilityMatrix) -> Path:
    path = Path(run_dir) / "ability_matrix.json"
    path.write_text(matrix.to_json() + "\n")
    return path
