"""Serialisation: filter snapshots, trial trace files and run manifests.

Snapshots are versioned JSON with full-precision floats, so a saved
filter reloads bit-exactly and diffs stay readable.  Traces are plain
CSV (one row per scan, trial label in the first column) so any tabular
tool can plot novelty against position.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from .harness import TrialRecord, TrialTrace
from .novelty import NoveltyFilter
from .som import SomGrid

__all__ = [
    "SNAPSHOT_VERSION", "SnapshotFormatError",
    "save_snapshot", "load_snapshot", "write_trace", "read_trace",
    "write_manifest", "config_hash",
]

SNAPSHOT_VERSION = 1
TRACE_FIELDS = ("trial", "arc_position", "winner", "distance", "novelty")


class SnapshotFormatError(ValueError):
    """Raised when a snapshot file is not in the expected format."""


def save_snapshot(filt: NoveltyFilter, destination, seed: int | None = None,
                  label: str | None = None) -> None:
    """Write the filter's complete state as versioned JSON."""
    grid = filt.grid
    doc = {
        "format": "habsom-filter",
        "version": SNAPSHOT_VERSION,
        "grid": {
            "width": grid.width,
            "height": grid.height,
            "input_dim": grid.input_dim,
            "learning_rate": grid.learning_rate,
            "neighbourhood_radius": grid.neighbourhood_radius,
            "weights": grid.weights.tolist(),
        },
        "efficacies": filt.efficacies.tolist(),
        "params": {
            "tau_winner": filt.winner_params.tau,
            "tau_neighbour": filt.neighbour_params.tau,
            "tau_forget": filt.forget_params.tau,
            "alpha": filt.winner_params.alpha,
            "y0": filt.winner_params.y0,
            "clamp_zero": filt.winner_params.clamp_zero,
            "stimulus_scale": filt.stimulus_scale,
            "forgetting_enabled": filt.forgetting_enabled,
            "learning_enabled": filt.learning_enabled,
        },
        "seed": seed,
        "label": label,
    }
    path = Path(destination)
    try:
        with path.open("w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write snapshot {path}: {exc}") from exc


def load_snapshot(source) -> NoveltyFilter:
    """Rebuild a filter from a snapshot, bit-exact."""
    path = Path(source)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read snapshot {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"{path} is not valid JSON: {exc}") from None
    if doc.get("format") != "habsom-filter":
        raise SnapshotFormatError(f"{path}: not a filter snapshot")
    if doc.get("version") != SNAPSHOT_VERSION:
        raise SnapshotFormatError(
            f"{path}: snapshot version {doc.get('version')!r} not supported "
            f"(expected {SNAPSHOT_VERSION})")
    g = doc["grid"]
    grid = SomGrid(g["weights"], g["width"], g["height"],
                   g["learning_rate"], g["neighbourhood_radius"])
    p = doc["params"]
    filt = NoveltyFilter(
        grid,
        tau_winner=p["tau_winner"], tau_neighbour=p["tau_neighbour"],
        tau_forget=p["tau_forget"], alpha=p["alpha"], y0=p["y0"],
        clamp_zero=p["clamp_zero"], forgetting_enabled=p["forgetting_enabled"],
        learning_enabled=p["learning_enabled"], stimulus_scale=p["stimulus_scale"])
    eff = doc["efficacies"]
    if len(eff) != grid.n_neurons:
        raise SnapshotFormatError(f"{path}: efficacy count does not match the grid")
    filt.efficacies[:] = eff
    return filt


def write_trace(trace: TrialTrace, destination) -> None:
    """Write one trial as CSV: header plus one row per scan."""
    path = Path(destination)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_FIELDS)
            for r in trace.records:
                writer.writerow([trace.label, repr(r.arc_position), r.winner,
                                 repr(r.distance), repr(r.novelty)])
    except OSError as exc:
        raise OSError(f"cannot write trace {path}: {exc}") from exc


def read_trace(source) -> TrialTrace:
    """Parse a trace CSV back into a TrialTrace."""
    path = Path(source)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != TRACE_FIELDS:
            raise ValueError(f"{path}: not a trace file (header {header})")
        label = ""
        records = []
        for row in reader:
            label = row[0]
            records.append(TrialRecord(float(row[1]), int(row[2]),
                                       float(row[3]), float(row[4])))
    return TrialTrace(label, records)


def config_hash(config) -> str:
    """Stable digest of a configuration dataclass or mapping."""
    if hasattr(config, "__dataclass_fields__"):
        from dataclasses import asdict
        config = asdict(config)
    blob = json.dumps(config, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def write_manifest(directory, config, entries: list[dict]) -> Path:
    """Write the run manifest: trial order, files, seed and config hash."""
    from dataclasses import asdict
    directory = Path(directory)
    doc = {
        "format": "habsom-run",
        "version": 1,
        "config": asdict(config) if hasattr(config, "__dataclass_fields__") else dict(config),
        "config_hash": config_hash(config),
        "trials": entries,
    }
    path = directory / "manifest.json"
    with path.open("w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return path
