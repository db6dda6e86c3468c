"""CSV and run-manifest writers.

Floats are written with 17 significant digits so every value round-trips
exactly through text.
"""

from __future__ import annotations

import csv
import json
import math
import os
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .kernels import BACKEND

MANIFEST_NAME = "run_manifest.json"


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if value is None:
        return ""
    return str(value)


def write_csv(path, header, rows) -> str:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return str(path)


def read_csv(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        return list(reader.fieldnames or []), rows


def write_manifest(out_dir, subcommand: str, config_hash: str, seed, outputs, extra=None) -> str:
    """Write the run manifest; the timestamp lives only here."""
    data = {
        "tool": "crossfield",
        "version": __version__,
        "backend": BACKEND,
        "subcommand": subcommand,
        "config_hash": config_hash,
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "outputs": sorted(outputs),
    }
    if extra:
        data.update(extra)
    path = os.path.join(out_dir, MANIFEST_NAME)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
