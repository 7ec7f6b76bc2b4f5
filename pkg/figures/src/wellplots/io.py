"""Readers for the solver CLI's file schemas, validating fail-fast."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

GRID_HEADER = ["sigma", "tau", "D"]
ROOTS_HEADER = ["index", "R", "sigma", "tau", "energy", "residual", "stability"]
SWEEP_HEADER = ["param", "track_id", "R", "status"]


class SchemaError(ValueError):
    """An input file does not match the expected CLI schema."""


def _read_csv(path: Path, expected_header: list[str]) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    if rows[0] != expected_header:
        raise SchemaError(f"{path}: header {rows[0]} does not match {expected_header}")
    return rows[1:]


def read_grid_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Grid file -> (sigma axis, tau axis, value array with NaN nulls).

    The value array is indexed [i_sigma, i_tau].
    """
    rows = _read_csv(Path(path), GRID_HEADER)
    if not rows:
        raise SchemaError(f"{path}: grid file has no data rows")
    sig = np.array([float(r[0]) for r in rows])
    tau = np.array([float(r[1]) for r in rows])
    val = np.array([float(r[2]) if r[2] != "" else np.nan for r in rows])
    sig_axis = np.unique(sig)
    tau_axis = np.unique(tau)
    if len(sig_axis) * len(tau_axis) != len(rows):
        raise SchemaError(f"{path}: rows do not form a complete rectangular grid")
    grid = np.full((len(sig_axis), len(tau_axis)), np.nan)
    i = np.searchsorted(sig_axis, sig)
    j = np.searchsorted(tau_axis, tau)
    grid[i, j] = val
    return sig_axis, tau_axis, grid


def read_roots_csv(path: str | Path) -> list[dict]:
    rows = _read_csv(Path(path), ROOTS_HEADER)
    out = []
    for r in rows:
        out.append(
            {
                "index": int(r[0]),
                "R": float(r[1]),
                "sigma": float(r[2]),
                "tau": float(r[3]),
                "energy": float(r[4]),
                "residual": float(r[5]),
                "stability": r[6],
            }
        )
    return out


def _load_json(path: Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "header" not in doc:
        raise SchemaError(f"{path}: not a solver JSON document (missing header)")
    return doc


def read_spectrum_json(path: str | Path) -> dict:
    doc = _load_json(Path(path))
    if "roots" not in doc:
        raise SchemaError(f"{path}: spectrum JSON must carry a roots list")
    for root in doc["roots"]:
        for key in ("R", "sigma", "tau", "energy"):
            if key not in root:
                raise SchemaError(f"{path}: root entry lacks {key!r}")
    return doc


def read_shallow_json(path: str | Path) -> dict:
    doc = _load_json(Path(path))
    for key in ("levels", "curve", "lines"):
        if key not in doc:
            raise SchemaError(f"{path}: shallow JSON must carry {key!r}")
    curve = doc["curve"]
    if "omega" not in curve or "y" not in curve or len(curve["omega"]) != len(curve["y"]):
        raise SchemaError(f"{path}: malformed solution curve")
    return doc
