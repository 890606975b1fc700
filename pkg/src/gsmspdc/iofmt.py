"""Deterministic output formats for the batch CLI.

CSV files carry a header row with SI units in the column names and floats
formatted with %.12g, so identical runs are byte-identical.  Profiles are
written as binary 16-bit PGM (portable graymap, maxval 65535, row-major,
max-normalized) with a JSON sidecar holding the full parameter set.  The run
manifest lists every resolved parameter, the seed, and SHA-256 hashes of all
written files.
"""

import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = [
    "format_float",
    "write_csv",
    "write_pgm16",
    "read_pgm16",
    "write_json",
    "sha256_file",
    "write_manifest",
]


def format_float(value) -> str:
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return f"{value:.1f}"
    return f"{value:.12g}"


def write_csv(path, columns, rows):
    """Write rows (sequences matching columns) with deterministic formatting."""
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for value in row:
            if isinstance(value, (float, np.floating)):
                cells.append(format_float(float(value)))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_pgm16(path, grid):
    """Binary PGM, maxval 65535.  The grid is max-normalized before scaling."""
    grid = np.asarray(grid, dtype=float)
    peak = grid.max()
    if peak <= 0:
        raise ValueError("cannot write an all-zero image")
    scaled = np.round(grid / peak * 65535.0).astype(">u2")
    header = f"P5\n{grid.shape[1]} {grid.shape[0]}\n65535\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(scaled.tobytes(order="C"))


def read_pgm16(path):
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM file")
    parts = data.split(b"\n", 3)
    width, height = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    if maxval != 65535:
        raise ValueError(f"expected 16-bit PGM, maxval {maxval}")
    pixels = np.frombuffer(parts[3], dtype=">u2", count=width * height)
    return pixels.reshape(height, width).astype(np.uint16)


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path, payload):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="ascii")


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir, experiment, resolved, outputs):
    """Write run_manifest.json: resolved parameters plus output hashes."""
    manifest = {
        "experiment": experiment,
        "parameters": _jsonable(resolved),
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
    }
    path = Path(out_dir) / "run_manifest.json"
    write_json(path, manifest)
    return path
