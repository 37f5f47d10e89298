"""
Snapshot files and diagnostics CSV.

A snapshot is an ASCII header followed by raw little-endian float64 data:

    MHDQ-SNAPSHOT 1
    kind quarter
    extents 1.0 0.5 1.0          (quarter-box extents)
    counts 32 16 32              (quarter-box cell counts)
    shape 32 16 32               (stored cells; n3 doubles for the half box)
    time 0.25
    components p u1 u2 u3 H1 H2 H3 S
    end

The payload is row-major over (i1, i2, i3) with the 8 components of a cell
stored together. Ghost cells are not written.
"""

import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from .diagnostics import DiagnosticRecord, history_frame
from .errors import SnapshotError
from .grid import Field, Grid
from .mhd_core import COMPONENTS, NVAR

logger = logging.getLogger(__name__)

MAGIC = "MHDQ-SNAPSHOT 1"
DTYPE = "<f8"

PathLike = Union[str, Path]


def write_snapshot(path: PathLike, f: Field, t: float) -> Path:
    path = Path(path)
    grid = f.grid
    header = [
        MAGIC,
        f"kind {grid.kind}",
        "extents " + " ".join(repr(L) for L in grid.extents),
        "counts " + " ".join(str(n) for n in grid.cells),
        "shape " + " ".join(str(m) for m in grid.shape),
        f"time {float(t)!r}",
        "components " + " ".join(COMPONENTS),
        "end",
    ]
    payload = np.ascontiguousarray(np.moveaxis(f.interior, 0, -1), dtype=DTYPE)
    with open(path, "wb") as out:
        out.write(("\n".join(header) + "\n").encode("ascii"))
        out.write(payload.tobytes())
    logger.info("wrote snapshot %s (t=%.6g)", path, t)
    return path


def _split_header(raw: bytes, path: Path) -> Tuple[dict, int]:
    fields = {}
    offset = 0
    while True:
        end = raw.find(b"\n", offset)
        if end < 0:
            raise SnapshotError(f"{path}: header is not terminated by 'end'")
        line = raw[offset:end].decode("ascii", errors="replace").strip()
        offset = end + 1
        if not fields and line != MAGIC:
            raise SnapshotError(f"{path}: not an mhdq snapshot (first line {line!r})")
        if line == "end":
            return fields, offset
        key, _, value = line.partition(" ")
        fields[key] = value.split()


def read_snapshot(path: PathLike) -> Tuple[Field, float]:
    path = Path(path)
    if not path.exists():
        raise SnapshotError(f"{path}: no such snapshot")
    raw = path.read_bytes()
    header, offset = _split_header(raw, path)
    try:
        kind = header["kind"][0]
        extents = tuple(float(v) for v in header["extents"])
        counts = tuple(int(v) for v in header["counts"])
        shape = tuple(int(v) for v in header["shape"])
        t = float(header["time"][0])
        components = tuple(header["components"])
    except (KeyError, IndexError, ValueError) as exc:
        raise SnapshotError(f"{path}: malformed header ({exc})") from exc
    if components != COMPONENTS:
        raise SnapshotError(f"{path}: unexpected component order {components}")
    try:
        grid = Grid(kind, extents, counts)
    except ValueError as exc:
        raise SnapshotError(f"{path}: {exc}") from exc
    if grid.shape != shape:
        raise SnapshotError(f"{path}: shape {shape} does not match {kind} grid {grid.shape}")
    expected = int(np.prod(shape)) * NVAR
    payload = len(raw) - offset
    if payload != expected * 8:
        raise SnapshotError(f"{path}: payload holds {payload} bytes, expected {expected * 8}")
    data = np.frombuffer(raw, dtype=DTYPE, offset=offset)
    values = np.moveaxis(data.reshape(shape + (NVAR,)), -1, 0).astype(float)
    return Field.from_interior(grid, values), t


def write_diagnostics_csv(path: PathLike, records: List[DiagnosticRecord]) -> Path:
    path = Path(path)
    history_frame(records).to_csv(path, index=False, float_format="%.17g")
    logger.info("wrote diagnostics %s (%d rows)", path, len(records))
    return path
