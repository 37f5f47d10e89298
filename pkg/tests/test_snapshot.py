import numpy as np
import pandas as pd
import pytest

from mhdq.diagnostics import COLUMNS, DiagnosticRecord
from mhdq.errors import SnapshotError
from mhdq.grid import Field, Grid
from mhdq.snapshot import MAGIC, read_snapshot, write_diagnostics_csv, write_snapshot

GRID = Grid("quarter", (1.0, 0.5, 1.0), (4, 3, 5))


@pytest.fixture
def field():
    values = np.random.default_rng(21).normal(size=(8,) + GRID.shape)
    return Field.from_interior(GRID, values)


def test_snapshot_preserves_field_and_time(field, tmp_path):
    path = write_snapshot(tmp_path / "s.mhdq", field, 0.1 + 0.2)
    back, t = read_snapshot(path)
    assert t == 0.1 + 0.2
    assert back.grid == GRID
    assert np.array_equal(back.interior, field.interior)


def test_half_snapshot_records_doubled_shape(field, tmp_path):
    half = Field.from_interior(GRID.half(), np.zeros((8, 4, 3, 10)))
    write_snapshot(tmp_path / "h.mhdq", half, 1.0)
    header = (tmp_path / "h.mhdq").read_bytes().split(b"end\n")[0].decode()
    assert "counts 4 3 5" in header
    assert "shape 4 3 10" in header
    assert read_snapshot(tmp_path / "h.mhdq")[0].grid.kind == "half"


def test_snapshot_layout_interleaves_components(field, tmp_path):
    path = write_snapshot(tmp_path / "s.mhdq", field, 0.0)
    raw = path.read_bytes()
    lines = raw.split(b"\n")
    assert lines[0].decode() == MAGIC
    assert lines[6].decode() == "components p u1 u2 u3 H1 H2 H3 S"
    offset = raw.index(b"end\n") + 4
    payload = np.frombuffer(raw, dtype="<f8", offset=offset)
    assert payload.size == 8 * 4 * 3 * 5
    # first cell's eight components come first
    assert np.array_equal(payload[:8], field.interior[:, 0, 0, 0])
    assert payload[8] == field.interior[0, 0, 0, 1]


def _rewrite(path, old: bytes, new: bytes):
    path.write_bytes(path.read_bytes().replace(old, new, 1))


@pytest.mark.parametrize("old,new", [
    (b"MHDQ-SNAPSHOT 1", b"NOT-A-SNAPSHOT"),
    (b"components p u1", b"components u1 p"),
    (b"shape 4 3 5", b"shape 4 3 6"),
    (b"time ", b"tiem "),
    (b"kind quarter", b"kind octant"),
    (b"end\n", b"fin\n"),
])
def test_corrupt_headers_are_rejected(field, tmp_path, old, new):
    path = write_snapshot(tmp_path / "s.mhdq", field, 0.0)
    _rewrite(path, old, new)
    with pytest.raises(SnapshotError):
        read_snapshot(path)


def test_truncated_payload_and_missing_file(field, tmp_path):
    path = write_snapshot(tmp_path / "s.mhdq", field, 0.0)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(SnapshotError, match="payload"):
        read_snapshot(path)
    with pytest.raises(SnapshotError):
        read_snapshot(tmp_path / "missing.mhdq")


def test_diagnostics_csv(tmp_path):
    records = [DiagnosticRecord(k, 0.1 * k, 0.1, 1e-9, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, float("nan"))
               for k in range(3)]
    path = write_diagnostics_csv(tmp_path / "d.csv", records)
    frame = pd.read_csv(path)
    assert list(frame.columns) == COLUMNS
    assert frame["t"].tolist() == [0.0, 0.1, 0.2]
    assert frame["parity_defect"].isna().all()
