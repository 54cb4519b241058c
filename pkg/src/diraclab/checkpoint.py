"""Binary field checkpoints with bit-exact round-trip.

Layout: magic "DHC1", little-endian u32 n, f64 box_length, u32 component
count, u8 representation tag (0 = physical, 1 = frequency), then each
component as row-major interleaved (re, im) float64 pairs.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import FREQUENCY, PHYSICAL, Grid2D, SpinorField

MAGIC = b"DHC1"
_HEADER = struct.Struct("<4sIdIB")
_REP_TAGS = {PHYSICAL: 0, FREQUENCY: 1}
_TAG_REPS = {v: k for k, v in _REP_TAGS.items()}


class CheckpointFormatError(ValueError):
    """The file is not a valid DHC1 checkpoint."""


def save_checkpoint(field: SpinorField, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = field.grid.n
    n_comp = field.data.shape[0]
    header = _HEADER.pack(MAGIC, n, field.grid.box_length, n_comp,
                          _REP_TAGS[field.rep])
    # interleave (re, im) row-major; complex128 memory layout is exactly that
    payload = np.ascontiguousarray(field.data).view(np.float64)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def _read_header(fh, path):
    raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise CheckpointFormatError(f"{path}: truncated header")
    magic, n, box_length, n_comp, tag = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise CheckpointFormatError(f"{path}: bad magic {magic!r}")
    if tag not in _TAG_REPS:
        raise CheckpointFormatError(f"{path}: unknown representation tag {tag}")
    return n, box_length, n_comp, tag


def load_checkpoint(path) -> SpinorField:
    path = Path(path)
    with open(path, "rb") as fh:
        n, box_length, n_comp, tag = _read_header(fh, path)
        expected = n_comp * n * n * 16
        raw = fh.read(expected + 1)
    if len(raw) != expected:
        raise CheckpointFormatError(
            f"{path}: payload has {len(raw)} bytes, expected {expected}"
        )
    data = np.frombuffer(raw, dtype=np.float64).view(np.complex128)
    data = data.reshape(n_comp, n, n)
    grid = Grid2D(n, box_length)
    return SpinorField(grid, data.copy(), _TAG_REPS[tag])


def inspect_checkpoint(path) -> dict:
    """Header summary plus basic norms, without mutating the file."""
    field = load_checkpoint(path)
    return {
        "path": str(path),
        "n": field.grid.n,
        "box_length": field.grid.box_length,
        "components": int(field.data.shape[0]),
        "representation": field.rep,
        "l2_norm": field.l2_norm(),
        "max_abs": float(np.abs(field.data).max()),
    }
