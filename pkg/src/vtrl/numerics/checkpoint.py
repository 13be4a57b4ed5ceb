"""Parameter checkpoints: JSON manifest plus a little-endian float32 blob.

The manifest lists name, shape, and byte offset for every parameter in
save order; the blob holds the raw values.  Round-trips are bit-exact at
32-bit precision regardless of the in-memory dtype.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from vtrl.errors import ContractError
from vtrl.numerics.tensor import Parameter


def save_checkpoint(params, path) -> None:
    """Write <path>.json and <path>.bin for the given parameters."""
    path = Path(path)
    entries = []
    blobs = []
    offset = 0
    for p in params:
        raw = np.ascontiguousarray(p.value, dtype="<f4")
        entries.append({"name": p.name, "shape": list(p.value.shape), "offset": offset})
        blobs.append(raw.tobytes())
        offset += raw.nbytes
    manifest = {"format": "vtrl-checkpoint-v1", "params": entries, "total_bytes": offset}
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path.with_suffix(".json"), "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")
    with open(path.with_suffix(".bin"), "wb") as f:
        f.write(b"".join(blobs))


def load_checkpoint(params, path) -> None:
    """Load values into the given parameters, matching by name."""
    path = Path(path)
    with open(path.with_suffix(".json")) as f:
        manifest = json.load(f)
    blob = path.with_suffix(".bin").read_bytes()
    table = {e["name"]: e for e in manifest["params"]}
    for p in params:
        entry = table.get(p.name)
        if entry is None:
            raise ContractError(f"checkpoint missing parameter {p.name}")
        shape = tuple(entry["shape"])
        if shape != p.value.shape:
            raise ContractError(
                f"checkpoint shape {shape} != parameter {p.name} shape {p.value.shape}"
            )
        n = int(np.prod(shape)) if shape else 1
        raw = np.frombuffer(blob, dtype="<f4", count=n, offset=entry["offset"])
        p.value[...] = raw.reshape(shape).astype(p.value.dtype)
