"""Checkpoint container: JSON header plus raw little-endian float64 payloads.

Layout: 8-byte little-endian header length, the UTF-8 JSON header (format
version, model config, named-tensor index with shapes and offsets), then
the tensor payloads concatenated in index order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


def save_checkpoint(path: str | Path, config: dict, tensors: dict[str, np.ndarray]) -> None:
    index = []
    offset = 0
    payloads = []
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype=np.float64)
        nbytes = arr.size * 8
        index.append({"name": name, "shape": list(arr.shape), "offset": offset})
        payloads.append(arr.astype("<f8").tobytes())
        offset += nbytes
    header = json.dumps(
        {"format_version": FORMAT_VERSION, "config": config, "tensors": index},
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for blob in payloads:
            fh.write(blob)


def load_checkpoint(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        (header_len,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        if header.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {header.get('format_version')}")
        payload = fh.read()
    tensors = {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = entry["offset"]
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=start)
        if arr.size != count:
            raise ValueError(f"checkpoint payload truncated for tensor {entry['name']}")
        tensors[entry["name"]] = arr.reshape(shape).astype(np.float64)
    return header["config"], tensors
