"""Versioned binary parameter files.

Layout: 8-byte magic, uint32 version, uint32 header length, UTF-8 JSON
header (network metadata plus the name and shape of every array), then
each array as row-major little-endian float64 in header order.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .network import QNet, from_meta

MAGIC = b"LDGQNET\x00"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(net: QNet, path: str | Path, extra: dict | None = None) -> None:
    header = {
        "meta": net.meta(),
        "arrays": [[k, list(v.shape)] for k, v in net.params.items()],
        "extra": extra or {},
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for v in net.params.values():
            fh.write(np.ascontiguousarray(v, dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> tuple[QNet, dict]:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a parameter checkpoint")
    version, n = struct.unpack_from("<II", data, 8)
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    header = json.loads(data[16 : 16 + n])
    net = from_meta(header["meta"])
    off = 16 + n
    names = [k for k, _ in header["arrays"]]
    if names != list(net.params):
        raise CheckpointError(f"{path}: parameter names {names} do not match {list(net.params)}")
    for name, shape in header["arrays"]:
        if tuple(shape) != net.params[name].shape:
            raise CheckpointError(f"{path}: {name} has shape {tuple(shape)}, expected {net.params[name].shape}")
        size = int(np.prod(shape)) * 8
        if off + size > len(data):
            raise CheckpointError(f"{path}: truncated at {name}")
        net.params[name][...] = np.frombuffer(data, dtype="<f8", count=size // 8, offset=off).reshape(shape)
        off += size
    if off != len(data):
        raise CheckpointError(f"{path}: {len(data) - off} trailing bytes")
    return net, header.get("extra", {})
