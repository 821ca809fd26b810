"""Versioned binary checkpoints for network spec plus parameters.

Layout: 8-byte magic, u32 format version, u32 JSON descriptor length, the
descriptor (input_dim and layer list), then each parameter array as raw
little-endian float64 in declaration order. Round trips are byte-exact.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .network import (DENSE_PARAM_NAMES, GRU_PARAM_NAMES, Dense, GRU,
                      NetworkSpec, Params, param_shapes)

MAGIC = b"QNETCKPT"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def _describe(spec: NetworkSpec) -> dict:
    layers = []
    for layer in spec.layers:
        if isinstance(layer, GRU):
            layers.append(["gru", layer.units])
        else:
            layers.append(["dense", layer.units, layer.activation])
    return {"input_dim": spec.input_dim, "layers": layers}


def _spec_from_descriptor(desc: dict) -> NetworkSpec:
    layers = []
    for item in desc["layers"]:
        if item[0] == "gru":
            layers.append(GRU(units=int(item[1])))
        elif item[0] == "dense":
            layers.append(Dense(units=int(item[1]), activation=item[2]))
        else:
            raise CheckpointError(f"unknown layer kind {item[0]!r}")
    return NetworkSpec(input_dim=int(desc["input_dim"]), layers=tuple(layers))


def _param_names(layer) -> tuple[str, ...]:
    return GRU_PARAM_NAMES if isinstance(layer, GRU) else DENSE_PARAM_NAMES


def save_checkpoint(path: str | Path, spec: NetworkSpec, params: Params) -> None:
    blob = json.dumps(_describe(spec), sort_keys=True,
                      separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        for layer, layer_params in zip(spec.layers, params):
            for name in _param_names(layer):
                arr = np.ascontiguousarray(layer_params[name], dtype="<f8")
                fh.write(arr.tobytes())


def load_checkpoint(path: str | Path) -> tuple[NetworkSpec, Params]:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise CheckpointError(f"{path}: not a checkpoint file")
        version, blob_len = struct.unpack("<II", fh.read(8))
        if version != FORMAT_VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        spec = _spec_from_descriptor(json.loads(fh.read(blob_len)))
        params: Params = []
        for layer, shapes in zip(spec.layers, param_shapes(spec)):
            layer_params = {}
            for name in _param_names(layer):
                shape = shapes[name]
                count = int(np.prod(shape))
                raw = fh.read(count * 8)
                if len(raw) != count * 8:
                    raise CheckpointError(f"{path}: truncated checkpoint")
                layer_params[name] = np.frombuffer(
                    raw, dtype="<f8").astype(np.float64).reshape(shape)
            params.append(layer_params)
        if fh.read(1):
            raise CheckpointError(f"{path}: trailing bytes")
    return spec, params
