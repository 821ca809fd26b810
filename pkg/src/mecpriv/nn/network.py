"""Minimal dense/GRU network with exact backpropagation through time.

Everything is float64 and functional: parameters are a list of per-layer
dicts of arrays, forward returns an opaque cache, backward turns a cache
plus output gradients into parameter gradients of the same structure.
Inputs are shaped (T, B, D): sequence length, batch, feature dim. A hidden
state passed into forward is treated as a constant, which is what makes
truncated backpropagation a matter of calling forward per bundle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

ACTIVATIONS = ("relu", "identity")

DENSE_PARAM_NAMES = ("w", "b")
GRU_PARAM_NAMES = ("w_z", "u_z", "b_z", "w_r", "u_r", "b_r", "w_h", "u_h", "b_h")


@dataclass(frozen=True)
class Dense:
    units: int
    activation: str = "relu"


@dataclass(frozen=True)
class GRU:
    units: int


LayerSpec = Union[Dense, GRU]
Params = list[dict[str, np.ndarray]]


@dataclass(frozen=True)
class NetworkSpec:
    input_dim: int
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if not self.layers:
            raise ValueError("at least one layer required")
        for layer in self.layers:
            if layer.units < 1:
                raise ValueError("layer units must be >= 1")
            if isinstance(layer, Dense) and layer.activation not in ACTIVATIONS:
                raise ValueError(f"unknown activation {layer.activation!r}")
        last = self.layers[-1]
        if not isinstance(last, Dense) or last.activation != "identity":
            raise ValueError("last layer must be Dense with identity activation")

    @property
    def output_dim(self) -> int:
        return self.layers[-1].units

    @property
    def gru_units(self) -> list[int]:
        return [l.units for l in self.layers if isinstance(l, GRU)]

    def layer_dims(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) per layer in declaration order."""
        dims = []
        d = self.input_dim
        for layer in self.layers:
            dims.append((d, layer.units))
            d = layer.units
        return dims


def param_shapes(spec: NetworkSpec) -> list[dict[str, tuple[int, ...]]]:
    shapes = []
    for layer, (fan_in, units) in zip(spec.layers, spec.layer_dims()):
        if isinstance(layer, GRU):
            entry = {}
            for gate in ("z", "r", "h"):
                entry[f"w_{gate}"] = (fan_in, units)
                entry[f"u_{gate}"] = (units, units)
                entry[f"b_{gate}"] = (units,)
            shapes.append(entry)
        else:
            shapes.append({"w": (fan_in, units), "b": (units,)})
    return shapes


def init_params(spec: NetworkSpec, rng: np.random.Generator) -> Params:
    """Glorot-uniform kernels, zero biases, float64."""
    params = []
    for shapes in param_shapes(spec):
        layer_params = {}
        for name in (GRU_PARAM_NAMES if "w_z" in shapes else DENSE_PARAM_NAMES):
            shape = shapes[name]
            if name.startswith("b"):
                layer_params[name] = np.zeros(shape, dtype=np.float64)
            else:
                fan_in, fan_out = shape
                lim = np.sqrt(6.0 / (fan_in + fan_out))
                layer_params[name] = rng.uniform(-lim, lim, size=shape)
        params.append(layer_params)
    return params


def init_hidden(spec: NetworkSpec, batch: int) -> list[np.ndarray]:
    """Zero hidden vectors, one per GRU layer."""
    return [np.zeros((batch, u), dtype=np.float64) for u in spec.gru_units]


def clone_params(params: Params) -> Params:
    return [{k: v.copy() for k, v in layer.items()} for layer in params]


def zeros_like_params(params: Params) -> Params:
    return [{k: np.zeros_like(v) for k, v in layer.items()} for layer in params]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form: stable for any magnitude without branching
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _dense_step(p, layer: Dense, x):
    u = x @ p["w"] + p["b"]
    if layer.activation == "relu":
        return np.maximum(u, 0.0), (x, u)
    return u, (x, None)


def _gru_step(p, x, h):
    z = _sigmoid(x @ p["w_z"] + h @ p["u_z"] + p["b_z"])
    r = _sigmoid(x @ p["w_r"] + h @ p["u_r"] + p["b_r"])
    rh = r * h
    hc = np.tanh(x @ p["w_h"] + rh @ p["u_h"] + p["b_h"])
    h_new = (1.0 - z) * h + z * hc
    return h_new, (x, h, z, r, hc)


@dataclass
class Cache:
    spec: NetworkSpec
    params: Params
    layers: list  # per layer: GRU -> list of per-step tuples, Dense -> tensors
    seq_len: int
    batch: int


def forward(spec: NetworkSpec, params: Params, xs: np.ndarray,
            h0: list[np.ndarray] | None = None, collect_cache: bool = True):
    """Run the network over a (T, B, D) input sequence.

    Returns (outputs (T, B, out), final hidden list, cache or None). The
    initial hidden state defaults to zeros and is not differentiated
    through by backward. Layers are processed whole-sequence at a time:
    only GRU layers loop over timesteps, dense layers are one matmul.
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 3 or xs.shape[2] != spec.input_dim:
        raise ValueError(f"input shape {xs.shape} does not match "
                         f"(T, B, {spec.input_dim})")
    T, B, _ = xs.shape
    if h0 is None:
        h_list = init_hidden(spec, B)
    else:
        expected = spec.gru_units
        if len(h0) != len(expected) or any(
                v.shape != (B, u) for v, u in zip(h0, expected)):
            raise ValueError("hidden state shapes do not match spec")
        h_list = [v.copy() for v in h0]
    cur = xs
    h_final: list[np.ndarray] = []
    layer_caches = [] if collect_cache else None
    gi = 0
    for li, layer in enumerate(spec.layers):
        if isinstance(layer, GRU):
            h = h_list[gi]
            outs = np.empty((T, B, layer.units), dtype=np.float64)
            steps = [] if collect_cache else None
            for t in range(T):
                h, c = _gru_step(params[li], cur[t], h)
                outs[t] = h
                if collect_cache:
                    steps.append(c)
            h_final.append(h)
            gi += 1
            cur = outs
            if collect_cache:
                layer_caches.append(steps)
        else:
            cur, c = _dense_step(params[li], layer, cur)
            if collect_cache:
                layer_caches.append(c)
    cache = Cache(spec, params, layer_caches, T, B) if collect_cache else None
    return cur, h_final, cache


def forward_step(spec: NetworkSpec, params: Params, x: np.ndarray,
                 h: list[np.ndarray] | None):
    """Single-timestep forward for (B, D) input; returns (y, new hidden)."""
    out, h_new, _ = forward(spec, params, x[None, :, :], h, collect_cache=False)
    return out[0], h_new


def backward(cache: Cache, grad_out: np.ndarray) -> Params:
    """Exact gradients w.r.t. every parameter for the cached forward pass.

    grad_out holds dLoss/dOutput for each timestep, shape (T, B, out).
    Gradients through the initial hidden state are discarded.
    """
    spec, params = cache.spec, cache.params
    T = cache.seq_len
    grad_out = np.asarray(grad_out, dtype=np.float64)
    if grad_out.shape != (T, cache.batch, spec.output_dim):
        raise ValueError(f"gradient shape {grad_out.shape} does not match "
                         f"cached forward ({T}, {cache.batch}, {spec.output_dim})")
    grads = zeros_like_params(params)
    d_cur = grad_out
    for li in range(len(spec.layers) - 1, -1, -1):
        layer = spec.layers[li]
        if isinstance(layer, GRU):
            steps = cache.layers[li]
            dxs = np.empty((T, cache.batch, steps[0][0].shape[1]))
            dh_carry = np.zeros((cache.batch, layer.units))
            for t in range(T - 1, -1, -1):
                dxs[t], dh_carry = _gru_backward(params[li], grads[li],
                                                 steps[t], d_cur[t] + dh_carry)
            d_cur = dxs
        else:
            d_cur = _dense_backward(params[li], grads[li], layer,
                                    cache.layers[li], d_cur)
    return grads


def _dense_backward(p, g, layer: Dense, c, dy):
    x, u = c
    du = dy * (u > 0.0) if layer.activation == "relu" else dy
    flat_x = x.reshape(-1, x.shape[-1])
    flat_du = du.reshape(-1, du.shape[-1])
    g["w"] += flat_x.T @ flat_du
    g["b"] += flat_du.sum(axis=0)
    return du @ p["w"].T


def _gru_backward(p, g, c, dh_total):
    x, h, z, r, hc = c
    dz = dh_total * (hc - h)
    dhc = dh_total * z
    dh_prev = dh_total * (1.0 - z)

    dhin = dhc * (1.0 - hc * hc)
    g["w_h"] += x.T @ dhin
    g["b_h"] += dhin.sum(axis=0)
    drh = dhin @ p["u_h"].T
    g["u_h"] += (r * h).T @ dhin
    dx = dhin @ p["w_h"].T
    dr = drh * h
    dh_prev = dh_prev + drh * r

    dzin = dz * z * (1.0 - z)
    g["w_z"] += x.T @ dzin
    g["u_z"] += h.T @ dzin
    g["b_z"] += dzin.sum(axis=0)
    dx += dzin @ p["w_z"].T
    dh_prev = dh_prev + dzin @ p["u_z"].T

    drin = dr * r * (1.0 - r)
    g["w_r"] += x.T @ drin
    g["u_r"] += h.T @ drin
    g["b_r"] += drin.sum(axis=0)
    dx += drin @ p["w_r"].T
    dh_prev = dh_prev + drin @ p["u_r"].T
    return dx, dh_prev
