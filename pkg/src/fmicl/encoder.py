"""Minimal differentiable encoder mapping inputs onto the unit hypersphere.

A stack of affine layers with an elementwise nonlinearity between them
(none after the last), followed by row-wise normalization onto S^{d-1}.
Gradients are exact reverse-mode, hand-derived layer by layer; the
normalization backprop uses the projector (I - z z^T)/||z|| at each row,
which annihilates the radial direction.

Parameters serialize to a flat binary container: magic ``FMICL1``, layer
count, layer widths, nonlinearity token, then row-major little-endian
float64 weights and biases per layer.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEmbedding, ParameterError

__all__ = [
    "Nonlinearity",
    "EncoderParams",
    "GradientBundle",
    "init_params",
    "forward",
    "forward_with_cache",
    "backward",
    "save_params",
    "load_params",
]

_MAGIC = b"FMICL1"
_MIN_PRENORM = 1e-12


class Nonlinearity(enum.Enum):
    RELU = "relu"
    TANH = "tanh"

    @classmethod
    def from_token(cls, token: str) -> "Nonlinearity":
        try:
            return cls(token.strip().lower())
        except ValueError as exc:
            raise ParameterError(f"unknown nonlinearity {token!r}; expected 'relu' or 'tanh'") from exc


@dataclass(frozen=True)
class EncoderParams:
    """Ordered (weight, bias) pairs plus the hidden nonlinearity.

    Weight shapes are (out, in); biases are (out,).  The final layer width
    is the embedding dimension d >= 2.  Instances are treated as immutable;
    the trainer replaces whole parameter objects rather than mutating.
    """

    layers: tuple
    nonlinearity: Nonlinearity

    def __post_init__(self):
        if not self.layers:
            raise ParameterError("encoder needs at least one affine layer")
        frozen = []
        prev_out = None
        for idx, (w, b) in enumerate(self.layers):
            w = np.array(w, dtype=float, copy=True)
            b = np.array(b, dtype=float, copy=True)
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ParameterError(f"layer {idx}: weight must be (out, in), bias (out,)")
            if prev_out is not None and w.shape[1] != prev_out:
                raise ParameterError(f"layer {idx}: input width {w.shape[1]} != previous output {prev_out}")
            prev_out = w.shape[0]
            w.flags.writeable = False
            b.flags.writeable = False
            frozen.append((w, b))
        if prev_out < 2:
            raise ParameterError("embedding dimension must be >= 2")
        object.__setattr__(self, "layers", tuple(frozen))

    @property
    def dims(self) -> tuple:
        """Layer widths [input, hidden..., output]."""
        return (self.layers[0][0].shape[1],) + tuple(w.shape[0] for w, _ in self.layers)

    @property
    def out_dim(self) -> int:
        return self.layers[-1][0].shape[0]

    def flatten(self) -> np.ndarray:
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in self.layers])

    def with_flat(self, flat: np.ndarray) -> "EncoderParams":
        """Rebuild parameters from a flat vector (same shapes)."""
        flat = np.asarray(flat, dtype=float)
        layers = []
        pos = 0
        for w, b in self.layers:
            nw, nb = w.size, b.size
            layers.append((flat[pos:pos + nw].reshape(w.shape), flat[pos + nw:pos + nw + nb]))
            pos += nw + nb
        if pos != flat.size:
            raise ParameterError(f"flat vector has {flat.size} entries, expected {pos}")
        return EncoderParams(tuple(layers), self.nonlinearity)


@dataclass(frozen=True)
class GradientBundle:
    """Per-layer (weight, bias) gradients, shapes mirroring EncoderParams."""

    layers: tuple

    def flatten(self) -> np.ndarray:
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in self.layers])


def init_params(seed: int, dims, nonlinearity: Nonlinearity = Nonlinearity.RELU) -> EncoderParams:
    """Deterministic initialization: uniform weights scaled by
    sqrt(6 / (fan_in + fan_out)), zero biases."""
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise ParameterError("dims must list input width and at least one layer width")
    if any(d < 1 for d in dims):
        raise ParameterError("all layer widths must be >= 1")
    if dims[-1] < 2:
        raise ParameterError("output width must be >= 2 for a hypersphere embedding")
    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        scale = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-scale, scale, size=(fan_out, fan_in))
        layers.append((w, np.zeros(fan_out)))
    return EncoderParams(tuple(layers), nonlinearity)


def _activation(nl: Nonlinearity, z: np.ndarray) -> np.ndarray:
    if nl is Nonlinearity.RELU:
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activation_grad(nl: Nonlinearity, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if nl is Nonlinearity.RELU:
        return (z > 0.0).astype(float)
    return 1.0 - a * a


def forward_with_cache(params: EncoderParams, inputs: np.ndarray):
    """Forward pass returning (unit-norm embeddings, cache for backward)."""
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    if x.shape[1] != params.dims[0]:
        raise ParameterError(f"input width {x.shape[1]} != encoder input width {params.dims[0]}")
    pre, post = [], [x]
    h = x
    last = len(params.layers) - 1
    for idx, (w, b) in enumerate(params.layers):
        z = h @ w.T + b
        pre.append(z)
        h = z if idx == last else _activation(params.nonlinearity, z)
        post.append(h)
    norms = np.linalg.norm(h, axis=1)
    if np.any(norms < _MIN_PRENORM):
        raise DegenerateEmbedding(
            f"{int(np.sum(norms < _MIN_PRENORM))} embedding row(s) collapsed below "
            f"{_MIN_PRENORM:g} before normalization")
    out = h / norms[:, None]
    return out, (pre, post, norms)


def forward(params: EncoderParams, inputs: np.ndarray) -> np.ndarray:
    """Encode a batch; rows of the result have unit norm."""
    out, _ = forward_with_cache(params, inputs)
    return out


def backward(params: EncoderParams, inputs: np.ndarray, grad_embeddings: np.ndarray,
             cache=None) -> GradientBundle:
    """Exact reverse-mode parameter gradients.

    ``grad_embeddings`` is d(loss)/d(embedding rows); the forward pass is
    recomputed unless a cache from :func:`forward_with_cache` is supplied.
    """
    if cache is None:
        _, cache = forward_with_cache(params, inputs)
    pre, post, norms = cache
    g = np.asarray(grad_embeddings, dtype=float)
    z = post[-1]
    zhat = z / norms[:, None]
    # Normalization Jacobian (I - zhat zhat^T)/||z|| applied row-wise.
    g = (g - zhat * np.einsum("ij,ij->i", g, zhat)[:, None]) / norms[:, None]

    last = len(params.layers) - 1
    grads = [None] * len(params.layers)
    for idx in range(last, -1, -1):
        w, _ = params.layers[idx]
        if idx != last:
            g = g * _activation_grad(params.nonlinearity, pre[idx], post[idx + 1])
        grads[idx] = (g.T @ post[idx], g.sum(axis=0))
        if idx > 0:
            g = g @ w
    return GradientBundle(tuple(grads))


def save_params(params: EncoderParams, path) -> None:
    """Write parameters to the flat binary container."""
    dims = params.dims
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(params.layers)))
        fh.write(struct.pack("<I", len(dims)))
        fh.write(struct.pack(f"<{len(dims)}I", *dims))
        token = params.nonlinearity.value.encode("ascii")
        fh.write(struct.pack("<B", len(token)))
        fh.write(token)
        for w, b in params.layers:
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_params(path) -> EncoderParams:
    """Read parameters written by :func:`save_params`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ParameterError(f"not an encoder parameter file (bad magic {magic!r})")
        (n_layers,) = struct.unpack("<I", fh.read(4))
        (n_dims,) = struct.unpack("<I", fh.read(4))
        dims = struct.unpack(f"<{n_dims}I", fh.read(4 * n_dims))
        (token_len,) = struct.unpack("<B", fh.read(1))
        nonlinearity = Nonlinearity.from_token(fh.read(token_len).decode("ascii"))
        if n_dims != n_layers + 1:
            raise ParameterError("corrupt header: dims count does not match layer count")
        layers = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            w = np.frombuffer(fh.read(8 * fan_in * fan_out), dtype="<f8").reshape(fan_out, fan_in)
            b = np.frombuffer(fh.read(8 * fan_out), dtype="<f8")
            layers.append((w.astype(float), b.astype(float)))
        return EncoderParams(tuple(layers), nonlinearity)
