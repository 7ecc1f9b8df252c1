"""Frozen random subnetworks and analytic forward-mode jets.

A subnetwork maps ``d`` input coordinates to ``p`` feature functions.  Its
weights are drawn once from a seeded generator and never trained.  Besides
values, :func:`eval_jets` propagates the first partials and the *pure*
second partials ``d^2/dx_i^2`` of every output through the layers, one
input coordinate at a time.

Supported architectures (``tanh`` activation throughout):

* ``ELM``    -- one hidden layer, features ``tanh(W x + b)``.
* ``MLP``    -- ``L`` tanh hidden layers followed by a linear output layer.
* ``ResNet`` -- hidden layers ``y = tanh(tanh(W y + b) + H(y))`` where ``H``
  is the identity when widths agree and a linear projection otherwise;
  linear output layer.
* ``HLConc`` -- two tanh hidden layers whose activations are concatenated.
"""
from __future__ import annotations

import enum
import io
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidSpecError, NumericOverflowError, ShapeError

SEED_SPLIT_CONSTANT = 0x9E3779B97F4A7C15
_U64 = (1 << 64) - 1


class Architecture(enum.Enum):
    ELM = 1
    MLP = 2
    ResNet = 3
    HLConc = 4


class InitScheme(enum.Enum):
    Kaiming = 1
    Xavier = 2


def _coerce_enum(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    if isinstance(value, str):
        for member in enum_cls:
            if member.name.lower() == value.lower():
                return member
    raise InvalidSpecError(f"unknown {enum_cls.__name__}: {value!r}")


@dataclass(frozen=True)
class SubnetworkSpec:
    architecture: Architecture
    input_dim: int
    layer_widths: tuple
    init_scheme: InitScheme = InitScheme.Kaiming
    seed: int = 0
    activation: str = "tanh"

    def __post_init__(self):
        object.__setattr__(self, "architecture", _coerce_enum(Architecture, self.architecture))
        object.__setattr__(self, "init_scheme", _coerce_enum(InitScheme, self.init_scheme))
        object.__setattr__(self, "layer_widths", tuple(int(w) for w in self.layer_widths))
        object.__setattr__(self, "seed", int(self.seed) & _U64)
        self.validate()

    def validate(self):
        if self.activation != "tanh":
            raise InvalidSpecError(f"unsupported activation {self.activation!r}")
        if int(self.input_dim) < 1:
            raise InvalidSpecError("input_dim must be positive")
        if not self.layer_widths or any(w < 1 for w in self.layer_widths):
            raise InvalidSpecError(f"layer widths must be positive, got {self.layer_widths}")
        n = len(self.layer_widths)
        arch = self.architecture
        if arch is Architecture.ELM and n != 1:
            raise InvalidSpecError("ELM takes exactly one layer width")
        if arch in (Architecture.MLP, Architecture.ResNet) and n < 2:
            raise InvalidSpecError(f"{arch.name} needs at least one hidden and one output layer")
        if arch is Architecture.HLConc and n != 2:
            raise InvalidSpecError("HLConc has exactly two hidden layers")

    @property
    def output_width(self) -> int:
        if self.architecture is Architecture.HLConc:
            return sum(self.layer_widths)
        return self.layer_widths[-1]

    @classmethod
    def default(cls, architecture, input_dim, p, init_scheme="kaiming", seed=0):
        """Default widths: ELM ``[p]``, MLP/ResNet ``[p]*4``, HLConc ``[p//2, p - p//2]``."""
        arch = _coerce_enum(Architecture, architecture)
        if arch is Architecture.ELM:
            widths = (p,)
        elif arch is Architecture.HLConc:
            widths = (p // 2, p - p // 2)
        else:
            widths = (p, p, p, p)
        return cls(arch, input_dim, widths, init_scheme, seed)


@dataclass(frozen=True)
class Layer:
    weight: np.ndarray
    bias: np.ndarray
    proj_weight: Optional[np.ndarray] = None
    proj_bias: Optional[np.ndarray] = None

    def arrays(self):
        out = [self.weight, self.bias]
        if self.proj_weight is not None:
            out += [self.proj_weight, self.proj_bias]
        return out


@dataclass(frozen=True)
class SubnetworkParams:
    spec: SubnetworkSpec
    layers: tuple

    @property
    def n_params(self) -> int:
        return sum(a.size for layer in self.layers for a in layer.arrays())


def split_seed(master: int):
    """Seeds of the two tensor-product factors derived from one master seed."""
    master = int(master) & _U64
    return master, master ^ SEED_SPLIT_CONSTANT


def _layer_shapes(spec: SubnetworkSpec):
    """Yield ``(fan_in, fan_out, needs_projection)`` per layer."""
    prev = spec.input_dim
    n = len(spec.layer_widths)
    for i, width in enumerate(spec.layer_widths):
        hidden = spec.architecture is not Architecture.ResNet or i < n - 1
        proj = spec.architecture is Architecture.ResNet and hidden and width != prev
        yield prev, width, proj
        prev = width


def _draw(rng, scheme, fan_in, fan_out):
    if scheme is InitScheme.Kaiming:
        w = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
        b = np.zeros(fan_out)
    else:
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        b = rng.uniform(-bound, bound, size=fan_out)
    return w, b


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def init_subnetwork(spec: SubnetworkSpec) -> SubnetworkParams:
    """Draw frozen weights for ``spec``; bit-identical for a fixed seed."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    layers = []
    for fan_in, fan_out, proj in _layer_shapes(spec):
        w, b = _draw(rng, spec.init_scheme, fan_in, fan_out)
        pw = pb = None
        if proj:
            pw, pb = _draw(rng, spec.init_scheme, fan_in, fan_out)
            pw, pb = _freeze(pw), _freeze(pb)
        layers.append(Layer(_freeze(w), _freeze(b), pw, pb))
    return SubnetworkParams(spec, tuple(layers))


@dataclass
class JetBatch:
    """Values, gradients and pure second partials of a feature map.

    ``values`` is ``(N, p)``; ``grad`` and ``diag2`` are ``(N, p, d)``.
    """

    values: np.ndarray
    grad: np.ndarray
    diag2: np.ndarray

    @property
    def n_points(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def dim(self):
        return self.grad.shape[2]

    def axis_grad(self, i):
        return self.grad[:, :, i]

    def axis_diag2(self, i):
        return self.diag2[:, :, i]

    def scaled(self, c):
        return JetBatch(c * self.values, c * self.grad, c * self.diag2)


# Internally derivatives are carried as (d, N, m) stacks so that every
# layer is a plain matmul over the flattened leading axes.

def _affine(y, gy, hy, w, b):
    z = y @ w.T + b
    gz = gy @ w.T
    hz = hy @ w.T
    return z, gz, hz


def _tanh(z, gz, hz):
    a = np.tanh(z)
    da = 1.0 - a * a
    dda = -2.0 * a * da
    ga = da * gz
    ha = dda * gz * gz + da * hz
    return a, ga, ha


def _check_finite(layer_index, *arrays):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NumericOverflowError(f"non-finite values produced in layer {layer_index}", layer=layer_index)


def _first_affine(x, w, b):
    # dz/dx_i is the i-th weight column for every point; second partials vanish.
    n, d = x.shape
    z = x @ w.T + b
    gz = np.broadcast_to(w.T[:, None, :], (d, n, w.shape[0])).copy()
    hz = np.zeros_like(gz)
    return z, gz, hz


def _input_grad(x):
    n, d = x.shape
    g = np.zeros((d, n, d))
    for i in range(d):
        g[i, :, i] = 1.0
    return g


def eval_jets(spec: SubnetworkSpec, params: SubnetworkParams, points) -> JetBatch:
    """Evaluate outputs and their per-coordinate first/second partials."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] != spec.input_dim:
        raise ShapeError(f"points must be (N, {spec.input_dim}), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ShapeError("points must be finite")
    if len(params.layers) != len(spec.layer_widths):
        raise ShapeError("params do not match spec")

    arch = spec.architecture
    n_layers = len(params.layers)
    y = x
    gy = hy = None
    collected = []
    for idx, layer in enumerate(params.layers, start=1):
        if gy is None:
            z, gz, hz = _first_affine(y, layer.weight, layer.bias)
        else:
            z, gz, hz = _affine(y, gy, hy, layer.weight, layer.bias)
        is_output = arch in (Architecture.MLP, Architecture.ResNet) and idx == n_layers
        if is_output:
            y, gy, hy = z, gz, hz
        elif arch is Architecture.ResNet:
            a, ga, ha = _tanh(z, gz, hz)
            if layer.proj_weight is not None:
                if gy is None:
                    s, gs, hs = _first_affine(y, layer.proj_weight, layer.proj_bias)
                else:
                    s, gs, hs = _affine(y, gy, hy, layer.proj_weight, layer.proj_bias)
            elif gy is None:
                s, gs, hs = y, _input_grad(y), np.zeros((y.shape[1],) + y.shape)
            else:
                s, gs, hs = y, gy, hy
            y, gy, hy = _tanh(a + s, ga + gs, ha + hs)
        else:
            y, gy, hy = _tanh(z, gz, hz)
        _check_finite(idx, y, gy, hy)
        if arch is Architecture.HLConc:
            collected.append((y, gy, hy))

    if arch is Architecture.HLConc:
        y = np.concatenate([c[0] for c in collected], axis=1)
        gy = np.concatenate([c[1] for c in collected], axis=2)
        hy = np.concatenate([c[2] for c in collected], axis=2)
    return JetBatch(y, np.moveaxis(gy, 0, 2), np.moveaxis(hy, 0, 2))


def eval_values(spec: SubnetworkSpec, params: SubnetworkParams, points) -> np.ndarray:
    """Forward pass without derivatives."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    arch = spec.architecture
    n_layers = len(params.layers)
    y = x
    collected = []
    for idx, layer in enumerate(params.layers, start=1):
        z = y @ layer.weight.T + layer.bias
        if arch in (Architecture.MLP, Architecture.ResNet) and idx == n_layers:
            y = z
        elif arch is Architecture.ResNet:
            s = y if layer.proj_weight is None else y @ layer.proj_weight.T + layer.proj_bias
            y = np.tanh(np.tanh(z) + s)
        else:
            y = np.tanh(z)
        if arch is Architecture.HLConc:
            collected.append(y)
    if arch is Architecture.HLConc:
        y = np.concatenate(collected, axis=1)
    return y


# -- binary container ------------------------------------------------------

_MAGIC = b"TPSN"
_VERSION = 1


def params_to_bytes(params: SubnetworkParams) -> bytes:
    """Header (arch, d, widths, init, seed) followed by little-endian float64 blocks."""
    spec = params.spec
    buf = io.BytesIO()
    buf.write(_MAGIC)
    buf.write(struct.pack("<BBBI", _VERSION, spec.architecture.value, spec.init_scheme.value, spec.input_dim))
    buf.write(struct.pack("<I", len(spec.layer_widths)))
    buf.write(struct.pack(f"<{len(spec.layer_widths)}I", *spec.layer_widths))
    buf.write(struct.pack("<Q", spec.seed))
    for layer in params.layers:
        for arr in layer.arrays():
            buf.write(np.ascontiguousarray(arr, dtype="<f8").tobytes(order="C"))
    return buf.getvalue()


def params_from_bytes(data: bytes) -> SubnetworkParams:
    view = memoryview(data)
    if bytes(view[:4]) != _MAGIC:
        raise InvalidSpecError("not a subnetwork container")
    off = 4
    version, arch_id, init_id, d = struct.unpack_from("<BBBI", view, off)
    off += struct.calcsize("<BBBI")
    if version != _VERSION:
        raise InvalidSpecError(f"unsupported container version {version}")
    (n,) = struct.unpack_from("<I", view, off)
    off += 4
    widths = struct.unpack_from(f"<{n}I", view, off)
    off += 4 * n
    (seed,) = struct.unpack_from("<Q", view, off)
    off += 8
    spec = SubnetworkSpec(Architecture(arch_id), d, widths, InitScheme(init_id), seed)

    def take(shape):
        nonlocal off
        count = int(np.prod(shape))
        arr = np.frombuffer(view, dtype="<f8", count=count, offset=off).reshape(shape)
        off += 8 * count
        return _freeze(arr.astype(np.float64))

    layers = []
    for fan_in, fan_out, proj in _layer_shapes(spec):
        w = take((fan_out, fan_in))
        b = take((fan_out,))
        pw = pb = None
        if proj:
            pw = take((fan_out, fan_in))
            pb = take((fan_out,))
        layers.append(Layer(w, b, pw, pb))
    if off != len(data):
        raise InvalidSpecError("trailing bytes in subnetwork container")
    return SubnetworkParams(spec, tuple(layers))
