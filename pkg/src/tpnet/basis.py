"""Basis function sets built from frozen subnetworks.

:class:`TensorBasis` is the pairwise-product basis ``{phi1_m * phi2_n}`` of
two subnetworks with ``p`` outputs each; column ``m*p + n`` holds
``phi1_m * phi2_n``.  Operator rows are assembled from the two small factor
jets without ever forming per-axis ``(N, p^2)`` derivative matrices.

:class:`NetworkBasis` uses the outputs of one subnetwork directly (the
hidden-layer concatenation baseline, or a plain ELM).
"""
from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .errors import ShapeError
from .operators import LinearOperator, identity
from .subnetworks import (
    JetBatch,
    SubnetworkSpec,
    eval_jets,
    init_subnetwork,
    split_seed,
)


@dataclass
class FieldJet:
    """Scalar field ``u`` with gradient and pure second partials at N points."""

    value: np.ndarray
    grad: np.ndarray
    diag2: np.ndarray


# -- tensor product of two factor jets --------------------------------------

def _check_pair(jet1: JetBatch, jet2: JetBatch):
    if jet1.values.shape != jet2.values.shape:
        raise ShapeError(f"factor jets disagree: {jet1.values.shape} vs {jet2.values.shape}")
    if jet1.grad.shape != jet2.grad.shape:
        raise ShapeError("factor jets have different input dimensions")


def _outer(a, b):
    n = a.shape[0]
    return (a[:, :, None] * b[:, None, :]).reshape(n, -1)


def _check_axis(jet, axis):
    if not 0 <= axis < jet.dim:
        raise ShapeError(f"axis {axis} out of range for d={jet.dim}")


def tensor_basis_values(jet1: JetBatch, jet2: JetBatch) -> np.ndarray:
    """``(N, p*p)`` matrix with entry ``(k, m*p+n) = phi1_m(x_k) phi2_n(x_k)``."""
    _check_pair(jet1, jet2)
    return _outer(jet1.values, jet2.values)


def tensor_basis_deriv1(jet1: JetBatch, jet2: JetBatch, axis: int) -> np.ndarray:
    _check_pair(jet1, jet2)
    _check_axis(jet1, axis)
    return _outer(jet1.grad[:, :, axis], jet2.values) + _outer(jet1.values, jet2.grad[:, :, axis])


def tensor_basis_deriv2(jet1: JetBatch, jet2: JetBatch, axis: int) -> np.ndarray:
    _check_pair(jet1, jet2)
    _check_axis(jet1, axis)
    g1, g2 = jet1.grad[:, :, axis], jet2.grad[:, :, axis]
    return (
        _outer(jet1.diag2[:, :, axis], jet2.values)
        + 2.0 * _outer(g1, g2)
        + _outer(jet1.values, jet2.diag2[:, :, axis])
    )


def _factor_pairs(op: LinearOperator, jet1: JetBatch, jet2: JetBatch):
    """Group the product-rule expansion of ``op`` by right-hand factor.

    Returns parallel lists of left ``(N, p)`` and right ``(N, p)`` arrays with
    ``op(Phi1 (x) Phi2) = sum_j left_j (x) right_j``.
    """
    left = {}
    right = {}

    def add(key, rfac, lfac, c):
        if key not in left:
            left[key] = c * lfac
            right[key] = rfac
        else:
            left[key] = left[key] + c * lfac

    for t in op.terms:
        if t.order == 0:
            add("v", jet2.values, jet1.values, t.coef)
        elif t.order == 1:
            i = t.axis
            add("v", jet2.values, jet1.grad[:, :, i], t.coef)
            add(("g", i), jet2.grad[:, :, i], jet1.values, t.coef)
        else:
            i = t.axis
            add("v", jet2.values, jet1.diag2[:, :, i], t.coef)
            add(("g", i), jet2.grad[:, :, i], jet1.grad[:, :, i], 2.0 * t.coef)
            add(("h", i), jet2.diag2[:, :, i], jet1.values, t.coef)
    keys = list(left)
    return [left[k] for k in keys], [right[k] for k in keys]


def tensor_design_matrix(op: LinearOperator, jet1: JetBatch, jet2: JetBatch, out=None, chunk=2048):
    """Apply ``op`` to every tensor-product basis function; returns ``(N, p*p)``."""
    _check_pair(jet1, jet2)
    op.check_dim(jet1.dim)
    n, p = jet1.values.shape
    if out is None:
        out = np.empty((n, p * p))
    lefts, rights = _factor_pairs(op, jet1, jet2)
    if not lefts:
        out[...] = 0.0
        return out
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        lstack = np.stack([l[start:stop] for l in lefts], axis=2)   # (n, p, J)
        rstack = np.stack([r[start:stop] for r in rights], axis=1)  # (n, J, p)
        np.matmul(lstack, rstack, out=out[start:stop].reshape(stop - start, p, p))
    return out


# -- bases -------------------------------------------------------------------

def _scaled_jets(spec, params, x, center, halfwidth):
    if center is None:
        return eval_jets(spec, params, x)
    jet = eval_jets(spec, params, (x - center) / halfwidth)
    inv = 1.0 / halfwidth
    return JetBatch(jet.values, jet.grad * inv, jet.diag2 * (inv * inv))


class Basis:
    """Common interface: a finite set of ``count`` functions on R^dim.

    Subclasses provide :meth:`jets`; the defaults below materialise full
    ``(N, M, d)`` jets, which is fine for small or injected test bases.
    """

    dim: int
    count: int

    def jets(self, points) -> JetBatch:
        raise NotImplementedError

    def design_matrix(self, op: LinearOperator, points, out=None) -> np.ndarray:
        rows = op.apply(self.jets(_as_points(points, self.dim)))
        if out is None:
            return rows
        out[...] = rows
        return out

    def values(self, points) -> np.ndarray:
        return self.design_matrix(identity(), points)

    def field(self, coefficients, points) -> FieldJet:
        return self.field_evaluator(points)(coefficients)

    def field_evaluator(self, points):
        """Return ``f(w) -> FieldJet`` with the basis jets at ``points`` cached."""
        jet = self.jets(_as_points(points, self.dim))

        def evaluate(coefficients):
            w = _check_coefficients(coefficients, self.count)
            return FieldJet(
                jet.values @ w,
                np.einsum("nmd,m->nd", jet.grad, w),
                np.einsum("nmd,m->nd", jet.diag2, w),
            )

        return evaluate


def _check_coefficients(coefficients, count):
    w = np.asarray(coefficients, dtype=np.float64).ravel()
    if w.size != count:
        raise ShapeError(f"expected {count} coefficients, got {w.size}")
    return w


def _as_points(points, dim):
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None] if dim == 1 else x[None, :]
    if x.ndim != 2 or x.shape[1] != dim:
        raise ShapeError(f"points must be (N, {dim}), got {x.shape}")
    return x


class TensorBasis(Basis):
    """Tensor-product basis of two subnetworks.

    ``center``/``halfwidth`` optionally map physical coordinates onto
    ``[-1, 1]^d`` before they enter the subnetworks; derivatives are
    returned with respect to the physical coordinates.
    """

    def __init__(self, sub1, sub2, center=None, halfwidth=None):
        (self.spec1, self.params1), (self.spec2, self.params2) = sub1, sub2
        if self.spec1.input_dim != self.spec2.input_dim:
            raise ShapeError("subnetworks must share the input dimension")
        if self.spec1.output_width != self.spec2.output_width:
            raise ShapeError("subnetworks must have the same output width")
        self.dim = self.spec1.input_dim
        self.p = self.spec1.output_width
        self.count = self.p * self.p
        self.center = None if center is None else np.asarray(center, dtype=np.float64)
        self.halfwidth = None if halfwidth is None else np.asarray(halfwidth, dtype=np.float64)

    @classmethod
    def from_seed(cls, architecture, dim, p, init_scheme="kaiming", seed=0, bounds=None, widths=None):
        """Two identical-architecture subnetworks seeded from one master seed."""
        s1, s2 = split_seed(seed)
        if widths is None:
            spec1 = SubnetworkSpec.default(architecture, dim, p, init_scheme, s1)
            spec2 = SubnetworkSpec.default(architecture, dim, p, init_scheme, s2)
        else:
            spec1 = SubnetworkSpec(architecture, dim, widths, init_scheme, s1)
            spec2 = SubnetworkSpec(architecture, dim, widths, init_scheme, s2)
        center = halfwidth = None
        if bounds is not None:
            lo, hi = (np.asarray(b, dtype=np.float64) for b in bounds)
            center, halfwidth = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return cls((spec1, init_subnetwork(spec1)), (spec2, init_subnetwork(spec2)), center, halfwidth)

    @property
    def n_params(self):
        return self.params1.n_params + self.params2.n_params

    def factor_jets(self, points):
        x = _as_points(points, self.dim)
        return (
            _scaled_jets(self.spec1, self.params1, x, self.center, self.halfwidth),
            _scaled_jets(self.spec2, self.params2, x, self.center, self.halfwidth),
        )

    def jets(self, points) -> JetBatch:
        j1, j2 = self.factor_jets(points)
        d = self.dim
        grad = np.stack([tensor_basis_deriv1(j1, j2, i) for i in range(d)], axis=2)
        diag2 = np.stack([tensor_basis_deriv2(j1, j2, i) for i in range(d)], axis=2)
        return JetBatch(tensor_basis_values(j1, j2), grad, diag2)

    def design_matrix(self, op: LinearOperator, points, out=None) -> np.ndarray:
        j1, j2 = self.factor_jets(points)
        return tensor_design_matrix(op, j1, j2, out=out)

    def field_evaluator(self, points):
        j1, j2 = self.factor_jets(points)
        p, d = self.p, self.dim

        def contract(a, b):
            return np.einsum("nk,nk->n", a, b)

        def evaluate(coefficients):
            # u = sum_mn w_mn phi1_m phi2_n = rowsum((Phi1 W) * Phi2)
            wm = _check_coefficients(coefficients, self.count).reshape(p, p)
            v1w = j1.values @ wm
            value = contract(v1w, j2.values)
            grad = np.empty((value.size, d))
            diag2 = np.empty((value.size, d))
            for i in range(d):
                g1w = j1.grad[:, :, i] @ wm
                grad[:, i] = contract(g1w, j2.values) + contract(v1w, j2.grad[:, :, i])
                diag2[:, i] = (
                    contract(j1.diag2[:, :, i] @ wm, j2.values)
                    + 2.0 * contract(g1w, j2.grad[:, :, i])
                    + contract(v1w, j2.diag2[:, :, i])
                )
            return FieldJet(value, grad, diag2)

        return evaluate

    def subnetworks(self):
        return [(self.spec1, self.params1), (self.spec2, self.params2)]


class NetworkBasis(Basis):
    """Outputs of a single subnetwork used directly as basis functions."""

    def __init__(self, sub, center=None, halfwidth=None):
        self.spec, self.params = sub
        self.dim = self.spec.input_dim
        self.count = self.spec.output_width
        self.center = None if center is None else np.asarray(center, dtype=np.float64)
        self.halfwidth = None if halfwidth is None else np.asarray(halfwidth, dtype=np.float64)

    @classmethod
    def from_seed(cls, architecture, dim, m, init_scheme="kaiming", seed=0, bounds=None):
        spec = SubnetworkSpec.default(architecture, dim, m, init_scheme, seed)
        center = halfwidth = None
        if bounds is not None:
            lo, hi = (np.asarray(b, dtype=np.float64) for b in bounds)
            center, halfwidth = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return cls((spec, init_subnetwork(spec)), center, halfwidth)

    @property
    def n_params(self):
        return self.params.n_params

    def jets(self, points) -> JetBatch:
        x = _as_points(points, self.dim)
        return _scaled_jets(self.spec, self.params, x, self.center, self.halfwidth)

    def subnetworks(self):
        return [(self.spec, self.params)]
