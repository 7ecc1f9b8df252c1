"""Linear differential operators as sums of jet terms.

An operator is a finite sum ``sum_k c_k D_k`` where each ``D_k`` is the
identity, a first partial ``d/dx_i`` or a pure second partial
``d^2/dx_i^2``.  That is all the collocation rows in this package need, and
it keeps every row builder linear in the basis jets by construction.

    >>> lap = laplacian(2)
    >>> helmholtz = lap + 1.0 * identity()
    >>> heat = d1(2) - laplacian(2)          # u_t - (u_xx + u_yy), t is axis 2
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import UnsupportedOperatorError


@dataclass(frozen=True)
class Term:
    coef: float
    order: int  # 0, 1 or 2
    axis: int = -1  # ignored for order 0

    def key(self):
        return (self.order, self.axis if self.order else -1)


@dataclass(frozen=True)
class LinearOperator:
    terms: Tuple[Term, ...] = ()

    def __post_init__(self):
        merged = {}
        for t in self.terms:
            if t.order not in (0, 1, 2):
                raise UnsupportedOperatorError(f"jet order {t.order} not available (mixed or higher derivatives are unsupported)")
            merged[t.key()] = merged.get(t.key(), 0.0) + float(t.coef)
        terms = tuple(Term(c, k[0], k[1]) for k, c in sorted(merged.items()) if c != 0.0)
        object.__setattr__(self, "terms", terms)

    def __add__(self, other):
        return LinearOperator(self.terms + other.terms)

    def __neg__(self):
        return -1.0 * self

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return LinearOperator(tuple(Term(c * t.coef, t.order, t.axis) for t in self.terms))

    __rmul__ = __mul__

    @property
    def max_axis(self):
        return max((t.axis for t in self.terms if t.order), default=-1)

    def check_dim(self, d):
        if self.max_axis >= d:
            raise UnsupportedOperatorError(f"operator uses axis {self.max_axis} but inputs have dimension {d}")

    def apply(self, jets) -> np.ndarray:
        """Row block ``(N, M)`` from a full-basis jet (values ``(N, M)``, grad/diag2 ``(N, M, d)``)."""
        self.check_dim(jets.grad.shape[2])
        out = np.zeros_like(jets.values)
        for t in self.terms:
            if t.order == 0:
                out += t.coef * jets.values
            elif t.order == 1:
                out += t.coef * jets.grad[:, :, t.axis]
            else:
                out += t.coef * jets.diag2[:, :, t.axis]
        return out

    def apply_field(self, field) -> np.ndarray:
        """Apply to a scalar field jet (value ``(N,)``, grad/diag2 ``(N, d)``)."""
        self.check_dim(field.grad.shape[1])
        out = np.zeros_like(field.value)
        for t in self.terms:
            if t.order == 0:
                out += t.coef * field.value
            elif t.order == 1:
                out += t.coef * field.grad[:, t.axis]
            else:
                out += t.coef * field.diag2[:, t.axis]
        return out


def identity() -> LinearOperator:
    return LinearOperator((Term(1.0, 0),))


def d1(axis: int) -> LinearOperator:
    return LinearOperator((Term(1.0, 1, axis),))


def d2(axis: int) -> LinearOperator:
    return LinearOperator((Term(1.0, 2, axis),))


def laplacian(n_axes: int) -> LinearOperator:
    """Sum of pure second partials over axes ``0 .. n_axes-1``."""
    return LinearOperator(tuple(Term(1.0, 2, i) for i in range(n_axes)))
