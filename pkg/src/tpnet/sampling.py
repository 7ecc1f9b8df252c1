"""Computational domains and collocation point sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import InvalidSpecError

BOUNDARY_TOL = 1e-12

INTERIOR, BOUNDARY, INITIAL = "interior", "boundary", "initial"


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box; when ``time`` is set the last coordinate is time."""

    lower: tuple
    upper: tuple
    time: bool = False

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise InvalidSpecError("lower and upper bounds must have equal, non-zero length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise InvalidSpecError(f"need lower < upper on every axis, got {lo} / {hi}")
        if self.time and len(lo) < 2:
            raise InvalidSpecError("a space-time domain needs at least one spatial axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def kind(self):
        return "box×time" if self.time else "box"

    @property
    def dim(self):
        return len(self.lower)

    @property
    def spatial_dim(self):
        return self.dim - 1 if self.time else self.dim

    @property
    def t0(self):
        return self.lower[-1] if self.time else None

    @property
    def t_final(self):
        return self.upper[-1] if self.time else None

    @property
    def bounds(self):
        return np.array(self.lower), np.array(self.upper)

    def time_window(self, t0, t1):
        if not self.time:
            raise InvalidSpecError("domain has no time axis")
        return Domain(self.lower[:-1] + (t0,), self.upper[:-1] + (t1,), time=True)

    def contains(self, points, tol=BOUNDARY_TOL):
        x = np.atleast_2d(points)
        lo, hi = self.bounds
        return np.all((x >= lo - tol) & (x <= hi + tol), axis=1)


@dataclass
class CollocationSet:
    interior: np.ndarray
    boundary: np.ndarray
    initial: Optional[np.ndarray] = None

    def __post_init__(self):
        d = self.interior.shape[1] if self.interior.ndim == 2 else self.boundary.shape[1]
        if self.initial is None:
            self.initial = np.empty((0, d))

    @property
    def dim(self):
        return self.interior.shape[1]

    @property
    def counts(self):
        return {INTERIOR: len(self.interior), BOUNDARY: len(self.boundary), INITIAL: len(self.initial)}

    @property
    def points(self) -> np.ndarray:
        return np.concatenate([self.interior, self.boundary, self.initial], axis=0)

    @property
    def roles(self) -> np.ndarray:
        c = self.counts
        return np.array([INTERIOR] * c[INTERIOR] + [BOUNDARY] * c[BOUNDARY] + [INITIAL] * c[INITIAL])

    def __len__(self):
        return sum(self.counts.values())


def grid_points(domain: Domain, counts: Sequence[int]) -> np.ndarray:
    counts = [int(c) for c in counts]
    if len(counts) != domain.dim:
        raise InvalidSpecError(f"need one count per axis ({domain.dim}), got {counts}")
    if any(c < 2 for c in counts):
        raise InvalidSpecError("grid needs at least 2 points per axis")
    axes = [np.linspace(lo, hi, c) for lo, hi, c in zip(domain.lower, domain.upper, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _on_spatial_boundary(domain, x):
    lo, hi = domain.bounds
    n = domain.spatial_dim
    xs = x[:, :n]
    return np.any((np.abs(xs - lo[:n]) <= BOUNDARY_TOL) | (np.abs(xs - hi[:n]) <= BOUNDARY_TOL), axis=1)


def sample_uniform_grid(domain: Domain, counts: Sequence[int]) -> CollocationSet:
    """Full tensor grid including endpoints, split by role.

    For a space-time domain the whole ``t = t0`` face is the initial set;
    the other points on a spatial face are boundary points.  Points on
    several faces appear exactly once.
    """
    x = grid_points(domain, counts)
    on_bdry = _on_spatial_boundary(domain, x)
    if domain.time:
        initial = np.abs(x[:, -1] - domain.t0) <= BOUNDARY_TOL
        on_bdry &= ~initial
    else:
        initial = np.zeros(len(x), dtype=bool)
    interior = ~(on_bdry | initial)
    return CollocationSet(x[interior], x[on_bdry], x[initial])


def _lhs(rng, dim, n):
    if n == 0:
        return np.empty((0, dim))
    return qmc.LatinHypercube(d=dim, rng=rng).random(n)


def sample_lhs(domain: Domain, n_interior: int, n_boundary: int, seed: int = 0) -> CollocationSet:
    """Latin hypercube interior points plus an even split of boundary points per face.

    Each of the ``2d`` faces gets ``n_boundary / (2d)`` points drawn by a
    (d-1)-dimensional Latin hypercube on that face.
    """
    if domain.time:
        raise InvalidSpecError("LHS sampling is implemented for spatial boxes only")
    d = domain.dim
    if n_boundary % (2 * d):
        raise InvalidSpecError(f"n_boundary={n_boundary} is not divisible by 2d={2 * d}")
    rng = np.random.default_rng(seed)
    lo, hi = domain.bounds
    interior = lo + (hi - lo) * _lhs(rng, d, n_interior)
    per_face = n_boundary // (2 * d)
    faces = []
    for axis in range(d):
        others = [a for a in range(d) if a != axis]
        for value in (lo[axis], hi[axis]):
            pts = np.empty((per_face, d))
            if others:
                u = _lhs(rng, d - 1, per_face)
                pts[:, others] = lo[others] + (hi[others] - lo[others]) * u
            pts[:, axis] = value
            faces.append(pts)
    boundary = np.concatenate(faces, axis=0) if faces else np.empty((0, d))
    return CollocationSet(interior, boundary)
