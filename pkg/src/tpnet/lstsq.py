"""Dense minimum-norm least squares with diagnostics."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import InputError, RankZeroError


@dataclass
class LstsqResult:
    coefficients: np.ndarray
    residual_norm: float
    effective_rank: int
    rcond_used: float
    wall_time: float


LSTSQ_DRIVERS = ("gelsd", "gelsy", "qr")


def default_rcond(shape) -> float:
    return float(np.finfo(np.float64).eps * max(shape))


def _validate(A, F):
    A = np.asarray(A, dtype=np.float64)
    F = np.asarray(F, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InputError(f"A must be a non-empty matrix, got shape {A.shape}")
    if F.ndim != 1 or F.shape[0] != A.shape[0]:
        raise InputError(f"F must have length {A.shape[0]}, got shape {F.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(F))):
        raise InputError("A and F must be finite")
    return A, F


def _column_scales(A):
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0.0] = 1.0
    return norms


def _row_weights(A):
    norms = np.linalg.norm(A, axis=1)
    norms[norms == 0.0] = 1.0
    return 1.0 / norms


def _prepare(A, equilibrate, row_scale):
    rows = _row_weights(A) if row_scale else None
    work = A * rows[:, None] if row_scale else A
    cols = _column_scales(work) if equilibrate else None
    if equilibrate:
        work = work / cols
    return work, rows, cols


def _svd(A):
    try:
        return scipy.linalg.svd(A, full_matrices=False, lapack_driver="gesdd", check_finite=False)
    except np.linalg.LinAlgError:
        return scipy.linalg.svd(A, full_matrices=False, lapack_driver="gesvd", check_finite=False)


def solve_lstsq(A, F, rcond: Optional[float] = None, ridge: float = 0.0,
                equilibrate: bool = False, row_scale: bool = False, driver: str = "gelsd") -> LstsqResult:
    """Solve ``min ||A w - F||`` in the minimum-norm sense.

    With ``ridge == 0`` singular values below ``rcond * s_max`` are discarded
    (LAPACK ``gelsd``).  ``driver="gelsy"`` uses a complete orthogonal
    factorisation instead, which is also minimum-norm.  ``driver="qr"`` is
    an unpivoted Householder QR for tall systems: when every ``|R_ii|``
    exceeds ``rcond * max |R_ii|`` the system is treated as full rank and the
    unique least-squares solution is returned (an order of magnitude faster
    than ``gelsd`` at ``M ~ 10^4``); otherwise it falls back to ``gelsd``.  With ``ridge > 0`` the Tikhonov problem
    ``min ||A w - F||^2 + ridge ||w||^2`` is solved through the SVD.

    ``equilibrate`` scales columns to unit norm before solving and
    ``row_scale`` does the same for rows, so every equation carries equal
    weight.  The reported residual is always that of the unscaled system.
    """
    t0 = time.perf_counter()
    A, F = _validate(A, F)
    if ridge < 0:
        raise InputError("ridge must be non-negative")
    if driver not in LSTSQ_DRIVERS:
        raise InputError(f"unknown lstsq driver {driver!r}")
    rcond = default_rcond(A.shape) if rcond is None else float(rcond)
    work, rows, scales = _prepare(A, equilibrate, row_scale)
    rhs = F * rows if row_scale else F
    if ridge == 0.0 and driver == "qr" and work.shape[0] >= work.shape[1]:
        w = _qr_full_rank(work, rhs, rcond, overwrite=work is not A)
        if w is not None:
            if scales is not None:
                w = w / scales
            residual = float(np.linalg.norm(A @ w - F))
            return LstsqResult(w, residual, A.shape[1], rcond, time.perf_counter() - t0)
        work, rows, scales = _prepare(A, equilibrate, row_scale)
        driver = "gelsd"
    if ridge == 0.0:
        if np.max(np.abs(work)) == 0.0:
            raise RankZeroError("all singular values are below the cutoff")
        w, _, rank, _ = scipy.linalg.lstsq(
            work, rhs, cond=rcond, lapack_driver="gelsd" if driver == "qr" else driver, check_finite=False,
            overwrite_a=work is not A,
        )
        if rank == 0:
            raise RankZeroError("all singular values are below the cutoff")
    else:
        u, s, vt = _svd(work)
        if s.size == 0 or s[0] == 0.0:
            raise RankZeroError("all singular values are below the cutoff")
        rank = int(np.sum(s > rcond * s[0]))
        w = vt.T @ ((s / (s * s + ridge)) * (u.T @ rhs))
    if scales is not None:
        w = w / scales
    residual = float(np.linalg.norm(A @ w - F))
    return LstsqResult(w, residual, int(rank), rcond, time.perf_counter() - t0)


def _qr_full_rank(work, rhs, rcond, overwrite):
    """Householder least squares, or ``None`` if ``R`` looks rank deficient."""
    qtf, r = scipy.linalg.qr_multiply(work, rhs, mode="right", overwrite_a=overwrite)
    diag = np.abs(np.diag(r))
    if diag.max() == 0.0 or diag.min() <= rcond * diag.max():
        return None
    return scipy.linalg.solve_triangular(r, np.ravel(qtf), check_finite=False)


class SvdFactorization:
    """Thin SVD of a fixed matrix, reused for many right-hand sides."""

    def __init__(self, A, rcond: Optional[float] = None, ridge: float = 0.0,
                 equilibrate: bool = False, row_scale: bool = False):
        t0 = time.perf_counter()
        A = np.asarray(A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise InputError(f"A must be a non-empty matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise InputError("A must be finite")
        self.shape = A.shape
        self.rcond = default_rcond(A.shape) if rcond is None else float(rcond)
        self.ridge = float(ridge)
        work, self.rows, self.scales = _prepare(A, equilibrate, row_scale)
        u, s, vt = _svd(work)
        if s.size == 0 or s[0] == 0.0:
            raise RankZeroError("all singular values are below the cutoff")
        # singular values come sorted, so the kept directions are a prefix
        self.rank = int(np.sum(s > self.rcond * s[0]))
        if self.ridge > 0.0:
            self.u, self.vt = u, vt
            self.sinv = s / (s * s + self.ridge)
        else:
            self.u, self.vt = u[:, :self.rank], vt[:self.rank]
            self.sinv = 1.0 / s[:self.rank]
        self.singular_values = s
        self.factor_time = time.perf_counter() - t0

    def solve(self, F) -> np.ndarray:
        F = np.asarray(F, dtype=np.float64)
        if F.shape != (self.shape[0],):
            raise InputError(f"F must have length {self.shape[0]}")
        if not np.all(np.isfinite(F)):
            raise InputError("F must be finite")
        if self.rows is not None:
            F = F * self.rows
        w = self.vt.T @ (self.sinv * (self.u.T @ F))
        if self.scales is not None:
            w = w / self.scales
        return w
