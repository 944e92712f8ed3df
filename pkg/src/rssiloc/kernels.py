"""Numeric cores with two interchangeable backends.

The hot inner loops of the package live here: beacon-coverage counting
over dense sample lattices, the linearized lateration solve, and the
fused Kalman predict/correct step. Each kernel has a numba-compiled
path and a pure-numpy path with identical semantics.

Backend selection happens once at import time: numba is used when it is
importable, unless the environment variable RSSILOC_NO_NUMBA is set to
1/true/yes, in which case the numpy path is forced. `BACKEND` records
the choice. benchmarks/bench_kernels.py times the two paths against
each other.

Kernels return status flags instead of raising; the public wrappers in
localization/tracking/simulate translate flags into exceptions.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "coverage_counts",
    "lateration_solve",
    "ekf_step",
    "warmup",
]

_COVERAGE_CHUNK = 1 << 16

_flag = os.environ.get("RSSILOC_NO_NUMBA", "").strip().lower()
_want_numba = _flag not in {"1", "true", "yes"}
if _want_numba:
    try:
        from numba import njit
    except ImportError:
        _want_numba = False

BACKEND = "numba" if _want_numba else "numpy"


# ---------------------------------------------------------------------------
# coverage counting


def coverage_counts_np(px, py, bx, by, radius, cap):
    """Per sample point, the number of beacons within `radius` (closed
    ball), saturated at `cap`. Vectorized in chunks to bound memory."""
    n = px.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    r2 = radius * radius
    for start in range(0, n, _COVERAGE_CHUNK):
        stop = min(start + _COVERAGE_CHUNK, n)
        dx = px[start:stop, None] - bx[None, :]
        dy = py[start:stop, None] - by[None, :]
        counts[start:stop] = np.count_nonzero(dx * dx + dy * dy <= r2, axis=1)
    return np.minimum(counts, cap)


def _coverage_counts_loop(px, py, bx, by, radius, cap):
    n = px.shape[0]
    m = bx.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    r2 = radius * radius
    for i in range(n):
        c = 0
        for j in range(m):
            dx = px[i] - bx[j]
            dy = py[i] - by[j]
            if dx * dx + dy * dy <= r2:
                c += 1
                if c >= cap:
                    break
        counts[i] = c
    return counts


# ---------------------------------------------------------------------------
# linearized lateration (normal equations on the 2-unknown system)


def _lateration_impl(ax, ay, d):
    """Solve for the position whose squared anchor distances best match d.

    Rows i = 1..k-1 of the linear system, anchored on node 0:

        [2(x_i - x_0), 2(y_i - y_0)] @ (x, y)
            = d_0^2 - d_i^2 + x_i^2 + y_i^2 - x_0^2 - y_0^2

    solved through the 2x2 normal equations. Returns (status, x, y)
    with status 0 on success and 1 when the normal matrix is singular
    (collinear anchors)."""
    x0 = ax[0]
    y0 = ay[0]
    c0 = d[0] * d[0] - x0 * x0 - y0 * y0
    s11 = 0.0
    s12 = 0.0
    s22 = 0.0
    t1 = 0.0
    t2 = 0.0
    for i in range(1, ax.shape[0]):
        a1 = 2.0 * (ax[i] - x0)
        a2 = 2.0 * (ay[i] - y0)
        b = c0 - d[i] * d[i] + ax[i] * ax[i] + ay[i] * ay[i]
        s11 += a1 * a1
        s12 += a1 * a2
        s22 += a2 * a2
        t1 += a1 * b
        t2 += a2 * b
    det = s11 * s22 - s12 * s12
    scale = 0.5 * (s11 + s22)
    if det <= 1e-12 * scale * scale:
        return 1, 0.0, 0.0
    x = (s22 * t1 - s12 * t2) / det
    y = (s11 * t2 - s12 * t1) / det
    return 0, x, y


def _ekf_step_impl(pos, cov, ax, ay, z, st, ctrl, q, r):
    """Fused predict + range-measurement correct for the planar filter.

    Prediction propagates the state through the transition matrix and
    inflates covariance with the process noise. Correction linearizes
    the anchor-range map at the predicted position (Jacobian rows are
    unit vectors from anchor to prediction), forms the gain
    E H^T (H E H^T + R)^-1 and applies the measured-minus-predicted
    range innovation. Returns (status, pos, cov); status 1 flags a
    prediction that coincides with an anchor."""
    pred = st @ pos + ctrl
    pcov = st @ cov @ st.T + q

    k = ax.shape[0]
    h = np.empty((k, 2))
    ranges = np.empty(k)
    for i in range(k):
        dx = pred[0] - ax[i]
        dy = pred[1] - ay[i]
        ri = math.sqrt(dx * dx + dy * dy)
        if ri < 1e-9:
            return 1, pred, pcov
        ranges[i] = ri
        h[i, 0] = dx / ri
        h[i, 1] = dy / ri

    s = h @ pcov @ h.T + r
    gain = pcov @ h.T @ np.linalg.inv(s)
    new_pos = pred + gain @ (z - ranges)
    new_cov = (np.eye(2) - gain @ h) @ pcov
    new_cov = 0.5 * (new_cov + new_cov.T)
    return 0, new_pos, new_cov


# ---------------------------------------------------------------------------
# backend dispatch

if BACKEND == "numba":
    coverage_counts_jit = njit(cache=True)(_coverage_counts_loop)
    lateration_solve_jit = njit(cache=True)(_lateration_impl)
    ekf_step_jit = njit(cache=True)(_ekf_step_impl)

    coverage_counts = coverage_counts_jit
    lateration_solve = lateration_solve_jit
    ekf_step = ekf_step_jit
else:
    coverage_counts = coverage_counts_np
    lateration_solve = _lateration_impl
    ekf_step = _ekf_step_impl

# numpy-path aliases, importable regardless of backend (benchmarks, tests)
lateration_solve_np = _lateration_impl
ekf_step_np = _ekf_step_impl


def warmup() -> None:
    """Trigger JIT compilation of all kernels (no-op on the numpy path)."""
    px = np.array([0.0, 1.0])
    bx = np.array([0.0, 2.0, 4.0])
    coverage_counts(px, px, bx, bx, 5.0, 3)
    lateration_solve(np.array([0.0, 4.0, 0.0]), np.array([0.0, 0.0, 4.0]), np.array([1.0, 3.0, 3.0]))
    ekf_step(
        np.array([1.0, 1.0]),
        np.eye(2),
        np.array([0.0, 4.0, 0.0]),
        np.array([0.0, 0.0, 4.0]),
        np.array([1.5, 3.0, 3.0]),
        np.eye(2),
        np.zeros(2),
        0.01 * np.eye(2),
        np.eye(3),
    )
