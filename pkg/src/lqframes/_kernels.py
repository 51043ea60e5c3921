"""Hot numeric kernels with optional numba acceleration.

The JIT path is used when numba imports successfully and the environment
variable ``LQFRAMES_NUMBA`` is not set to ``0``/``false``/``off``.  Both
implementations are kept importable so tests and benchmarks can compare
them directly.
"""

import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "lq_powsum",
    "rip_scan",
    "smoothed_surrogate",
]


def _numba_requested() -> bool:
    flag = os.environ.get("LQFRAMES_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off")


# ---------------------------------------------------------------------------
# pure-numpy reference implementations
# ---------------------------------------------------------------------------

def lq_powsum_numpy(x, q):
    """Sum of |x_i|^q (the q-th power of the l_q quasinorm)."""
    return float(np.sum(np.abs(x) ** q))


def smoothed_surrogate_numpy(c, sigma, q):
    """Sum of (c_i^2 + sigma)^(q/2), the smoothed objective used by IRLS."""
    return float(np.sum((c * c + sigma) ** (q / 2.0)))


def rip_scan_numpy(ad_s, d_s, dirs, q):
    """Scan direction columns for the worst q-isometry deviation.

    Parameters
    ----------
    ad_s : (m, k) ndarray
        Measurement matrix applied to the k dictionary columns of one support.
    d_s : (n, k) ndarray
        The same k dictionary columns.
    dirs : (k, t) ndarray
        Coefficient directions to evaluate (columns).
    q : float
        Quasinorm exponent in (0, 1].

    Returns
    -------
    (max_dev, n_degenerate) : tuple of float and int
        Largest |ratio - 1| over non-degenerate directions (-1.0 when all
        were degenerate) and the count of directions with D_S v = 0.
    """
    y = ad_s @ dirs
    z = d_s @ dirs
    den_sq = np.sum(z * z, axis=0)
    good = den_sq > 0.0
    n_degenerate = int(np.sum(~good))
    if not np.any(good):
        return -1.0, n_degenerate
    num = np.sum(np.abs(y[:, good]) ** q, axis=0)
    ratios = num / den_sq[good] ** (q / 2.0)
    return float(np.max(np.abs(ratios - 1.0))), n_degenerate


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

_HAVE_NUMBA = False
if _numba_requested():
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised only without numba
        _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @njit(cache=True)
    def lq_powsum_numba(x, q):
        total = 0.0
        for i in range(x.shape[0]):
            total += abs(x[i]) ** q
        return total

    @njit(cache=True)
    def smoothed_surrogate_numba(c, sigma, q):
        total = 0.0
        for i in range(c.shape[0]):
            total += (c[i] * c[i] + sigma) ** (q / 2.0)
        return total

    @njit(cache=True)
    def rip_scan_numba(ad_s, d_s, dirs, q):
        # BLAS matmuls, then fused per-direction reductions (no temporaries).
        y = np.dot(ad_s, dirs)
        z = np.dot(d_s, dirs)
        m, t = y.shape
        n = z.shape[0]
        max_dev = -1.0
        n_degenerate = 0
        for j in range(t):
            den_sq = 0.0
            for r in range(n):
                den_sq += z[r, j] * z[r, j]
            if den_sq <= 0.0:
                n_degenerate += 1
                continue
            num = 0.0
            for r in range(m):
                num += abs(y[r, j]) ** q
            dev = abs(num / den_sq ** (q / 2.0) - 1.0)
            if dev > max_dev:
                max_dev = dev
        return max_dev, n_degenerate


NUMBA_ENABLED = _HAVE_NUMBA

if NUMBA_ENABLED:
    _lq_powsum_impl = lq_powsum_numba
    _smoothed_surrogate_impl = smoothed_surrogate_numba
    _rip_scan_impl = rip_scan_numba
else:
    _lq_powsum_impl = lq_powsum_numpy
    _smoothed_surrogate_impl = smoothed_surrogate_numpy
    _rip_scan_impl = rip_scan_numpy


def lq_powsum(x, q):
    """Sum of |x_i|^q over a vector."""
    return float(_lq_powsum_impl(np.ascontiguousarray(x, dtype=np.float64).ravel(), float(q)))


def smoothed_surrogate(c, sigma, q):
    """Sum of (c_i^2 + sigma)^(q/2) over a vector."""
    arr = np.ascontiguousarray(c, dtype=np.float64).ravel()
    return float(_smoothed_surrogate_impl(arr, float(sigma), float(q)))


def rip_scan(ad_s, d_s, dirs, q):
    """Worst q-isometry deviation over direction columns; see rip_scan_numpy."""
    dev, ndeg = _rip_scan_impl(
        np.ascontiguousarray(ad_s, dtype=np.float64),
        np.ascontiguousarray(d_s, dtype=np.float64),
        np.ascontiguousarray(dirs, dtype=np.float64),
        float(q),
    )
    return float(dev), int(ndeg)
