"""Pure numpy versions of the hot loops in ``_kernels.pyx``.

Both implementations follow the same arithmetic so their results agree to
rounding; ``lpaf.kernels`` picks one at import time.
"""
from __future__ import annotations

import numpy as np


def _pnorm(v: np.ndarray, p: float) -> float:
    m = np.max(np.abs(v)) if v.size else 0.0
    if m == 0.0:
        return 0.0
    return float(m * np.sum((np.abs(v) / m) ** p) ** (1.0 / p))


def _duality(z: np.ndarray, p: float) -> np.ndarray:
    # |z|^(p-1) * phase(z), rescaled by max|z| first to avoid overflow
    mag = np.abs(z)
    m = mag.max()
    if m == 0.0:
        return np.zeros_like(z)
    mag = mag / m
    out = np.zeros_like(z)
    nz = mag > 0
    out[nz] = (mag[nz] ** (p - 1.0)) * (z[nz] / np.abs(z[nz]))
    return out


def power_iterate(a, x0, p, max_iter, tol):
    """Nonlinear power iteration for max ||a x||_p / ||x||_p.

    Returns ``(best_ratio, best_x, iterations, converged)``; ``best_x`` is a
    witness whose ratio is exactly ``best_ratio`` as evaluated here.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    x = np.array(x0, dtype=np.complex128)
    q = p / (p - 1.0)
    nx = _pnorm(x, p)
    if nx == 0.0:
        return 0.0, x, 0, False
    x = x / nx
    y = a @ x
    ratio = _pnorm(y, p)
    best, best_x = ratio, x.copy()
    ah = a.conj().T
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        z = ah @ _duality(y, p)
        if not np.any(z):
            converged = True
            break
        x = _duality(z, q)
        x = x / _pnorm(x, p)
        y = a @ x
        new = _pnorm(y, p)
        if new > best:
            best, best_x = new, x.copy()
        if abs(new - ratio) <= tol * max(1.0, new):
            converged = True
            ratio = new
            break
        ratio = new
    return best, best_x, it, converged


def grid_max_2x2(a, p, r_lo, r_hi, nr, t_lo, t_hi, nt):
    """Max of ||a x||_p over x = (r, e^{it} (1 - r^p)^{1/p}) on a grid.

    Returns ``(best, r, t)``.
    """
    a = np.asarray(a, dtype=np.complex128)
    r = np.linspace(r_lo, r_hi, nr)
    t = np.linspace(t_lo, t_hi, nt)
    rr, tt = np.meshgrid(r, t, indexing="ij")
    x1 = rr.astype(np.complex128)
    x2 = np.exp(1j * tt) * np.clip(1.0 - rr ** p, 0.0, None) ** (1.0 / p)
    y1 = a[0, 0] * x1 + a[0, 1] * x2
    y2 = a[1, 0] * x1 + a[1, 1] * x2
    vals = (np.abs(y1) ** p + np.abs(y2) ** p) ** (1.0 / p)
    idx = np.unravel_index(np.argmax(vals), vals.shape)
    return float(vals[idx]), float(r[idx[0]]), float(t[idx[1]])
