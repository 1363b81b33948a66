"""Principal-branch Lambert W, accurate to ~1e-13 residual.

Initial guesses: asymptotic log expansion for large arguments, a short
series near zero, and the square-root branch-point expansion near -1/e;
all refined by Halley iterations (Corless et al., 1996).
"""

from __future__ import annotations

import math

import numpy as np

_INV_E = math.exp(-1.0)
_BRANCH_SLOP = 1e-12


def _initial_guess(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)
    near_branch = x < -_INV_E + 1e-2
    small = (~near_branch) & (np.abs(x) < 1.0)
    large = (~near_branch) & (~small)

    p = np.sqrt(2.0 * (np.e * x[near_branch] + 1.0))
    w[near_branch] = -1.0 + p - p**2 / 3.0 + 11.0 * p**3 / 72.0

    xs = x[small]
    w[small] = xs * (1.0 - xs + 1.5 * xs**2)

    xl = x[large]
    big = xl > np.e
    l1 = np.log(np.where(big, xl, np.e))
    l2 = np.log(np.where(big, l1, 1.0) + (~big))
    # For 1 <= x <= e the log expansion is poor; a flat 0.5 seeds Halley fine.
    w[large] = np.where(big, l1 - l2 + np.where(l1 != 0, l2 / np.where(l1 != 0, l1, 1.0), 0.0), 0.5)
    return w


def lambert_w0(x):
    """Solve w * exp(w) = x on the principal branch (w >= -1), x >= -1/e."""
    scalar = np.isscalar(x)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < -_INV_E * (1 + _BRANCH_SLOP) - _BRANCH_SLOP):
        raise ValueError("lambert_w0 domain is x >= -1/e")
    xa = np.maximum(xa, -_INV_E)

    w = _initial_guess(np.atleast_1d(xa).astype(float))
    xf = np.atleast_1d(xa).astype(float)
    at_branch = np.isclose(xf, -_INV_E, rtol=0, atol=1e-300)
    for _ in range(30):
        ew = np.exp(w)
        f = w * ew - xf
        if np.all(np.abs(f) <= 1e-14 * np.maximum(1.0, np.abs(xf))):
            break
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * np.where(wp1 != 0, wp1, 1.0))
        step = np.where(denom != 0, f / np.where(denom != 0, denom, 1.0), 0.0)
        w = w - step
    w = np.where(at_branch, -1.0, w)
    w = np.maximum(w, -1.0)
    if scalar:
        return float(w[0])
    return w.reshape(np.shape(xa))


def lambert_wm1(x):
    """Solve w * exp(w) = x on the secondary branch (w <= -1), -1/e <= x < 0."""
    scalar = np.isscalar(x)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < -_INV_E * (1 + _BRANCH_SLOP) - _BRANCH_SLOP) or np.any(xa >= 0):
        raise ValueError("lambert_wm1 domain is -1/e <= x < 0")
    xf = np.atleast_1d(np.maximum(xa, -_INV_E)).astype(float)

    near_branch = xf < -_INV_E + 1e-2
    p = np.sqrt(2.0 * np.maximum(np.e * xf + 1.0, 0.0))
    w = np.where(near_branch, -1.0 - p - p**2 / 3.0 - 11.0 * p**3 / 72.0, 0.0)
    far = ~near_branch
    l1 = np.log(np.where(far, -xf, _INV_E))
    w = np.where(far, l1 - np.log(-l1), w)

    at_branch = np.isclose(xf, -_INV_E, rtol=0, atol=1e-300)
    for _ in range(40):
        ew = np.exp(w)
        f = w * ew - xf
        if np.all(np.abs(f) <= 1e-14 * np.abs(xf)):
            break
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * np.where(wp1 != 0, wp1, 1.0))
        step = np.where(denom != 0, f / np.where(denom != 0, denom, 1.0), 0.0)
        w = w - step
    w = np.where(at_branch, -1.0, w)
    w = np.minimum(w, -1.0)
    if scalar:
        return float(w[0])
    return w.reshape(np.shape(xa))
