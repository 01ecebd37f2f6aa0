"""Hot spectral-density kernels.

Every kernel exists twice: a numba @njit loop version and a vectorized
pure-numpy one. The active backend is chosen at import time by the
environment variable ``OPTOSPRING_BACKEND`` (``numba``, the default, or
``numpy``). If numba is unavailable the numpy path is used silently.

All kernels take precomputed chi^-1 arrays (float64, 1-d) plus scalar
parameters and return the force-normalized noise spectral density array.
``benchmarks/bench_kernels.py`` compares the two backends.
"""

from __future__ import annotations

import math
import os

import numpy as np

_BACKEND = os.environ.get("OPTOSPRING_BACKEND", "numba").strip().lower()
if _BACKEND not in ("numba", "numpy"):
    raise ValueError(f"OPTOSPRING_BACKEND must be 'numba' or 'numpy', got {_BACKEND!r}")

if _BACKEND == "numba":
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        _BACKEND = "numpy"


def active_backend() -> str:
    return _BACKEND


# ---------------------------------------------------------------------------
# numpy implementations


def _position_meter_np(chi_inv, ups):
    u2 = ups * ups
    return 0.5 * (chi_inv * chi_inv / u2 + u2)


def _lossy_virtual_np(chi_inv, ups_k, k, eps):
    u2 = ups_k * ups_k
    shifted = chi_inv + k
    return 0.5 * (shifted * shifted / u2 + u2 + eps * eps * chi_inv * chi_inv / u2)


def _lossy_real_np(chi_inv, ups_k, k, eps):
    u2 = ups_k * ups_k
    shifted = chi_inv + k
    return 0.5 * (shifted * shifted * (1.0 + eps * eps) / u2 + u2)


def _lossy_bound_np(chi_inv, k, eps):
    shifted = chi_inv + k
    return np.sqrt(shifted * shifted + eps * eps * chi_inv * chi_inv)


def _hybrid_full_np(chi_i_inv, chi_s_inv, ups, k, k_loss, eps_i, eps_s, r):
    ch = math.cosh(2.0 * r)
    sh = math.sinh(2.0 * r)
    u2 = ups * ups
    shifted = chi_s_inv + k
    s_i0 = 0.5 * (chi_i_inv * chi_i_inv / u2 + u2)
    s_s0 = 0.5 * (shifted * shifted / u2 + u2)
    s_si0 = 0.5 * (u2 - chi_i_inv * shifted / u2)
    s_il = 0.5 * eps_i * eps_i * chi_i_inv * chi_i_inv / u2
    shifted_loss = chi_s_inv + k_loss
    s_sl = 0.5 * eps_s * eps_s * shifted_loss * shifted_loss / u2
    s_i = s_i0 * ch + s_il
    s_s = s_s0 * ch + s_sl
    s_is = s_si0 * sh
    return s_i - s_is * s_is / s_s


def _hybrid_approx_np(chi_i_inv, chi_s_inv, ups, eps_i, eps_s, r, real_mode):
    ch = math.cosh(2.0 * r)
    u2 = ups * ups
    base = 0.5 * (chi_i_inv * chi_i_inv / u2 + u2) / ch
    if real_mode:
        loss = 0.5 * (eps_i * eps_i + eps_s * eps_s) * chi_i_inv * chi_i_inv / u2
    else:
        loss = 0.5 * (eps_i * eps_i * chi_i_inv * chi_i_inv
                      + eps_s * eps_s * chi_s_inv * chi_s_inv) / u2
    return base + loss


# ---------------------------------------------------------------------------
# numba implementations

if _BACKEND == "numba":

    @njit(cache=True)
    def _position_meter_nb(chi_inv, ups):
        out = np.empty_like(chi_inv)
        u2 = ups * ups
        for i in range(chi_inv.size):
            out[i] = 0.5 * (chi_inv[i] * chi_inv[i] / u2 + u2)
        return out

    @njit(cache=True)
    def _lossy_virtual_nb(chi_inv, ups_k, k, eps):
        out = np.empty_like(chi_inv)
        u2 = ups_k * ups_k
        e2 = eps * eps
        for i in range(chi_inv.size):
            sh = chi_inv[i] + k
            out[i] = 0.5 * (sh * sh / u2 + u2 + e2 * chi_inv[i] * chi_inv[i] / u2)
        return out

    @njit(cache=True)
    def _lossy_real_nb(chi_inv, ups_k, k, eps):
        out = np.empty_like(chi_inv)
        u2 = ups_k * ups_k
        gain = 1.0 + eps * eps
        for i in range(chi_inv.size):
            sh = chi_inv[i] + k
            out[i] = 0.5 * (sh * sh * gain / u2 + u2)
        return out

    @njit(cache=True)
    def _lossy_bound_nb(chi_inv, k, eps):
        out = np.empty_like(chi_inv)
        e2 = eps * eps
        for i in range(chi_inv.size):
            sh = chi_inv[i] + k
            out[i] = math.sqrt(sh * sh + e2 * chi_inv[i] * chi_inv[i])
        return out

    @njit(cache=True)
    def _hybrid_full_nb(chi_i_inv, chi_s_inv, ups, k, k_loss, eps_i, eps_s, r):
        out = np.empty_like(chi_i_inv)
        ch = math.cosh(2.0 * r)
        sh = math.sinh(2.0 * r)
        u2 = ups * ups
        for i in range(chi_i_inv.size):
            ci = chi_i_inv[i]
            cs = chi_s_inv[i] + k
            csl = chi_s_inv[i] + k_loss
            s_i0 = 0.5 * (ci * ci / u2 + u2)
            s_s0 = 0.5 * (cs * cs / u2 + u2)
            s_si0 = 0.5 * (u2 - ci * cs / u2)
            s_il = 0.5 * eps_i * eps_i * ci * ci / u2
            s_sl = 0.5 * eps_s * eps_s * csl * csl / u2
            s_i = s_i0 * ch + s_il
            s_s = s_s0 * ch + s_sl
            s_is = s_si0 * sh
            out[i] = s_i - s_is * s_is / s_s
        return out

    @njit(cache=True)
    def _hybrid_approx_nb(chi_i_inv, chi_s_inv, ups, eps_i, eps_s, r, real_mode):
        out = np.empty_like(chi_i_inv)
        ch = math.cosh(2.0 * r)
        u2 = ups * ups
        ei2 = eps_i * eps_i
        es2 = eps_s * eps_s
        for i in range(chi_i_inv.size):
            ci2 = chi_i_inv[i] * chi_i_inv[i]
            base = 0.5 * (ci2 / u2 + u2) / ch
            if real_mode:
                loss = 0.5 * (ei2 + es2) * ci2 / u2
            else:
                cs2 = chi_s_inv[i] * chi_s_inv[i]
                loss = 0.5 * (ei2 * ci2 + es2 * cs2) / u2
            out[i] = base + loss
        return out

    position_meter = _position_meter_nb
    lossy_virtual = _lossy_virtual_nb
    lossy_real = _lossy_real_nb
    lossy_bound = _lossy_bound_nb
    hybrid_full = _hybrid_full_nb
    hybrid_approx = _hybrid_approx_nb
else:
    position_meter = _position_meter_np
    lossy_virtual = _lossy_virtual_np
    lossy_real = _lossy_real_np
    lossy_bound = _lossy_bound_np
    hybrid_full = _hybrid_full_np
    hybrid_approx = _hybrid_approx_np
