"""Capacity and SNR formulas.

All functions accept Python floats or numpy arrays and work elementwise.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError


def _require_nonneg(name, x):
    if np.any(np.asarray(x) < 0) or np.any(np.isnan(x)):
        raise InvalidParameterError(f"{name} must be >= 0")


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def channel_capacity(snr, prelog=1.0):
    """``prelog * log2(1 + snr)`` in bits/s/Hz."""
    _require_nonneg("snr", snr)
    return _out(prelog * np.log2(1.0 + np.asarray(snr, dtype=float)))


def secrecy_capacity(c_main, c_wiretap):
    # sign preserved; callers clamp to max(., 0) where the positive part is wanted
    return _out(np.asarray(c_main, dtype=float) - np.asarray(c_wiretap, dtype=float))


def af_end_to_end_snr(gamma1, gamma2):
    """Two-hop amplify-and-forward SNR ``g1*g2 / (g1 + g2 + 1)`` with a noisy relay."""
    _require_nonneg("gamma1", gamma1)
    _require_nonneg("gamma2", gamma2)
    g1 = np.asarray(gamma1, dtype=float)
    g2 = np.asarray(gamma2, dtype=float)
    return _out(g1 * g2 / (g1 + g2 + 1.0))


def relay_selection_metric(g_si, g_id):
    """Max-main-channel relay ranking ``g_si*g_id / (g_si + g_id)``; 0 for a dead relay."""
    _require_nonneg("g_si", g_si)
    _require_nonneg("g_id", g_id)
    a = np.asarray(g_si, dtype=float)
    b = np.asarray(g_id, dtype=float)
    s = a + b
    with np.errstate(invalid="ignore", divide="ignore"):
        m = np.where(s > 0, a * b / np.where(s > 0, s, 1.0), 0.0)
    return _out(m)
