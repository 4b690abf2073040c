"""Monte Carlo estimates of ergodic secrecy capacity and intercept probability.

Trial ``t`` always uses stream ``t`` of the master seed. Trials are cut into
fixed-size chunks that may run on any number of threads; per-chunk
accumulators are merged in chunk order, so results are bitwise identical for
every thread count.

Node-based schemes (antenna selection, multiuser scheduling) take node
``k``'s main gain with mean ``sigma2_sd`` and, for antenna selection, its
eavesdropper gain with mean ``sigma2_se``. The multiuser eavesdropper
listens to the source with gain ``g_se``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import channel
from .channel import FadingParams
from .errors import InvalidParameterError
from .link_metrics import secrecy_capacity
from .schemes import (
    EVE_MODES,
    direct_batch,
    multiuser_select_batch,
    relay_batch,
    select_best_relay_batch,
    tas_select_batch,
)

SCHEMES = ("direct", "relay_selection", "tas_main", "tas_global", "multiuser_max", "multiuser_rr")
CHUNK_TRIALS = 1 << 16
Z95 = 1.96
THREADS_ENV = "SECRECYSIM_THREADS"


@dataclass(frozen=True)
class SchemeSpec:
    scheme: str
    m: int = 0
    prelog_half: bool = True
    eve_mode: str = "phase2_only"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidParameterError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.scheme != "direct" and self.m < 1:
            raise InvalidParameterError(f"scheme {self.scheme!r} needs m >= 1, got {self.m}")
        if self.m < 0:
            raise InvalidParameterError(f"m must be >= 0, got {self.m}")
        if self.eve_mode not in EVE_MODES:
            raise InvalidParameterError(f"eve_mode must be one of {EVE_MODES}, got {self.eve_mode!r}")


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_err: float
    ci95_low: float
    ci95_high: float
    n_trials: int

    @classmethod
    def from_moments(cls, mean: float, std_err: float, n_trials: int) -> "Estimate":
        half = Z95 * std_err
        return cls(mean, std_err, mean - half, mean + half, n_trials)

    def overlaps(self, other: "Estimate") -> bool:
        return self.ci95_low <= other.ci95_high and other.ci95_low <= self.ci95_high


def default_threads() -> int:
    v = os.environ.get(THREADS_ENV)
    if not v:
        return 1
    try:
        return max(1, int(v))
    except ValueError:
        raise InvalidParameterError(f"{THREADS_ENV} must be an integer, got {v!r}") from None


def direct_intercept_closed_form(sigma2_sd: float, sigma2_se: float) -> float:
    """Probability that the wiretap gain exceeds the main gain, both exponential."""
    if not (sigma2_sd > 0 and sigma2_se > 0):
        raise InvalidParameterError("both mean gains must be > 0")
    return sigma2_se / (sigma2_sd + sigma2_se)


# -- per-trial kernels ----------------------------------------------------------

def _outcomes(spec: SchemeSpec, params_list: Sequence[FadingParams], gamma_s, seed, streams):
    """``(c_main, c_wiretap, selected)`` arrays for each params entry, trial streams ``streams``."""
    out = []
    if spec.scheme == "direct":
        g = channel.unit_gain_block(seed, streams, 2, channel.LANE_DIRECT)
        for p in params_list:
            out.append((*direct_batch(gamma_s, p.sigma2_sd * g[:, 0], p.sigma2_se * g[:, 1]), None))
        return out

    m = spec.m
    if spec.scheme == "relay_selection":
        main = channel.unit_gain_block(seed, streams, 2 * m, channel.LANE_RELAY_MAIN)
        g_se = None
        if spec.eve_mode == "combine_phases":
            g_se = channel.unit_gain_block(seed, streams, 2, channel.LANE_DIRECT)[:, 1]
        rows = np.arange(len(streams))
        cache = {}
        for p in params_list:
            key = (p.sigma2_sr, p.sigma2_rd)
            if key not in cache:
                g_si = p.sigma2_sr * main[:, 0::2]
                g_id = p.sigma2_rd * main[:, 1::2]
                sel = select_best_relay_batch(g_si, g_id)
                cache[key] = (
                    sel,
                    g_si[rows, sel],
                    g_id[rows, sel],
                    channel.unit_gains(seed, streams, sel, channel.LANE_RELAY_EVE),
                )
            sel, si, idd, ie_unit = cache[key]
            c = relay_batch(
                gamma_s,
                si,
                idd,
                p.re * ie_unit,
                None if g_se is None else p.sigma2_se * g_se,
                spec.prelog_half,
                spec.eve_mode,
            )
            out.append((*c, sel))
        return out

    if spec.scheme in ("tas_main", "tas_global"):
        node = channel.unit_gain_block(seed, streams, 2 * m, channel.LANE_NODE)
        csi = "main_only" if spec.scheme == "tas_main" else "global"
        rows = np.arange(len(streams))
        for p in params_list:
            main = p.sigma2_sd * node[:, 0::2]
            eve = p.sigma2_se * node[:, 1::2]
            sel = tas_select_batch(gamma_s, main, eve, csi)
            out.append((*direct_batch(gamma_s, main[rows, sel], eve[rows, sel]), sel))
        return out

    # multiuser
    users = channel.unit_gain_block(seed, streams, 2 * m, channel.LANE_NODE)[:, 0::2]
    g_se = channel.unit_gain_block(seed, streams, 2, channel.LANE_DIRECT)[:, 1]
    policy = "max_capacity" if spec.scheme == "multiuser_max" else "round_robin"
    sel = multiuser_select_batch(users, policy, streams)
    picked = users[np.arange(len(streams)), sel]
    for p in params_list:
        out.append((*direct_batch(gamma_s, p.sigma2_sd * picked, p.sigma2_se * g_se), sel))
    return out


def trial_outcomes(spec: SchemeSpec, params: FadingParams, gamma_s: float, seed: int, stream_ids):
    """Per-trial dump for debugging: dict of ``c_main``, ``c_wiretap``, ``c_secrecy``, ``selected``."""
    streams = np.asarray(stream_ids, dtype=np.uint64)
    c_main, c_wiretap, sel = _outcomes(spec, [params], gamma_s, seed, streams)[0]
    return {
        "c_main": c_main,
        "c_wiretap": c_wiretap,
        "c_secrecy": secrecy_capacity(c_main, c_wiretap),
        "selected": sel,
    }


# -- accumulation -------------------------------------------------------------

@dataclass
class _Acc:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0
    intercepts: int = 0

    def merge(self, other: "_Acc") -> None:
        # Chan et al. pairwise update; called in fixed chunk order
        n = self.n + other.n
        if n == 0:
            return
        delta = other.mean - self.mean
        self.mean += delta * other.n / n
        self.m2 += other.m2 + delta * delta * self.n * other.n / n
        self.n = n
        self.intercepts += other.intercepts


def _chunk_acc(spec, params_list, gamma_s, seed, start, stop):
    streams = np.arange(start, stop, dtype=np.uint64)
    accs = []
    for c_main, c_wiretap, _ in _outcomes(spec, params_list, gamma_s, seed, streams):
        cs = secrecy_capacity(c_main, c_wiretap)
        pos = np.maximum(cs, 0.0)
        mean = float(pos.mean())
        accs.append(
            _Acc(
                n=len(streams),
                mean=mean,
                m2=float(np.square(pos - mean).sum()),
                intercepts=int(np.count_nonzero(cs < 0)),
            )
        )
    return accs


def _check_inputs(params_list, gamma_s, n, seed):
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if not (math.isfinite(gamma_s) and gamma_s >= 0):
        raise InvalidParameterError(f"gamma_s must be finite and >= 0, got {gamma_s}")
    channel.SeedSpec(seed, n - 1)
    for p in params_list:
        p.validate()


def estimate_curve(
    spec: SchemeSpec,
    params_list: Sequence[FadingParams],
    gamma_s: float,
    n: int,
    seed: int,
    threads: Optional[int] = None,
) -> list[tuple[Estimate, Estimate]]:
    """``(ergodic secrecy capacity, intercept probability)`` for each params entry.

    All entries reuse the same ``n`` trial streams, so each result equals the
    corresponding single-point estimate exactly.
    """
    params_list = list(params_list)
    _check_inputs(params_list, gamma_s, n, seed)
    threads = default_threads() if threads is None else threads
    if threads < 1:
        raise InvalidParameterError(f"threads must be >= 1, got {threads}")
    bounds = [(s, min(s + CHUNK_TRIALS, n)) for s in range(0, n, CHUNK_TRIALS)]

    def work(b):
        return _chunk_acc(spec, params_list, gamma_s, seed, *b)

    if threads == 1 or len(bounds) == 1:
        parts = map(work, bounds)
        totals = _reduce(parts, len(params_list))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            totals = _reduce(pool.map(work, bounds), len(params_list))

    results = []
    for acc in totals:
        sd = math.sqrt(acc.m2 / (acc.n - 1)) if acc.n > 1 else 0.0
        ergodic = Estimate.from_moments(acc.mean, sd / math.sqrt(acc.n), acc.n)
        p = acc.intercepts / acc.n
        intercept = Estimate.from_moments(p, math.sqrt(p * (1.0 - p) / acc.n), acc.n)
        results.append((ergodic, intercept))
    return results


def _reduce(parts, k):
    totals = [_Acc() for _ in range(k)]
    for chunk in parts:
        for total, acc in zip(totals, chunk):
            total.merge(acc)
    return totals


def ergodic_secrecy_capacity(
    spec: SchemeSpec, params: FadingParams, gamma_s: float, n: int, seed: int, threads: Optional[int] = None
) -> Estimate:
    """Sample mean of ``max(C_s, 0)`` over ``n`` trials."""
    return estimate_curve(spec, [params], gamma_s, n, seed, threads)[0][0]


def intercept_probability(
    spec: SchemeSpec, params: FadingParams, gamma_s: float, n: int, seed: int, threads: Optional[int] = None
) -> Estimate:
    """Fraction of trials with ``C_s < 0``, with a binomial standard error."""
    return estimate_curve(spec, [params], gamma_s, n, seed, threads)[0][1]
