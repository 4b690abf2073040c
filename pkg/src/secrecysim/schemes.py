"""Per-realization evaluation of each transmission scheme.

Each scheme has a scalar form taking one :class:`TrialGains` (or gain lists)
and returning a :class:`TrialOutcome`, and a ``*_batch`` form over numpy
arrays with one row per trial that the estimator uses. Both are built from
the same :mod:`link_metrics` formulas.

Ties in every selection rule go to the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import TrialGains
from .errors import InvalidParameterError, NoRelayError
from .link_metrics import (
    af_end_to_end_snr,
    channel_capacity,
    relay_selection_metric,
    secrecy_capacity,
)

EVE_MODES = ("phase2_only", "combine_phases")
CSI_MODES = ("main_only", "global")
SCHEDULING_POLICIES = ("max_capacity", "round_robin")


@dataclass(frozen=True)
class TrialOutcome:
    c_main: float
    c_wiretap: float
    c_secrecy: float
    selected_index: Optional[int] = None

    @property
    def intercepted(self) -> bool:
        # a zero secrecy capacity is not an interception
        return self.c_secrecy < 0

    @classmethod
    def of(cls, c_main, c_wiretap, selected_index=None) -> "TrialOutcome":
        return cls(c_main, c_wiretap, secrecy_capacity(c_main, c_wiretap), selected_index)


def _prelog(prelog_half):
    return 0.5 if prelog_half else 1.0


def _check_gamma(gamma_s):
    if not gamma_s >= 0:
        raise InvalidParameterError(f"gamma_s must be >= 0, got {gamma_s}")


def _check_eve_mode(eve_mode):
    if eve_mode not in EVE_MODES:
        raise InvalidParameterError(f"eve_mode must be one of {EVE_MODES}, got {eve_mode!r}")


# -- direct transmission ------------------------------------------------------

def direct_transmission_trial(gamma_s: float, gains: TrialGains) -> TrialOutcome:
    _check_gamma(gamma_s)
    return TrialOutcome.of(
        channel_capacity(gamma_s * gains.g_sd),
        channel_capacity(gamma_s * gains.g_se),
    )


def direct_batch(gamma_s, g_sd, g_se):
    """Main and wiretap capacities of direct transmission, one entry per trial."""
    return channel_capacity(gamma_s * g_sd), channel_capacity(gamma_s * g_se)


# -- AF best-relay selection --------------------------------------------------

def best_relay_selection(gains: TrialGains) -> int:
    """Index of the relay maximizing the main-channel metric.

    Only ``g_si`` and ``g_id`` are consulted; wiretap gains never influence
    the choice.
    """
    if gains.m == 0:
        raise NoRelayError("best relay selection needs at least one relay")
    metrics = [relay_selection_metric(g_si, g_id) for g_si, g_id, _ in gains.relays]
    return int(np.argmax(metrics))


def select_best_relay_batch(g_si, g_id):
    """Row-wise best relay for ``(n, M)`` gain arrays."""
    if np.shape(g_si)[-1] == 0:
        raise NoRelayError("best relay selection needs at least one relay")
    return np.argmax(relay_selection_metric(g_si, g_id), axis=-1)


def relay_transmission_trial(
    gamma_s: float,
    gains: TrialGains,
    prelog_half: bool = True,
    eve_mode: str = "phase2_only",
) -> TrialOutcome:
    """AF relaying through the best relay, with source and relay each at half power.

    In ``phase2_only`` mode the eavesdropper hears only the relay's
    retransmission; in ``combine_phases`` it also receives the source
    broadcast directly and adds the two SNRs.
    """
    _check_gamma(gamma_s)
    _check_eve_mode(eve_mode)
    i = best_relay_selection(gains)
    g_si, g_id, g_ie = gains.relays[i]
    half = gamma_s / 2.0
    gamma1, gamma2, gamma_e = half * g_si, half * g_id, half * g_ie
    snr_eve = af_end_to_end_snr(gamma1, gamma_e)
    if eve_mode == "combine_phases":
        snr_eve += half * gains.g_se
    p = _prelog(prelog_half)
    return TrialOutcome.of(
        channel_capacity(af_end_to_end_snr(gamma1, gamma2), p),
        channel_capacity(snr_eve, p),
        i,
    )


def relay_batch(gamma_s, g_si, g_id, g_ie, g_se=None, prelog_half=True, eve_mode="phase2_only"):
    """Relay-scheme capacities for the already selected relay's gains (1-D arrays)."""
    _check_eve_mode(eve_mode)
    half = gamma_s / 2.0
    gamma1 = half * g_si
    snr_eve = af_end_to_end_snr(gamma1, half * g_ie)
    if eve_mode == "combine_phases":
        snr_eve = snr_eve + half * g_se
    p = _prelog(prelog_half)
    return (
        channel_capacity(af_end_to_end_snr(gamma1, half * g_id), p),
        channel_capacity(snr_eve, p),
    )


# -- transmit antenna selection -----------------------------------------------

def _tas_capacities(gamma_s, main, eve):
    return channel_capacity(gamma_s * main), channel_capacity(gamma_s * eve)


def tas_select_batch(gamma_s, main, eve, csi_mode):
    """Row-wise antenna choice for ``(n, M)`` main/eavesdropper gain arrays."""
    if csi_mode == "main_only":
        return np.argmax(main, axis=-1)
    if csi_mode == "global":
        return np.argmax(secrecy_capacity(*_tas_capacities(gamma_s, main, eve)), axis=-1)
    raise InvalidParameterError(f"csi_mode must be one of {CSI_MODES}, got {csi_mode!r}")


def transmit_antenna_selection_trial(
    gamma_s: float,
    main_gains: Sequence[float],
    eve_gains: Sequence[float],
    csi_mode: str = "main_only",
) -> TrialOutcome:
    """Single-antenna receivers; the transmitter picks one of M antennas.

    ``main_only`` maximizes the main-channel gain, ``global`` maximizes the
    per-antenna secrecy capacity.
    """
    _check_gamma(gamma_s)
    main = np.asarray(main_gains, dtype=float)
    eve = np.asarray(eve_gains, dtype=float)
    if main.size == 0 or main.shape != eve.shape or main.ndim != 1:
        raise InvalidParameterError("main_gains and eve_gains must be equal-length, non-empty lists")
    k = int(tas_select_batch(gamma_s, main, eve, csi_mode))
    # report the same per-antenna values the selection compared
    c_main, c_wiretap = _tas_capacities(gamma_s, main, eve)
    return TrialOutcome.of(float(c_main[k]), float(c_wiretap[k]), k)


# -- multiuser scheduling -----------------------------------------------------

def multiuser_schedule(user_gains: Sequence[float], policy: str = "max_capacity", slot: int = 0) -> int:
    m = len(user_gains)
    if m == 0:
        raise InvalidParameterError("at least one user is required")
    if policy == "max_capacity":
        # capacity is increasing in gain, so the best gain is the best throughput
        return int(np.argmax(user_gains))
    if policy == "round_robin":
        if slot < 0:
            raise InvalidParameterError(f"slot must be >= 0, got {slot}")
        return int(slot) % m
    raise InvalidParameterError(f"policy must be one of {SCHEDULING_POLICIES}, got {policy!r}")


def multiuser_trial(
    gamma_s: float,
    user_gains: Sequence[float],
    g_se: float,
    policy: str = "max_capacity",
    slot: int = 0,
) -> TrialOutcome:
    """Downlink to the scheduled user while one eavesdropper listens to the source."""
    _check_gamma(gamma_s)
    k = multiuser_schedule(user_gains, policy, slot)
    return TrialOutcome.of(
        channel_capacity(gamma_s * user_gains[k]),
        channel_capacity(gamma_s * g_se),
        k,
    )


def multiuser_select_batch(user_gains, policy, slots):
    m = np.shape(user_gains)[-1]
    if m == 0:
        raise InvalidParameterError("at least one user is required")
    if policy == "max_capacity":
        return np.argmax(user_gains, axis=-1)
    if policy == "round_robin":
        return np.asarray(slots, dtype=np.int64) % m
    raise InvalidParameterError(f"policy must be one of {SCHEDULING_POLICIES}, got {policy!r}")
