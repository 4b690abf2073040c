"""Rayleigh-fading power gains drawn from counter-based random streams.

Every trial owns a stream identified by ``(master_seed, stream_id)``. A draw
is addressed by a ``(lane, slot)`` pair within that stream and produced by one
Philox4x32-10 block evaluated at counter ``(stream_lo, stream_hi, slot // 2,
lane)`` keyed by the master seed, so any gain of any trial can be computed in
isolation, in any order, on any worker.

Lane layout (``i`` is a relay index, ``k`` a node index)::

    lane 0  slot 0      g_sd   source -> destination
            slot 1      g_se   source -> eavesdropper
    lane 1  slot 2i     g_si   source -> relay i
            slot 2i+1   g_id   relay i -> destination
    lane 2  slot i      g_ie   relay i -> eavesdropper
    lane 3  slot 2k     main gain of transmit antenna / user k
            slot 2k+1   eavesdropper gain of transmit antenna k

Relay ``i`` sees the same draws whatever the relay count, so sweeps over M
use common random numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidParameterError

_U64 = np.uint64
_MASK32 = _U64(0xFFFFFFFF)
_SHIFT32 = _U64(32)
_PHILOX_M0 = _U64(0xD2511F53)
_PHILOX_M1 = _U64(0xCD9E8D57)
_PHILOX_W0 = 0x9E3779B9
_PHILOX_W1 = 0xBB67AE85
_PHILOX_ROUNDS = 10
_TWO_POW_M53 = 2.0 ** -53
_UINT64_MAX = 2**64 - 1

LANE_DIRECT = 0
LANE_RELAY_MAIN = 1
LANE_RELAY_EVE = 2
LANE_NODE = 3


@dataclass(frozen=True)
class FadingParams:
    """Mean power gains of every link in the scenario (linear scale)."""

    sigma2_sd: float = 0.5
    sigma2_sr: float = 2.0
    sigma2_rd: float = 2.0
    sigma2_se: float = 0.5
    sigma2_re: Optional[float] = None  # None -> same as sigma2_se

    @property
    def re(self) -> float:
        return self.sigma2_se if self.sigma2_re is None else self.sigma2_re

    def validate(self, allow_zero: bool = False) -> "FadingParams":
        for name in ("sigma2_sd", "sigma2_sr", "sigma2_rd", "sigma2_se"):
            _check_variance(name, getattr(self, name), allow_zero)
        _check_variance("sigma2_re", self.re, allow_zero)
        return self

    @classmethod
    def from_mer(
        cls,
        mer_db: float,
        sigma2_sd: float = 0.5,
        sigma2_sr: float = 2.0,
        sigma2_rd: float = 2.0,
        sigma2_re: Optional[float] = None,
    ) -> "FadingParams":
        return cls(
            sigma2_sd=sigma2_sd,
            sigma2_sr=sigma2_sr,
            sigma2_rd=sigma2_rd,
            sigma2_se=mer_to_sigma_se2(sigma2_sd, mer_db),
            sigma2_re=sigma2_re,
        )


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= int(v) <= _UINT64_MAX:
                raise InvalidParameterError(f"{name} must be a 64-bit unsigned integer, got {v}")


@dataclass(frozen=True)
class TrialGains:
    """Instantaneous power gains of one fading realization.

    ``relays`` holds one ``(g_si, g_id, g_ie)`` triple per relay.
    """

    g_sd: float
    g_se: float
    relays: tuple[tuple[float, float, float], ...] = field(default_factory=tuple)

    @property
    def m(self) -> int:
        return len(self.relays)


def _check_variance(name, value, allow_zero=True):
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise InvalidParameterError(f"{name} must be finite and {bound}, got {value}")


def db_to_linear(x_db):
    if np.ndim(x_db):
        return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)
    return 10.0 ** (float(x_db) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def mer_to_sigma_se2(sigma2_sd: float, mer_db: float) -> float:
    """Eavesdropper mean gain giving main-to-eavesdropper ratio ``mer_db``."""
    if not sigma2_sd > 0:
        raise InvalidParameterError(f"sigma2_sd must be > 0, got {sigma2_sd}")
    return sigma2_sd / db_to_linear(mer_db)


def sample_rayleigh_power(variance: float, rng: np.random.Generator, size=None):
    """Draw |h|^2 ~ Exponential(mean=variance) by inverting the CDF of ``rng.random()``."""
    _check_variance("variance", variance)
    u = rng.random(size)
    return -variance * np.log1p(-u)


def philox4x32(c0, c1, c2, c3, k0: int, k1: int):
    """Philox4x32-10 block function, vectorized over the counter words.

    Counter words may be scalars or arrays holding values below 2**32; the
    result is four ``uint64`` arrays each holding one 32-bit output word.
    """
    shape = np.broadcast_shapes(*(np.shape(c) for c in (c0, c1, c2, c3)))
    c0, c1, c2, c3 = (np.array(np.broadcast_to(np.asarray(c, dtype=_U64), shape)) for c in (c0, c1, c2, c3))
    p0 = np.empty_like(c0)
    p1 = np.empty_like(c0)
    for _ in range(_PHILOX_ROUNDS):
        np.multiply(c0, _PHILOX_M0, out=p0)
        np.multiply(c2, _PHILOX_M1, out=p1)
        # in-place round; each word is read before it is overwritten
        np.right_shift(p1, _SHIFT32, out=c0)
        c0 ^= c1
        c0 ^= _U64(k0)
        np.bitwise_and(p1, _MASK32, out=c1)
        np.right_shift(p0, _SHIFT32, out=c2)
        c2 ^= c3
        c2 ^= _U64(k1)
        np.bitwise_and(p0, _MASK32, out=c3)
        k0 = (k0 + _PHILOX_W0) & 0xFFFFFFFF
        k1 = (k1 + _PHILOX_W1) & 0xFFFFFFFF
    return c0, c1, c2, c3


def _split_seed(master_seed: int) -> tuple[int, int]:
    master_seed = int(master_seed)
    if not 0 <= master_seed <= _UINT64_MAX:
        raise InvalidParameterError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
    return master_seed & 0xFFFFFFFF, master_seed >> 32


def _stream_words(stream_ids):
    s = np.asarray(stream_ids, dtype=_U64)
    return s & _MASK32, s >> _SHIFT32


def _to_unit(hi, lo):
    return ((((hi << _SHIFT32) | lo) >> _U64(11)).astype(np.float64)) * _TWO_POW_M53


def uniform_slots(master_seed: int, stream_ids, slots, lane: int = 0):
    """Uniform [0, 1) values for the given (stream, slot) pairs.

    ``stream_ids`` and ``slots`` broadcast against each other; each output
    element depends only on its own ``(master_seed, stream_id, slot)``.
    """
    k0, k1 = _split_seed(master_seed)
    s_lo, s_hi = _stream_words(stream_ids)
    slots = np.asarray(slots, dtype=_U64)
    x0, x1, x2, x3 = philox4x32(s_lo, s_hi, slots >> _U64(1), lane, k0, k1)
    odd = (slots & _U64(1)).astype(bool)
    return np.where(odd, _to_unit(x2, x3), _to_unit(x0, x1))


def uniform_block(master_seed: int, stream_ids, n_slots: int, lane: int = 0):
    """Uniforms for slots ``0..n_slots-1`` of every stream, shape ``(len(stream_ids), n_slots)``.

    Equal to ``uniform_slots`` elementwise, but evaluates each Philox block once
    for both of its slots.
    """
    k0, k1 = _split_seed(master_seed)
    s_lo, s_hi = _stream_words(np.asarray(stream_ids)[:, None])
    blocks = np.arange((n_slots + 1) // 2, dtype=_U64)[None, :]
    x0, x1, x2, x3 = philox4x32(s_lo, s_hi, blocks, lane, k0, k1)
    out = np.empty((s_lo.shape[0], 2 * blocks.shape[1]))
    out[:, 0::2] = _to_unit(x0, x1)
    out[:, 1::2] = _to_unit(x2, x3)
    return out[:, :n_slots]


def unit_exponential(u):
    """Inverse CDF of Exponential(1); ``u`` in [0, 1) maps to a finite value."""
    return -np.log1p(-u)


def unit_gains(master_seed: int, stream_ids, slots, lane: int = 0):
    return unit_exponential(uniform_slots(master_seed, stream_ids, slots, lane))


def unit_gain_block(master_seed: int, stream_ids, n_slots: int, lane: int = 0):
    return unit_exponential(uniform_block(master_seed, stream_ids, n_slots, lane))


def draw_trial_gains(params: FadingParams, m: int, seed: SeedSpec) -> TrialGains:
    """All ``2 + 3m`` link gains of one trial, a pure function of its arguments."""
    if m < 0:
        raise InvalidParameterError(f"relay count must be >= 0, got {m}")
    params.validate(allow_zero=True)
    stream = [seed.stream_id]
    direct = unit_gain_block(seed.master_seed, stream, 2, LANE_DIRECT)[0]
    main = unit_gain_block(seed.master_seed, stream, 2 * m, LANE_RELAY_MAIN)[0]
    eve = unit_gain_block(seed.master_seed, stream, m, LANE_RELAY_EVE)[0]
    relays = tuple(
        (
            float(params.sigma2_sr * main[2 * i]),
            float(params.sigma2_rd * main[2 * i + 1]),
            float(params.re * eve[i]),
        )
        for i in range(m)
    )
    return TrialGains(
        g_sd=float(params.sigma2_sd * direct[0]),
        g_se=float(params.sigma2_se * direct[1]),
        relays=relays,
    )
