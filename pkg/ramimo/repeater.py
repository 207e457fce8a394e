# Copyright 2024 The ramimo developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Amplify-and-forward repeaters acting as channel scatterers

Repeaters are single-antenna, linear time-invariant and reciprocal: each one
multiplies whatever it receives by a fixed complex gain.  Only single-bounce
paths are modelled (user to repeater to base station), repeater-to-repeater
coupling is ignored.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, noise_power_linear
from .report.tables import format_float, write_rows
from .scenario import ScenarioConfig

logger = logging.getLogger(__name__)


@enum.unique
class GainLimit(enum.Enum):
    """Constraint that set a repeater's gain"""

    IDLE = "idle"
    CAP = "cap"
    TAU = "tau"
    POUT = "pout"


@dataclass(frozen=True)
class RepeaterState:
    """Repeater configuration for one drop

    :param active: activation flag per repeater
    :param amp_gain_linear: power gain ``g^2`` per repeater, zero when idle
    :param response_phase: phase of the repeater response in radians, shared
        by every signal passing through it
    :param limit: constraint that bounded each gain
    :param input_power: received user signal power per repeater in watts
    """

    active: np.ndarray
    amp_gain_linear: np.ndarray
    response_phase: np.ndarray
    limit: tuple[GainLimit, ...]
    input_power: np.ndarray

    @property
    def num_active(self) -> int:
        return int(np.count_nonzero(self.active))

    @property
    def amplitude_gain(self) -> np.ndarray:
        return np.sqrt(self.amp_gain_linear)

    @property
    def response(self) -> np.ndarray:
        """Complex amplitude response ``g e^(i phi)`` per repeater"""
        return self.amplitude_gain * np.exp(1j * self.response_phase)

    def gain_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10 * np.log10(self.amp_gain_linear)

    def mean_gain_db(self) -> float | None:
        """Mean power gain in dB over repeaters with a non-zero gain"""
        amplifying = self.amp_gain_linear > 0
        if not np.any(amplifying):
            return None
        return float(np.mean(10 * np.log10(self.amp_gain_linear[amplifying])))

    def write_csv(self, path: str) -> None:
        gains = self.gain_db()
        rows = (
            (
                str(r),
                str(int(self.active[r])),
                format_float(gains[r]) if np.isfinite(gains[r]) else "-inf",
                self.limit[r].value,
            )
            for r in range(len(self.active))
        )
        write_rows(path, ("repeater", "active", "gain_db", "limit"), rows)


def input_power(realization: ChannelRealization, cfg: ScenarioConfig) -> np.ndarray:
    """User signal power received by each repeater, in watts"""
    powers = np.full(realization.num_users, cfg.user_tx_power)
    return np.abs(realization.f_user_site) ** 2 @ powers


def activation_threshold(cfg: ScenarioConfig) -> float:
    """Input power above which a repeater switches on, in watts

    The repeater noise floor raised by the activation margin.
    """
    floor = noise_power_linear(cfg.bandwidth, cfg.temperature, cfg.rep_nf_db)
    return floor * 10 ** (cfg.activation_snr_margin_db / 10)


def activation_mask(realization: ChannelRealization, cfg: ScenarioConfig) -> np.ndarray:
    """Repeaters whose incoming signal power exceeds the activation threshold"""
    return input_power(realization, cfg) > activation_threshold(cfg)


def gain_control(
    realization: ChannelRealization,
    active: np.ndarray,
    cfg: ScenarioConfig,
    rng: np.random.Generator,
) -> RepeaterState:
    """Set the gain of every active repeater to the smallest of three limits

    * the amplification cap,
    * the tau limit, keeping the base station noise at least ``tau`` above
      the repeater noise it receives through the repeater's own channel,
    * the output power limit, counting the amplified signal and noise.

    The response phases are drawn for every repeater, active or not, so the
    random stream advances identically for any configuration.
    """
    if cfg.zero_phase:
        phase = np.zeros(realization.num_sites)
    else:
        phase = rng.uniform(0.0, 2 * math.pi, realization.num_sites)

    sigma2_bs = noise_power_linear(cfg.bandwidth, cfg.temperature, cfg.bs_nf_db)
    sigma2_rep = noise_power_linear(cfg.bandwidth, cfg.temperature, cfg.rep_nf_db)
    p_in = input_power(realization, cfg)

    # per-antenna average gain of the repeater to base station channel
    beta = np.sum(np.abs(realization.h_site_bs) ** 2, axis=0) / realization.num_antennas
    tau = 10 ** (cfg.tau_db / 10)

    cap_limit = np.full(realization.num_sites, 10 ** (cfg.gain_cap_db / 10))
    tau_limit = np.full(realization.num_sites, math.inf)
    received = beta > 0
    if math.isinf(tau):
        tau_limit[received] = 0.0
    else:
        tau_limit[received] = sigma2_bs / (tau * sigma2_rep * beta[received])
    pout_limit = cfg.rep_max_out_power / (p_in + sigma2_rep)

    limits = np.stack([cap_limit, tau_limit, pout_limit])
    binding = np.argmin(limits, axis=0)
    gain = np.where(active, np.min(limits, axis=0), 0.0)

    tags = (GainLimit.CAP, GainLimit.TAU, GainLimit.POUT)
    limit = tuple(
        tags[b] if on else GainLimit.IDLE for b, on in zip(binding, active)
    )

    return RepeaterState(
        active=np.asarray(active, dtype=bool),
        amp_gain_linear=gain,
        response_phase=phase,
        limit=limit,
        input_power=p_in,
    )


def _amplifying(state: RepeaterState) -> np.ndarray:
    return np.flatnonzero(state.amp_gain_linear > 0)


def composite_channel(realization: ChannelRealization, state: RepeaterState) -> np.ndarray:
    """Direct channel plus every single-bounce path through a repeater

    Column k is ``h_k + sum_r g_r e^(i phi_r) f_(k,r) h_r`` over repeaters
    with a non-zero gain, ``(M, K)``.
    """
    selected = _amplifying(state)
    if len(selected) == 0:
        return realization.h_direct

    scattered = state.response[selected, np.newaxis] * realization.f_user_site[selected]
    return realization.h_direct + realization.h_site_bs[:, selected] @ scattered


def repeated_noise_covariance(
    realization: ChannelRealization, state: RepeaterState, cfg: ScenarioConfig
) -> np.ndarray:
    """Covariance of the amplified repeater noise at the base station array

    ``sum_r g_r^2 sigma_rep^2 h_r h_r^H``, ``(M, M)`` Hermitian PSD.
    """
    m = realization.num_antennas
    selected = _amplifying(state)
    if len(selected) == 0:
        return np.zeros((m, m), dtype=complex)

    sigma2_rep = noise_power_linear(cfg.bandwidth, cfg.temperature, cfg.rep_nf_db)
    h = realization.h_site_bs[:, selected]
    covariance = (h * (state.amp_gain_linear[selected] * sigma2_rep)) @ h.conj().T
    return (covariance + covariance.conj().T) / 2
