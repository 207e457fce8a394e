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

"""Closed-form repeater hardware budget

Rules of thumb for the power amplifier backoff, the receive noise figure, I/Q
mismatch, filter delay and self-oscillation margin of a low-cost repeater,
plus the size of a reflecting surface matching a repeater's gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.signal

# adjacent channel leakage requirements of wide area and local area repeaters
ACLR_WIDE_AREA_DB = 45.0
ACLR_LOCAL_AREA_DB = 31.0

# normal cyclic prefix at 15 kHz subcarrier spacing
NORMAL_CYCLIC_PREFIX_S = 4.7e-6

IQ_SMALL_ERROR_LIMIT = 0.2


def pa_output_power_dbm(cp_dbm: float, aclr_db: float) -> float:
    """Average output power meeting an ACLR target, ``CP - ACLR/2 + 12``

    Third-order polynomial amplifier driven by an OFDM signal, ``cp_dbm`` is
    the output-referred 1 dB compression point.
    """
    if aclr_db < 0:
        raise ValueError("ACLR must not be negative")
    return cp_dbm - aclr_db / 2 + 12


def cascade_nf_db(passive_losses_db: Sequence[float], lna_nf_db: float) -> float:
    """Noise figure of lossy passives followed by the LNA

    A passive loss ahead of the LNA adds its loss to the noise figure, so the
    total is the sum in dB.
    """
    if lna_nf_db < 0 or any(loss < 0 for loss in passive_losses_db):
        raise ValueError("losses and noise figures must not be negative")
    return float(sum(passive_losses_db)) + lna_nf_db


def iq_evm_fraction(
    gain_err: float, phase_err: float, stages: int = 1, coherent: bool = True
) -> float:
    """EVM contribution of I/Q gain and phase mismatch

    Per conversion stage the image power gives ``sqrt(eps^2 + phi^2) / 2``
    (``phase_err`` in degrees).  Identical errors in correlated stages add
    linearly, independent ones (``coherent=False``) in power.
    """
    phase_rad = math.radians(phase_err)
    if abs(gain_err) >= IQ_SMALL_ERROR_LIMIT or abs(phase_rad) >= IQ_SMALL_ERROR_LIMIT:
        raise ValueError("I/Q errors outside the small error regime")
    if stages < 0:
        raise ValueError("number of stages must not be negative")
    per_stage = math.hypot(gain_err, phase_rad) / 2
    if coherent:
        return stages * per_stage
    return math.sqrt(stages) * per_stage


def _butterworth_zpk(order: int, bandwidth_hz: float) -> tuple[np.ndarray, np.ndarray, float]:
    if order < 1:
        raise ValueError("filter order must be at least 1")
    if bandwidth_hz <= 0:
        raise ValueError("filter bandwidth must be positive")
    zeros, poles, gain = scipy.signal.buttap(order)
    omega_c = 2 * math.pi * bandwidth_hz
    return zeros, poles * omega_c, gain * omega_c**order


def butterworth_group_delay_s(order: int, bandwidth_hz: float, at_freq_hz: float = 0.0) -> float:
    """Group delay of an analog lowpass Butterworth filter

    Obtained numerically as ``-d phase / d omega`` with a central difference
    on the unwrapped phase response.
    """
    if not 0 <= at_freq_hz < bandwidth_hz:
        raise ValueError("frequency must lie inside the filter passband")
    zeros, poles, gain = _butterworth_zpk(order, bandwidth_hz)

    omega = 2 * math.pi * at_freq_hz
    step = 2 * math.pi * bandwidth_hz * 1e-5
    _, response = scipy.signal.freqs_zpk(zeros, poles, gain, worN=[omega - step, omega + step])
    phase = np.unwrap(np.angle(response))
    return float(-(phase[1] - phase[0]) / (2 * step))


def butterworth_dc_group_delay_s(order: int, bandwidth_hz: float) -> float:
    """DC group delay from the pole angles, ``sum_k sin(theta_k) / omega_c``"""
    _, poles, _ = _butterworth_zpk(order, bandwidth_hz)
    return float(np.sum(-poles.real / np.abs(poles) ** 2))


def max_stable_gain_db(isolation_db: float, margin_db: float) -> float:
    """Largest gain of a single-antenna repeater that stays clear of oscillation"""
    if margin_db > isolation_db:
        raise ValueError("no stable gain: margin exceeds the PA-to-LNA isolation")
    return isolation_db - margin_db


def ris_equivalent_cells(gain_db: float) -> int:
    """Unit cells a reflecting surface needs to match a repeater's power gain

    The surface's power gain grows with the square of its cell count.
    """
    if gain_db < 0:
        raise ValueError("gain must not be negative")
    amplitude = math.sqrt(10 ** (gain_db / 10))
    return math.ceil(round(amplitude, 9))


class DelayVerdict(NamedTuple):
    passed: bool
    total_s: float
    ratio: float
    margin_s: float


def delay_budget_check(component_delays_s: Sequence[float], cyclic_prefix_s: float) -> DelayVerdict:
    """Compare the summed repeater delays against the cyclic prefix"""
    if any(delay < 0 for delay in component_delays_s):
        raise ValueError("delays must not be negative")
    if cyclic_prefix_s <= 0:
        raise ValueError("cyclic prefix must be positive")
    total = float(sum(component_delays_s))
    return DelayVerdict(
        passed=total <= cyclic_prefix_s,
        total_s=total,
        ratio=total / cyclic_prefix_s,
        margin_s=cyclic_prefix_s - total,
    )


class BudgetLine(NamedTuple):
    quantity: str
    label: str
    value: float
    unit: str


@dataclass(frozen=True)
class RepeaterBudget:
    """Hardware parameters of a repeater, defaults give a 5 dB NF, 20 dBm design"""

    filter_loss_db: float = 2.0
    switch_loss_db: float = 0.3
    lna_nf_db: float = 2.7
    cp_dbm: float = 28.0
    target_aclr_db: float = 40.0
    iq_gain_err: float = 0.01
    iq_phase_err: float = 1.0
    iq_stages: int = 2
    filter_order: int = 5
    filter_bandwidth_hz: float = 10e6
    processing_delay_s: float = 0.0
    isolation_db: float = 50.0
    stability_margin_db: float = 10.0
    cyclic_prefix_s: float = NORMAL_CYCLIC_PREFIX_S

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if value < 0:
                raise ValueError(f"{name} must not be negative")
        if self.filter_order < 1:
            raise ValueError("filter_order must be at least 1")

    def evaluate(self) -> list[BudgetLine]:
        """Every budget figure as labeled report lines"""
        filter_delay = butterworth_group_delay_s(self.filter_order, self.filter_bandwidth_hz)
        verdict = delay_budget_check([filter_delay, self.processing_delay_s], self.cyclic_prefix_s)
        stable_gain = max_stable_gain_db(self.isolation_db, self.stability_margin_db)
        evm = iq_evm_fraction(self.iq_gain_err, self.iq_phase_err, self.iq_stages)

        return [
            BudgetLine(
                "nf",
                "Noise figure",
                cascade_nf_db([self.filter_loss_db, self.switch_loss_db], self.lna_nf_db),
                "dB",
            ),
            BudgetLine(
                "pa-out",
                "PA output power",
                pa_output_power_dbm(self.cp_dbm, self.target_aclr_db),
                "dBm",
            ),
            BudgetLine("evm", "I/Q EVM", 100 * evm, "%"),
            BudgetLine("delay", "Filter group delay", filter_delay * 1e9, "ns"),
            BudgetLine("delay-total", "Total repeater delay", verdict.total_s * 1e9, "ns"),
            BudgetLine("delay-ratio", "Delay / cyclic prefix", verdict.ratio, ""),
            BudgetLine("delay-pass", "Delay budget met", float(verdict.passed), ""),
            BudgetLine("stable-gain", "Max stable gain", stable_gain, "dB"),
            BudgetLine("ris-cells", "RIS cells for same gain", ris_equivalent_cells(stable_gain), "cells"),
        ]
