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

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channel import ChannelRealization, noise_power_linear
from .repeater import RepeaterState, composite_channel, repeated_noise_covariance
from .scenario import Mode, ScenarioConfig


@dataclass(frozen=True)
class UplinkProblem:
    """Inputs of the uplink combiner

    :param H: effective channel, ``(M, K)``
    :param p: transmit power per user in watts, ``(K,)``
    :param C_noise: noise covariance at the receiver, ``(M, M)``, Hermitian
        positive semidefinite with a positive diagonal
    """

    H: np.ndarray
    p: np.ndarray
    C_noise: np.ndarray

    def __post_init__(self) -> None:
        m, k = np.shape(self.H)
        if np.shape(self.p) != (k,):
            raise ValueError(f"expected {k} user powers, got shape {np.shape(self.p)}")
        if np.shape(self.C_noise) != (m, m):
            raise ValueError(
                f"noise covariance must be {m}x{m}, got shape {np.shape(self.C_noise)}"
            )

    @property
    def num_antennas(self) -> int:
        return int(self.H.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.H.shape[1])


def mmse_sinr(prob: UplinkProblem) -> np.ndarray:
    """Post-combining SINR of every user under MMSE combining, linear

    ``SINR_k = p_k h_k^H (sum_(j != k) p_j h_j h_j^H + C)^-1 h_k``, evaluated
    through a Cholesky factor of each user's interference-plus-noise
    covariance and a triangular solve.

    :raises numpy.linalg.LinAlgError: if the covariance is not positive
        definite, which only happens when the noise lacks a thermal floor.
    """
    if not np.all(np.real(np.diag(prob.C_noise)) > 0):
        raise np.linalg.LinAlgError("noise covariance needs a positive diagonal")

    weighted = prob.H * np.sqrt(prob.p)

    sinr = np.empty(prob.num_users)
    for k in range(prob.num_users):
        others = np.delete(weighted, k, axis=1)
        covariance = others @ others.conj().T + prob.C_noise
        factor = scipy.linalg.cholesky(covariance, lower=True, check_finite=False)
        whitened = scipy.linalg.solve_triangular(
            factor, prob.H[:, k], lower=True, check_finite=False
        )
        sinr[k] = prob.p[k] * np.real(np.vdot(whitened, whitened))
    return sinr


def mmse_combiner(prob: UplinkProblem) -> np.ndarray:
    """MMSE combining matrix ``(H P H^H + C)^-1 H``, one column per user"""
    total = (prob.H * prob.p) @ prob.H.conj().T + prob.C_noise
    return scipy.linalg.solve(total, prob.H, assume_a="her")


def combiner_sinr(prob: UplinkProblem, W: np.ndarray) -> np.ndarray:
    """SINR of every user for the combiners in the columns of ``W``"""
    gains = np.abs(W.conj().T @ prob.H) ** 2 * prob.p
    signal = np.diag(gains)
    interference = np.sum(gains, axis=1) - signal
    noise = np.real(np.einsum("mk,mn,nk->k", W.conj(), prob.C_noise, W))
    return signal / (interference + noise)


def assemble_problem(
    mode: Mode,
    realization: ChannelRealization,
    repeater_state: RepeaterState | None,
    cfg: ScenarioConfig,
) -> UplinkProblem:
    """Build the combiner inputs of an architecture

    C-MIMO sees the direct channel with white base station noise, D-MIMO the
    user to site channels with white access point noise, RA-MIMO the
    composite channel with the base station noise plus the amplified repeater
    noise.
    """
    p = np.full(realization.num_users, cfg.user_tx_power)
    sigma2_bs = noise_power_linear(cfg.bandwidth, cfg.temperature, cfg.bs_nf_db)

    if mode is Mode.CMIMO:
        return UplinkProblem(
            H=realization.h_direct,
            p=p,
            C_noise=sigma2_bs * np.eye(realization.num_antennas, dtype=complex),
        )
    if mode is Mode.DMIMO:
        sigma2_ap = noise_power_linear(cfg.bandwidth, cfg.temperature, cfg.ap_nf_db)
        return UplinkProblem(
            H=realization.f_user_site,
            p=p,
            C_noise=sigma2_ap * np.eye(realization.num_sites, dtype=complex),
        )

    if repeater_state is None:
        raise ValueError("RA-MIMO needs a repeater state")
    return UplinkProblem(
        H=composite_channel(realization, repeater_state),
        p=p,
        C_noise=sigma2_bs * np.eye(realization.num_antennas, dtype=complex)
        + repeated_noise_covariance(realization, repeater_state, cfg),
    )
