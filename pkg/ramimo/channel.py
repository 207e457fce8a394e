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

"""Urban-micro stochastic channel model

Large scale behaviour (LoS probability, pathloss, optional shadowing) follows
the 3GPP UMi street canyon model of TS 36.814, small scale fading is Ricean
with a steering-vector LoS component when the link is in LoS and Rayleigh
otherwise.  Channel coefficients are narrowband and direction-symmetric: the
same value serves uplink and downlink.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .report.tables import format_float, write_rows
from .scenario import Deployment, ScenarioConfig

SPEED_OF_LIGHT = 299792458.0
BOLTZMANN = 1.380649e-23

# validity floor of the UMi pathloss expressions
MIN_DISTANCE = 10.0

LOS_SHADOWING_STD_DB = 3.0
NLOS_SHADOWING_STD_DB = 4.0

CSV_HEADER = ("link", "i", "j", "los", "pathloss_db", "re", "im")


def wavelength(fc_ghz: float) -> float:
    return SPEED_OF_LIGHT / (fc_ghz * 1e9)


def los_probability(d_2d: np.ndarray | float) -> np.ndarray:
    """UMi line-of-sight probability at a horizontal distance in meters

    ``min(18/d, 1) (1 - exp(-d/36)) + exp(-d/36)``, equal to one up to 18 m.
    """
    d = np.asarray(d_2d, dtype=float)
    if np.any(d < 0):
        raise ValueError("LoS probability needs non-negative distances")
    with np.errstate(divide="ignore"):
        near = np.minimum(18.0 / d, 1.0)
    decay = np.exp(-d / 36.0)
    return near * (1.0 - decay) + decay


def pathloss_db(d_3d: np.ndarray | float, is_los: np.ndarray | bool, fc: float) -> np.ndarray:
    """UMi pathloss in dB for a 3D distance in meters and carrier in GHz

    Distances are clamped to :data:`MIN_DISTANCE` first.
    """
    d = np.log10(np.maximum(np.asarray(d_3d, dtype=float), MIN_DISTANCE))
    los = 22.0 * d + 28.0 + 20.0 * math.log10(fc)
    nlos = 36.7 * d + 22.7 + 26.0 * math.log10(fc)
    return np.where(is_los, los, nlos)


def shadowing_std_db(is_los: np.ndarray | bool) -> np.ndarray:
    return np.where(is_los, LOS_SHADOWING_STD_DB, NLOS_SHADOWING_STD_DB)


def noise_power_linear(bandwidth: float, temperature: float, nf_db: float) -> float:
    """Thermal noise power in watts, ``k_B T B 10^(NF/10)``"""
    if bandwidth <= 0 or temperature <= 0:
        raise ValueError("noise power needs a positive bandwidth and temperature")
    return BOLTZMANN * temperature * bandwidth * 10 ** (nf_db / 10)


def ricean_weights(k_db: float) -> tuple[float, float]:
    """Amplitude weights of the specular and the diffuse component"""
    k = 10 ** (k_db / 10)
    if math.isinf(k):
        return 1.0, 0.0
    return math.sqrt(k / (k + 1)), math.sqrt(1 / (k + 1))


def complex_normal(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples of unit variance"""
    parts = rng.standard_normal((2,) + shape)
    return (parts[0] + 1j * parts[1]) / math.sqrt(2)


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array at the base station

    The array axis lies along x, ``broadside`` is the direction the array
    faces (radians from the x axis, default +y).  Azimuths are measured from
    broadside.
    """

    num_elements: int = 64
    element_spacing: float = 0.5
    broadside: float = math.pi / 2

    def azimuth(self, offset: np.ndarray) -> np.ndarray:
        """Azimuth from broadside of points at ``offset`` from the array"""
        offset = np.asarray(offset, dtype=float)
        direction = np.arctan2(offset[..., 1], offset[..., 0])
        return np.angle(np.exp(1j * (self.broadside - direction)))


def steering_vector(geom: ArrayGeometry, azimuth: np.ndarray | float) -> np.ndarray:
    """Array response, element m is ``exp(i 2 pi spacing m sin(azimuth))``

    :returns: shape ``(num_elements,)`` for a scalar azimuth, otherwise
        ``(num_elements, *azimuth.shape)`` with one column per direction.
    """
    theta = np.asarray(azimuth, dtype=float)
    if np.any(np.abs(theta) > math.pi + 1e-12):
        raise ValueError("azimuth must lie in [-pi, pi]")
    m = np.arange(geom.num_elements)
    return np.exp(1j * 2 * math.pi * geom.element_spacing * np.multiply.outer(m, np.sin(theta)))


@dataclass(frozen=True)
class LinkState:
    """Large scale state of a link class, stored columnwise

    Every field has the same shape, one entry per link.  ``pathloss_db`` is
    the UMi model value, ``shadowing_db`` the log-normal deviation added on
    top of it (zero when shadowing is disabled), ``los_phase`` the phase of
    the specular component, ``-2 pi d_3d / lambda`` wrapped to ``[0, 2 pi)``.
    """

    distance_2d: np.ndarray
    distance_3d: np.ndarray
    is_los: np.ndarray
    pathloss_db: np.ndarray
    shadowing_db: np.ndarray
    los_phase: np.ndarray

    @classmethod
    def between(
        cls,
        tx: np.ndarray,
        rx: np.ndarray,
        fc: float,
        rng: np.random.Generator,
        shadowing: bool = False,
    ) -> LinkState:
        """Draw LoS states of the links between broadcastable point sets"""
        delta = np.asarray(tx, dtype=float) - np.asarray(rx, dtype=float)
        distance_2d = np.hypot(delta[..., 0], delta[..., 1])
        distance_3d = np.hypot(distance_2d, delta[..., 2])

        is_los = rng.random(distance_2d.shape) < los_probability(distance_2d)
        clamped_3d = np.hypot(np.maximum(distance_2d, MIN_DISTANCE), delta[..., 2])
        loss = pathloss_db(clamped_3d, is_los, fc)
        if shadowing:
            shadow = rng.normal(0.0, 1.0, distance_2d.shape) * shadowing_std_db(is_los)
        else:
            shadow = np.zeros(distance_2d.shape)

        return cls(
            distance_2d=distance_2d,
            distance_3d=distance_3d,
            is_los=is_los,
            pathloss_db=loss,
            shadowing_db=shadow,
            los_phase=np.mod(-2 * math.pi * distance_3d / wavelength(fc), 2 * math.pi),
        )

    @property
    def gain(self) -> np.ndarray:
        """Linear large scale power gain ``10^(-loss/10)``"""
        return 10 ** (-(self.pathloss_db + self.shadowing_db) / 10)

    @property
    def shape(self) -> tuple[int, ...]:
        return np.shape(self.distance_2d)


def draw_fading_vector(
    link: LinkState,
    los_direction: np.ndarray | float,
    geom: ArrayGeometry,
    k_db: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Channel from single-antenna endpoints to the array

    Ricean with the steering vector toward ``los_direction`` as specular part
    when the link is in LoS, Rayleigh otherwise, scaled by the large scale
    gain.  One column per link, ``(num_elements, *link.shape)``.
    """
    specular = np.exp(1j * link.los_phase) * steering_vector(geom, los_direction)
    diffuse = complex_normal(rng, (geom.num_elements,) + link.shape)
    return _superpose(link, specular, diffuse, k_db)


def draw_scalar_link(link: LinkState, k_db: float, rng: np.random.Generator) -> np.ndarray:
    """Channel between two single-antenna endpoints, shaped like ``link``"""
    specular = np.exp(1j * link.los_phase)
    diffuse = complex_normal(rng, link.shape)
    return _superpose(link, specular, diffuse, k_db)


def _superpose(
    link: LinkState, specular: np.ndarray, diffuse: np.ndarray, k_db: float
) -> np.ndarray:
    los_weight, nlos_weight = ricean_weights(k_db)
    ricean = los_weight * specular + nlos_weight * diffuse
    return np.sqrt(link.gain) * np.where(link.is_los, ricean, diffuse)


@dataclass(frozen=True)
class ChannelRealization:
    """All channel coefficients of one drop

    :param h_direct: user to base station array, ``(M, K)``
    :param f_user_site: user to repeater/AP site, ``(R, K)``
    :param h_site_bs: site to base station array, ``(M, R)``
    :param link_states: large scale state per link class, keyed by
        ``"user_bs"`` (``(K,)``), ``"user_site"`` (``(R, K)``) and
        ``"site_bs"`` (``(R,)``)
    """

    h_direct: np.ndarray
    f_user_site: np.ndarray
    h_site_bs: np.ndarray
    link_states: dict[str, LinkState] = field(default_factory=dict)

    @property
    def num_antennas(self) -> int:
        return int(self.h_direct.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.h_direct.shape[1])

    @property
    def num_sites(self) -> int:
        return int(self.f_user_site.shape[0])

    def _rows(self) -> Iterator[tuple[str, ...]]:
        classes = (
            ("user_bs", self.h_direct, lambda i, j: j),
            ("user_site", self.f_user_site, lambda i, j: (i, j)),
            ("site_bs", self.h_site_bs, lambda i, j: j),
        )
        for name, coefficients, link_index in classes:
            state = self.link_states[name]
            rows, cols = coefficients.shape
            for i in range(rows):
                for j in range(cols):
                    index = link_index(i, j)
                    value = coefficients[i, j]
                    yield (
                        name,
                        str(i),
                        str(j),
                        str(int(state.is_los[index])),
                        format_float(state.pathloss_db[index] + state.shadowing_db[index]),
                        format_float(value.real),
                        format_float(value.imag),
                    )

    def write_csv(self, path: str) -> None:
        """Dump every coefficient, ``i``/``j`` are the matrix row and column"""
        write_rows(path, CSV_HEADER, self._rows())


def synthesize_channels(
    deployment: Deployment, cfg: ScenarioConfig, rng: np.random.Generator
) -> ChannelRealization:
    """Draw the channels of one drop

    LoS states of all links are drawn first (user to base station, user to
    site, site to base station), then the fading of every coefficient.  The
    number of draws does not depend on the outcome, so two configurations
    sharing a random stream see the same channels.
    """
    fc = cfg.carrier_freq
    geom = ArrayGeometry(cfg.num_antennas, cfg.element_spacing)
    bs = deployment.bs_position
    users = deployment.user_positions
    sites = deployment.site_positions

    user_bs = LinkState.between(users, bs, fc, rng, cfg.shadowing)
    user_site = LinkState.between(users[np.newaxis, :, :], sites[:, np.newaxis, :], fc, rng, cfg.shadowing)
    site_bs = LinkState.between(sites, bs, fc, rng, cfg.shadowing)

    h_direct = draw_fading_vector(user_bs, geom.azimuth(users - bs), geom, cfg.k_factor_db, rng)
    f_user_site = draw_scalar_link(user_site, cfg.k_factor_db, rng)
    h_site_bs = draw_fading_vector(site_bs, geom.azimuth(sites - bs), geom, cfg.k_factor_db, rng)

    return ChannelRealization(
        h_direct=h_direct,
        f_user_site=f_user_site,
        h_site_bs=h_site_bs,
        link_states={"user_bs": user_bs, "user_site": user_site, "site_bs": site_bs},
    )
