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

from .config import ScenarioConfig


@dataclass(frozen=True)
class Deployment:
    """Node positions of one drop

    All positions are 3D points in meters, the simulation square spans
    ``[0, area_side]`` along x and y.

    :param bs_position:
        Base station array reference point, shape ``(3,)``.
    :param site_positions:
        Repeater (or access point) sites, shape ``(num_sites, 3)``.
    :param user_positions:
        User terminals, shape ``(num_users, 3)``.
    """

    bs_position: np.ndarray
    site_positions: np.ndarray
    user_positions: np.ndarray
    area_side: float

    @property
    def num_sites(self) -> int:
        return len(self.site_positions)

    @property
    def num_users(self) -> int:
        return len(self.user_positions)

    @property
    def site_pitch(self) -> float:
        return self.area_side / np.sqrt(self.num_sites)

    def user_distances_2d(self) -> np.ndarray:
        """Horizontal distance from every user to the base station"""
        return np.linalg.norm(self.user_positions[:, :2] - self.bs_position[:2], axis=1)


def site_mesh(cfg: ScenarioConfig) -> np.ndarray:
    """Centers of the square tiling, half a pitch away from the edges

    Site ``r = i * n + j`` sits at ``((i + 0.5) p, (j + 0.5) p)`` with
    ``n = sqrt(num_sites)`` and pitch ``p = area_side / n``.
    """
    n = cfg.mesh_size
    pitch = cfg.area_side / n
    centers = (np.arange(n) + 0.5) * pitch
    x, y = np.meshgrid(centers, centers, indexing="ij")
    z = np.full(n * n, cfg.site_height)
    return np.column_stack([x.ravel(), y.ravel(), z])


def build_deployment(cfg: ScenarioConfig, drop_rng: np.random.Generator) -> Deployment:
    """Place the base station, the site mesh and the users of one drop

    Only the users are random, they are drawn uniformly over the square from
    the drop's own random stream.
    """
    half = cfg.area_side / 2
    bs_position = np.array([half, half, cfg.bs_height])

    xy = drop_rng.uniform(0.0, cfg.area_side, size=(cfg.num_users, 2))
    user_positions = np.column_stack([xy, np.full(cfg.num_users, cfg.terminal_height)])

    return Deployment(
        bs_position=bs_position,
        site_positions=site_mesh(cfg),
        user_positions=user_positions,
        area_side=cfg.area_side,
    )
