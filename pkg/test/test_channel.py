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

import csv
import math
import os
import tempfile

import numpy as np
import numpy.testing as npt
import pytest

from ramimo.channel import (
    ArrayGeometry,
    LinkState,
    draw_fading_vector,
    draw_scalar_link,
    los_probability,
    noise_power_linear,
    pathloss_db,
    shadowing_std_db,
    steering_vector,
    synthesize_channels,
    wavelength,
)
from ramimo.scenario import Deployment, ScenarioConfig, build_deployment


def fixed_link(pathloss, is_los, shape=()):
    """Link state with a given pathloss and a zero specular phase"""
    return LinkState(
        distance_2d=np.full(shape, 100.0),
        distance_3d=np.full(shape, 100.0),
        is_los=np.full(shape, is_los),
        pathloss_db=np.full(shape, float(pathloss)),
        shadowing_db=np.zeros(shape),
        los_phase=np.zeros(shape),
    )


def dbm(watts):
    return 10 * math.log10(watts) + 30


@pytest.mark.parametrize(
    "distance, expected",
    [
        (0.0, 1.0),
        (10.0, 1.0),
        (18.0, 1.0),
        (36.0, 0.5 * (1 - math.exp(-1)) + math.exp(-1)),
        (1e6, 0.0),
    ],
)
def test_los_probability(distance, expected):
    assert los_probability(distance) == pytest.approx(expected, abs=1e-4)


def test_los_probability_value_at_36m():
    assert los_probability(36.0) == pytest.approx(0.684, abs=1e-3)


def test_los_probability_decreasing():
    distances = np.linspace(18, 500, 200)
    assert np.all(np.diff(los_probability(distances)) <= 0)


def test_los_probability_negative_distance():
    with pytest.raises(ValueError):
        los_probability(-1.0)


@pytest.mark.parametrize(
    "is_los, expected",
    [(True, 44 + 28 + 20 * math.log10(3.6)), (False, 73.4 + 22.7 + 26 * math.log10(3.6))],
)
def test_pathloss(is_los, expected):
    assert pathloss_db(100.0, is_los, 3.6) == pytest.approx(expected)


def test_pathloss_values():
    assert pathloss_db(100.0, True, 3.6) == pytest.approx(83.13, abs=5e-3)
    assert pathloss_db(100.0, False, 3.6) == pytest.approx(110.56, abs=5e-3)


@pytest.mark.parametrize("is_los", [True, False])
def test_pathloss_clamp(is_los):
    assert pathloss_db(5.0, is_los, 3.6) == pathloss_db(10.0, is_los, 3.6)
    assert pathloss_db(0.0, is_los, 3.6) == pathloss_db(10.0, is_los, 3.6)
    assert pathloss_db(11.0, is_los, 3.6) > pathloss_db(10.0, is_los, 3.6)


def test_pathloss_vectorized():
    loss = pathloss_db(np.array([100.0, 100.0]), np.array([True, False]), 3.6)
    npt.assert_allclose(loss, [pathloss_db(100.0, True, 3.6), pathloss_db(100.0, False, 3.6)])


def test_shadowing_std():
    npt.assert_array_equal(shadowing_std_db(np.array([True, False])), [3.0, 4.0])


@pytest.mark.parametrize(
    "bandwidth, nf, expected",
    [(20e6, 0.0, -100.98), (20e6, 5.0, -95.98), (1.0, 0.0, -173.98)],
)
def test_noise_power(bandwidth, nf, expected):
    assert dbm(noise_power_linear(bandwidth, 290.0, nf)) == pytest.approx(expected, abs=0.02)


def test_noise_power_invalid():
    with pytest.raises(ValueError):
        noise_power_linear(0.0, 290.0, 5.0)


def test_wavelength():
    assert wavelength(3.6) == pytest.approx(0.08328, abs=1e-5)


def test_steering_vector_broadside():
    a = steering_vector(ArrayGeometry(), 0.0)
    assert a.shape == (64,)
    npt.assert_allclose(a, np.ones(64))


def test_steering_vector_endfire():
    a = steering_vector(ArrayGeometry(), math.pi / 2)
    npt.assert_allclose(a, np.exp(1j * math.pi * np.arange(64)), atol=1e-9)


@pytest.mark.parametrize("azimuth", [-math.pi, -1.0, 0.3, 2.0, math.pi])
def test_steering_vector_norm(azimuth):
    a = steering_vector(ArrayGeometry(), azimuth)
    assert np.vdot(a, a).real == pytest.approx(64)


def test_steering_vector_columns():
    azimuths = np.array([0.0, 0.5, -0.5])
    a = steering_vector(ArrayGeometry(num_elements=8), azimuths)
    assert a.shape == (8, 3)
    npt.assert_allclose(a[:, 1], steering_vector(ArrayGeometry(num_elements=8), 0.5))


def test_steering_vector_azimuth_range():
    with pytest.raises(ValueError):
        steering_vector(ArrayGeometry(), 4.0)


def test_array_azimuth():
    geom = ArrayGeometry()
    # broadside faces +y, the array axis lies along x
    offsets = np.array([[0.0, 10.0], [10.0, 0.0], [-10.0, 0.0], [0.0, -10.0]])
    npt.assert_allclose(geom.azimuth(offsets), [0.0, math.pi / 2, -math.pi / 2, math.pi], atol=1e-12)


def test_fading_vector_rayleigh_power():
    rng = np.random.default_rng(3)
    link = fixed_link(80.0, False, shape=(100000,))
    h = draw_fading_vector(link, np.zeros(100000), ArrayGeometry(num_elements=4), 10.0, rng)

    beta = 10 ** (-80 / 10)
    assert h.shape == (4, 100000)
    mean_power = np.mean(np.sum(np.abs(h) ** 2, axis=0))
    assert mean_power == pytest.approx(4 * beta, rel=0.02)


def test_fading_vector_ricean_los_fraction():
    rng = np.random.default_rng(4)
    n = 100000
    link = fixed_link(0.0, True, shape=(n,))
    geom = ArrayGeometry(num_elements=4)
    h = draw_fading_vector(link, np.zeros(n), geom, 10.0, rng)

    specular = math.sqrt(10 / 11) * steering_vector(geom, 0.0)
    los_power = np.sum(np.abs(specular) ** 2)
    total_power = np.mean(np.sum(np.abs(h) ** 2, axis=0))
    assert los_power / total_power == pytest.approx(10 / 11, rel=0.02)


def test_fading_vector_infinite_k():
    link = fixed_link(60.0, True)
    geom = ArrayGeometry(num_elements=8)
    h = draw_fading_vector(link, 0.4, geom, math.inf, np.random.default_rng(0))
    npt.assert_allclose(h, 1e-3 * steering_vector(geom, 0.4))


def test_scalar_link_rayleigh_power():
    rng = np.random.default_rng(5)
    f = draw_scalar_link(fixed_link(70.0, False, shape=(100000,)), 10.0, rng)
    assert np.mean(np.abs(f) ** 2) == pytest.approx(1e-7, rel=0.02)


def test_scalar_link_deterministic_limit():
    f = draw_scalar_link(fixed_link(70.0, True, shape=(5,)), math.inf, np.random.default_rng(0))
    npt.assert_allclose(np.abs(f) ** 2, 1e-7)


def test_scalar_link_zero_gain():
    f = draw_scalar_link(fixed_link(math.inf, False, shape=(3,)), 10.0, np.random.default_rng(0))
    npt.assert_array_equal(f, 0)


def test_link_state_between():
    tx = np.array([[0.0, 0.0, 1.5], [3.0, 4.0, 1.5]])
    rx = np.array([0.0, 0.0, 11.5])
    link = LinkState.between(tx, rx, 3.6, np.random.default_rng(0))

    npt.assert_allclose(link.distance_2d, [0.0, 5.0])
    npt.assert_allclose(link.distance_3d, [10.0, math.hypot(5.0, 10.0)])
    # LoS is certain below 18 m
    npt.assert_array_equal(link.is_los, [True, True])
    # the horizontal distance is clamped before the height is added
    expected = pathloss_db(math.hypot(10.0, 10.0), True, 3.6)
    npt.assert_allclose(link.pathloss_db, [expected, expected])
    npt.assert_array_equal(link.shadowing_db, 0)
    assert np.all((link.los_phase >= 0) & (link.los_phase < 2 * math.pi))


@pytest.mark.parametrize("distance", [10.0, 36.0, 100.0, 300.0])
def test_los_frequency(distance):
    n = 20000
    tx = np.tile([distance, 0.0, 1.5], (n, 1))
    rx = np.array([0.0, 0.0, 11.5])
    link = LinkState.between(tx, rx, 3.6, np.random.default_rng(int(distance)))

    p = float(los_probability(distance))
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(np.mean(link.is_los) - p) <= 3 * sigma + 1e-12


def test_link_state_shadowing():
    tx = np.zeros((2000, 3))
    rx = np.array([300.0, 0.0, 10.0])
    link = LinkState.between(tx, rx, 3.6, np.random.default_rng(1), shadowing=True)
    assert 2.5 < np.std(link.shadowing_db) < 4.5


@pytest.fixture(scope="module")
def realization():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(11)
    deployment = build_deployment(cfg, rng)
    return synthesize_channels(deployment, cfg, rng)


def test_synthesize_shapes(realization):
    assert realization.h_direct.shape == (64, 8)
    assert realization.f_user_site.shape == (64, 8)
    assert realization.h_site_bs.shape == (64, 64)
    assert realization.num_antennas == 64
    assert realization.num_users == 8
    assert realization.num_sites == 64
    assert realization.link_states["user_site"].shape == (64, 8)
    assert realization.link_states["site_bs"].shape == (64,)


def test_synthesize_deterministic():
    cfg = ScenarioConfig()

    def draw():
        rng = np.random.default_rng(99)
        return synthesize_channels(build_deployment(cfg, rng), cfg, rng)

    first, second = draw(), draw()
    npt.assert_array_equal(first.h_direct, second.h_direct)
    npt.assert_array_equal(first.f_user_site, second.f_user_site)
    npt.assert_array_equal(first.h_site_bs, second.h_site_bs)


def test_synthesize_user_near_bs():
    cfg = ScenarioConfig().override(num_users=2, k_factor_db=30.0)
    deployment = Deployment(
        bs_position=np.array([200.0, 200.0, 10.0]),
        site_positions=build_deployment(cfg, np.random.default_rng(0)).site_positions,
        user_positions=np.array([[200.0, 201.0, 1.5], [20.0, 380.0, 1.5]]),
        area_side=400.0,
    )
    realization = synthesize_channels(deployment, cfg, np.random.default_rng(2))
    gains = np.sum(np.abs(realization.h_direct) ** 2, axis=0)
    assert gains[0] > gains[1]
    assert realization.link_states["user_bs"].is_los[0]


# link class -> ChannelRealization attribute
LINK_CLASSES = {"user_bs": "h_direct", "user_site": "f_user_site", "site_bs": "h_site_bs"}


@pytest.fixture(scope="module")
def drops():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(17)
    return [synthesize_channels(build_deployment(cfg, rng), cfg, rng) for _ in range(100)]


@pytest.mark.parametrize("link", sorted(LINK_CLASSES))
@pytest.mark.parametrize("is_los", [True, False])
def test_fading_unit_mean(drops, link, is_los):
    normalized = []
    for realization in drops:
        state = realization.link_states[link]
        coefficients = getattr(realization, LINK_CLASSES[link])
        # state arrays broadcast along the antenna axis
        power = np.abs(coefficients) ** 2 / state.gain
        normalized.append(power[np.broadcast_to(state.is_los, power.shape) == is_los])

    normalized = np.concatenate(normalized)
    assert len(normalized) > 1000
    assert np.mean(normalized) == pytest.approx(1.0, rel=0.05)


def test_write_csv(realization):
    with tempfile.TemporaryDirectory() as output_dir:
        path = os.path.join(output_dir, "channels.csv")
        realization.write_csv(path)
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))

    assert len(rows) == 64 * 8 + 64 * 8 + 64 * 64
    assert rows[0]["link"] == "user_bs"
    assert float(rows[0]["re"]) == pytest.approx(realization.h_direct[0, 0].real, abs=1e-6)
    assert {row["link"] for row in rows} == {"user_bs", "user_site", "site_bs"}
