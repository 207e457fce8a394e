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

import math
import os
import xml.etree.ElementTree as ET

import numpy as np
import numpy.testing as npt
import pytest

from ramimo.scenario import (
    ConfigError,
    Mode,
    ScenarioConfig,
    build_deployment,
    site_mesh,
    validate_config,
)

this_dir = os.path.split(__file__)[0]
scenario_dir = os.path.join(this_dir, "scenario_files")


def test_defaults():
    cfg = validate_config(ScenarioConfig())

    assert cfg.area_side == 400
    assert cfg.num_users == 8
    assert cfg.num_sites == 64
    assert cfg.num_antennas == 64
    assert cfg.carrier_freq == 3.6
    assert cfg.bandwidth == 20e6
    assert cfg.temperature == 290
    assert cfg.bs_nf_db == cfg.rep_nf_db == cfg.ap_nf_db == 5
    assert cfg.user_tx_power_dbm == cfg.rep_max_out_dbm == 20
    assert cfg.k_factor_db == 10
    assert cfg.gain_cap_db == 45
    assert cfg.tau_db == 40
    assert cfg.activation_snr_margin_db == 10
    assert cfg.mode is Mode.RAMIMO
    assert cfg.mesh_size == 8
    assert cfg.site_height == 11.5
    assert cfg.user_tx_power == pytest.approx(0.1)


def test_empty_scenario_takes_defaults():
    cfg = ScenarioConfig.parse(ET.fromstring("<scenario/>"))
    assert cfg == ScenarioConfig()


def test_parse_file():
    cfg = ScenarioConfig.parse_file(os.path.join(scenario_dir, "small.xml"))

    assert cfg.mode is Mode.CMIMO
    assert cfg.area_side == 200
    assert cfg.num_users == 4
    assert cfg.num_sites == 16
    assert cfg.num_antennas == 16
    assert cfg.k_factor_db == 6
    assert cfg.shadowing is True
    assert cfg.rep_nf_db == 7
    assert cfg.gain_cap_db == 50
    assert cfg.tau_db == math.inf
    assert cfg.num_drops == 10
    assert cfg.seed == 42
    # untouched attributes keep their defaults
    assert cfg.bs_nf_db == 5
    assert cfg.element_spacing == 0.5


@pytest.mark.parametrize(
    "filename, field",
    [
        ("not_square.xml", "num_sites"),
        ("unknown_attribute.xml", "radio.pathloss-model"),
        ("unknown_section.xml", "downlink"),
        ("bad_number.xml", "user_tx_power_dbm"),
    ],
)
def test_invalid_file(filename, field):
    with pytest.raises(ConfigError) as e:
        ScenarioConfig.parse_file(os.path.join(scenario_dir, filename))
    assert e.value.field == field


def test_wrong_root():
    path = os.path.join(scenario_dir, "wrong_root.xml")
    with pytest.raises(ConfigError, match="<protocol>"):
        ScenarioConfig.parse_file(path)


def test_missing_file():
    path = os.path.join(scenario_dir, "does_not_exist.xml")
    with pytest.raises(ConfigError, match="does_not_exist.xml"):
        ScenarioConfig.parse_file(path)


def test_not_a_perfect_square():
    with pytest.raises(ConfigError, match="not a perfect square"):
        ScenarioConfig().override(num_sites=60)
    assert ScenarioConfig().override(num_sites=64).mesh_size == 8


@pytest.mark.parametrize(
    "fields, field",
    [
        ({"area_side": 0.0}, "area_side"),
        ({"num_users": 0}, "num_users"),
        ({"num_drops": -1}, "num_drops"),
        ({"bandwidth": -20e6}, "bandwidth"),
        ({"rep_nf_db": -1.0}, "rep_nf_db"),
        ({"carrier_freq": math.nan}, "carrier_freq"),
        ({"gain_cap_db": math.inf}, "gain_cap_db"),
        ({"tau_db": -math.inf}, "tau_db"),
        ({"seed": -1}, "seed"),
        ({"seed": 2**64}, "seed"),
        ({"num_users": 2.5}, "num_users"),
    ],
)
def test_validation(fields, field):
    with pytest.raises(ConfigError) as e:
        ScenarioConfig().override(**fields)
    assert e.value.field == field


def test_unbounded_fields():
    cfg = ScenarioConfig().override(tau_db=math.inf, activation_snr_margin_db=math.inf)
    assert cfg.tau_db == math.inf

    cfg = ScenarioConfig().override(activation_snr_margin_db=-math.inf)
    assert cfg.activation_snr_margin_db == -math.inf


def test_override_unknown_field():
    with pytest.raises(ConfigError, match="unknown configuration field"):
        ScenarioConfig().override(num_repeaters=64)


def test_override_mode_from_string():
    assert ScenarioConfig().override(mode="dmimo").mode is Mode.DMIMO


@pytest.mark.parametrize("value", ["cmimo", "CMIMO", " CMimo "])
def test_mode_parse(value):
    assert Mode.parse(value) is Mode.CMIMO


def test_mode_parse_unknown():
    with pytest.raises(ConfigError, match="expected one of cmimo, dmimo, ramimo"):
        Mode.parse("cell-free")


def test_element_round_trip():
    cfg = ScenarioConfig().override(
        mode=Mode.DMIMO,
        tau_db=math.inf,
        bandwidth=10e6,
        zero_phase=True,
        seed=2**63 + 5,
        carrier_freq=0.1 + 0.2,
    )
    element = ET.fromstring(ET.tostring(cfg.to_element()))
    assert ScenarioConfig.parse(element) == cfg


def test_site_mesh():
    sites = site_mesh(ScenarioConfig())

    assert sites.shape == (64, 3)
    npt.assert_allclose(sites[0], [25, 25, 11.5])
    # r = i * n + j, the second site moves along y
    npt.assert_allclose(sites[1], [25, 75, 11.5])
    npt.assert_allclose(sites[8], [75, 25, 11.5])
    npt.assert_allclose(sites[63], [375, 375, 11.5])


def test_build_deployment():
    cfg = ScenarioConfig()
    deployment = build_deployment(cfg, np.random.default_rng(1))

    npt.assert_array_equal(deployment.bs_position, [200, 200, 10])
    assert deployment.num_sites == 64
    assert deployment.num_users == 8
    assert deployment.site_pitch == 50
    assert np.all(deployment.user_positions[:, :2] >= 0)
    assert np.all(deployment.user_positions[:, :2] <= 400)
    npt.assert_array_equal(deployment.user_positions[:, 2], 1.5)
    assert deployment.user_distances_2d().shape == (8,)
    assert np.all(deployment.user_distances_2d() <= 200 * math.sqrt(2))


def test_build_deployment_deterministic():
    cfg = ScenarioConfig()
    first = build_deployment(cfg, np.random.default_rng(7))
    second = build_deployment(cfg, np.random.default_rng(7))
    npt.assert_array_equal(first.user_positions, second.user_positions)
