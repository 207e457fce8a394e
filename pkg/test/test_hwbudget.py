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

import pytest

from ramimo.hwbudget import (
    ACLR_LOCAL_AREA_DB,
    ACLR_WIDE_AREA_DB,
    NORMAL_CYCLIC_PREFIX_S,
    RepeaterBudget,
    butterworth_dc_group_delay_s,
    butterworth_group_delay_s,
    cascade_nf_db,
    delay_budget_check,
    iq_evm_fraction,
    max_stable_gain_db,
    pa_output_power_dbm,
    ris_equivalent_cells,
)


@pytest.mark.parametrize(
    "cp, aclr, expected",
    [(28.0, 40.0, 20.0), (30.0, 40.0, 22.0), (10.0, 24.0, 10.0)],
)
def test_pa_output_power(cp, aclr, expected):
    assert pa_output_power_dbm(cp, aclr) == pytest.approx(expected)


def test_pa_output_power_presets():
    assert ACLR_WIDE_AREA_DB == 45
    assert ACLR_LOCAL_AREA_DB == 31
    assert pa_output_power_dbm(28.0, ACLR_WIDE_AREA_DB) == pytest.approx(17.5)


def test_pa_output_power_negative_aclr():
    with pytest.raises(ValueError):
        pa_output_power_dbm(28.0, -1.0)


@pytest.mark.parametrize(
    "losses, lna, expected",
    [([2.0], 3.0, 5.0), ([], 2.7, 2.7), ([2.0, 0.3], 2.0, 4.3)],
)
def test_cascade_nf(losses, lna, expected):
    assert cascade_nf_db(losses, lna) == pytest.approx(expected)


def test_cascade_nf_negative():
    with pytest.raises(ValueError):
        cascade_nf_db([-1.0], 3.0)


def test_iq_evm_two_stages():
    evm = iq_evm_fraction(0.01, 1.0, stages=2)
    assert evm == pytest.approx(0.0201, abs=1e-4)
    assert round(100 * evm) == 2


def test_iq_evm_single_stage():
    assert iq_evm_fraction(0.01, 1.0) == pytest.approx(0.01005, abs=1e-5)


@pytest.mark.parametrize("stages", [0, 1, 4])
def test_iq_evm_no_impairment(stages):
    assert iq_evm_fraction(0.0, 0.0, stages) == 0


def test_iq_evm_rss():
    coherent = iq_evm_fraction(0.01, 1.0, stages=4)
    rss = iq_evm_fraction(0.01, 1.0, stages=4, coherent=False)
    assert rss == pytest.approx(coherent / 2)


@pytest.mark.parametrize("gain_err, phase_err", [(0.3, 0.0), (0.0, 15.0)])
def test_iq_evm_large_errors(gain_err, phase_err):
    with pytest.raises(ValueError):
        iq_evm_fraction(gain_err, phase_err)


def test_butterworth_delay_fifth_order():
    delay = butterworth_group_delay_s(5, 10e6)
    assert delay * 1e9 == pytest.approx(51.5, abs=0.1)


def test_butterworth_delay_scales_with_bandwidth():
    narrow = butterworth_group_delay_s(5, 10e6)
    wide = butterworth_group_delay_s(5, 20e6)
    assert wide == pytest.approx(narrow / 2, rel=1e-6)


def test_butterworth_delay_first_order():
    bandwidth = 3e6
    delay = butterworth_group_delay_s(1, bandwidth)
    assert delay == pytest.approx(1 / (2 * math.pi * bandwidth), rel=1e-6)


@pytest.mark.parametrize("order", [1, 2, 3, 5, 8])
def test_butterworth_closed_form(order):
    numeric = butterworth_group_delay_s(order, 10e6)
    assert butterworth_dc_group_delay_s(order, 10e6) == pytest.approx(numeric, rel=1e-6)


def test_butterworth_delay_inside_passband():
    dc = butterworth_group_delay_s(5, 10e6)
    # the delay peaks near the band edge
    assert butterworth_group_delay_s(5, 10e6, 9e6) > dc


@pytest.mark.parametrize(
    "order, bandwidth, freq",
    [(0, 10e6, 0.0), (5, 0.0, 0.0), (5, 10e6, 10e6), (5, 10e6, -1.0)],
)
def test_butterworth_delay_invalid(order, bandwidth, freq):
    with pytest.raises(ValueError):
        butterworth_group_delay_s(order, bandwidth, freq)


@pytest.mark.parametrize(
    "isolation, margin, expected",
    [(50.0, 10.0, 40.0), (20.0, 20.0, 0.0), (30.0, 10.0, 20.0)],
)
def test_max_stable_gain(isolation, margin, expected):
    assert max_stable_gain_db(isolation, margin) == expected


def test_max_stable_gain_invalid():
    with pytest.raises(ValueError, match="margin exceeds"):
        max_stable_gain_db(20.0, 30.0)


@pytest.mark.parametrize("gain, cells", [(60.0, 1000), (0.0, 1), (20.0, 10), (40.0, 100), (41.0, 113)])
def test_ris_cells(gain, cells):
    assert ris_equivalent_cells(gain) == cells


def test_ris_cells_negative():
    with pytest.raises(ValueError):
        ris_equivalent_cells(-3.0)


def test_delay_budget_pass():
    verdict = delay_budget_check([51.5e-9, 100e-9], NORMAL_CYCLIC_PREFIX_S)
    assert verdict.passed
    assert verdict.ratio == pytest.approx(0.032, abs=1e-3)
    assert verdict.total_s == pytest.approx(151.5e-9)
    assert verdict.margin_s == pytest.approx(4.7e-6 - 151.5e-9)


def test_delay_budget_empty():
    verdict = delay_budget_check([], NORMAL_CYCLIC_PREFIX_S)
    assert verdict.passed
    assert verdict.ratio == 0


def test_delay_budget_fail():
    verdict = delay_budget_check([5e-6], 4.7e-6)
    assert not verdict.passed
    assert verdict.margin_s < 0


@pytest.mark.parametrize("delays, cyclic_prefix", [([-1e-9], 4.7e-6), ([1e-9], 0.0)])
def test_delay_budget_invalid(delays, cyclic_prefix):
    with pytest.raises(ValueError):
        delay_budget_check(delays, cyclic_prefix)


def test_repeater_budget_report():
    lines = {line.quantity: line for line in RepeaterBudget().evaluate()}

    assert lines["nf"].value == pytest.approx(5.0)
    assert lines["nf"].unit == "dB"
    assert lines["pa-out"].value == pytest.approx(20.0)
    assert lines["evm"].value == pytest.approx(2.01, abs=0.01)
    assert lines["delay"].value == pytest.approx(51.5, abs=0.1)
    assert lines["delay-pass"].value == 1.0
    assert lines["stable-gain"].value == 40.0
    assert lines["ris-cells"].value == 100


def test_repeater_budget_invalid():
    with pytest.raises(ValueError, match="isolation_db"):
        RepeaterBudget(isolation_db=-5.0)
    with pytest.raises(ValueError, match="filter_order"):
        RepeaterBudget(filter_order=0)
