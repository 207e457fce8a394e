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

import dataclasses
import enum
import logging
import math
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Any, NamedTuple

from .element import ConfigError, Element

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64


@enum.unique
class Mode(enum.Enum):
    """Receiver architecture simulated by a campaign"""

    CMIMO = "cmimo"
    DMIMO = "dmimo"
    RAMIMO = "ramimo"

    @classmethod
    def parse(cls, value: str | Mode) -> Mode:
        if isinstance(value, Mode):
            return value
        try:
            return cls(value.strip().lower())
        except ValueError:
            choices = ", ".join(mode.value for mode in cls)
            raise ConfigError("mode", f"unknown mode {value!r}, expected one of {choices}")

    @property
    def label(self) -> str:
        return {"cmimo": "C-MIMO", "dmimo": "D-MIMO", "ramimo": "RA-MIMO"}[self.value]


class SchemaEntry(NamedTuple):
    section: str
    attribute: str
    field: str


# Where each ScenarioConfig field lives in the XML file, ``mode`` is an
# attribute of the root element itself.
SCHEMA = (
    SchemaEntry("geometry", "area-side", "area_side"),
    SchemaEntry("geometry", "users", "num_users"),
    SchemaEntry("geometry", "sites", "num_sites"),
    SchemaEntry("geometry", "antennas", "num_antennas"),
    SchemaEntry("geometry", "element-spacing", "element_spacing"),
    SchemaEntry("geometry", "bs-height", "bs_height"),
    SchemaEntry("geometry", "terminal-height", "terminal_height"),
    SchemaEntry("geometry", "site-height-above-terminal", "site_height_above_terminal"),
    SchemaEntry("radio", "carrier-freq", "carrier_freq"),
    SchemaEntry("radio", "bandwidth", "bandwidth"),
    SchemaEntry("radio", "temperature", "temperature"),
    SchemaEntry("radio", "k-factor", "k_factor_db"),
    SchemaEntry("radio", "shadowing", "shadowing"),
    SchemaEntry("noise", "bs-nf", "bs_nf_db"),
    SchemaEntry("noise", "rep-nf", "rep_nf_db"),
    SchemaEntry("noise", "ap-nf", "ap_nf_db"),
    SchemaEntry("power", "user-tx", "user_tx_power_dbm"),
    SchemaEntry("power", "rep-max-out", "rep_max_out_dbm"),
    SchemaEntry("repeater", "gain-cap", "gain_cap_db"),
    SchemaEntry("repeater", "tau", "tau_db"),
    SchemaEntry("repeater", "activation-margin", "activation_snr_margin_db"),
    SchemaEntry("repeater", "zero-phase", "zero_phase"),
    SchemaEntry("campaign", "drops", "num_drops"),
    SchemaEntry("campaign", "seed", "seed"),
)

SECTIONS = tuple(dict.fromkeys(entry.section for entry in SCHEMA))

# fields allowed to be +/-inf, used to switch repeaters off entirely
UNBOUNDED_FIELDS = ("tau_db", "activation_snr_margin_db")


@dataclass(frozen=True)
class ScenarioConfig(Element):
    """Every tunable of a simulation run

    Defaults reproduce the simulation setup of a 400 m square served either by
    a 64-element base station array, 64 distributed access points or the array
    assisted by 64 repeaters placed at the access point sites.
    """

    area_side: float = 400.0
    num_users: int = 8
    num_sites: int = 64
    num_antennas: int = 64
    element_spacing: float = 0.5
    carrier_freq: float = 3.6
    bandwidth: float = 20e6
    temperature: float = 290.0
    bs_nf_db: float = 5.0
    rep_nf_db: float = 5.0
    ap_nf_db: float = 5.0
    user_tx_power_dbm: float = 20.0
    rep_max_out_dbm: float = 20.0
    bs_height: float = 10.0
    terminal_height: float = 1.5
    site_height_above_terminal: float = 10.0
    k_factor_db: float = 10.0
    shadowing: bool = False
    mode: Mode = Mode.RAMIMO
    gain_cap_db: float = 45.0
    tau_db: float = 40.0
    activation_snr_margin_db: float = 10.0
    zero_phase: bool = False
    num_drops: int = 1000
    seed: int = 0

    @classmethod
    def parse_file(cls, input_file: str) -> ScenarioConfig:
        """Read a scenario, or the scenario recorded in a run manifest"""
        if not os.path.exists(input_file):
            raise ConfigError(input_file, "configuration file does not exist")
        try:
            xmlroot = ET.parse(input_file).getroot()
        except ET.ParseError as e:
            raise ConfigError(input_file, f"not a valid XML file ({e})")

        if xmlroot.tag == "manifest":
            return cls.parse_child(xmlroot, cls, "scenario")
        if xmlroot.tag != "scenario":
            raise ConfigError(
                input_file, f"expected a <scenario> root element, got <{xmlroot.tag}>"
            )
        return cls.parse(xmlroot)

    @classmethod
    def parse(cls, element: ET.Element) -> ScenarioConfig:
        types = {field.name: field.type for field in dataclasses.fields(cls)}
        values: dict[str, Any] = {}

        extra = set(element.attrib) - {"mode"}
        if extra:
            raise ConfigError(", ".join(sorted(extra)), "unknown attribute on <scenario>")
        mode = cls.parse_optional_attribute(element, "mode")
        if mode is not None:
            values["mode"] = Mode.parse(mode)

        for child in element:
            if child.tag not in SECTIONS:
                raise ConfigError(child.tag, "unknown configuration section")
            known = {
                entry.attribute: entry.field
                for entry in SCHEMA
                if entry.section == child.tag
            }
            for attribute, raw in child.attrib.items():
                if attribute not in known:
                    raise ConfigError(
                        f"{child.tag}.{attribute}", "unknown configuration attribute"
                    )
                field = known[attribute]
                values[field] = _convert(raw, types[field], field)

        return validate_config(cls(**values))

    def to_element(self) -> ET.Element:
        element = ET.Element("scenario", mode=self.mode.value)
        for section in SECTIONS:
            child = ET.SubElement(element, section)
            for entry in SCHEMA:
                if entry.section == section:
                    child.set(entry.attribute, self.format_value(getattr(self, entry.field)))
        return element

    def override(self, **fields: Any) -> ScenarioConfig:
        """Copy of the configuration with the given fields replaced, validated"""
        unknown = set(fields) - {field.name for field in dataclasses.fields(self)}
        if unknown:
            raise ConfigError(", ".join(sorted(unknown)), "unknown configuration field")
        if "mode" in fields:
            fields["mode"] = Mode.parse(fields["mode"])
        return validate_config(dataclasses.replace(self, **fields))

    @property
    def mesh_size(self) -> int:
        """Number of sites along one side of the square mesh"""
        return math.isqrt(self.num_sites)

    @property
    def site_height(self) -> float:
        return self.terminal_height + self.site_height_above_terminal

    @property
    def user_tx_power(self) -> float:
        """Per-user transmit power in watts"""
        return 10 ** ((self.user_tx_power_dbm - 30) / 10)

    @property
    def rep_max_out_power(self) -> float:
        """Repeater output power limit in watts"""
        return 10 ** ((self.rep_max_out_dbm - 30) / 10)


def _convert(raw: str, annotation: Any, field: str) -> Any:
    # annotations are strings under ``from __future__ import annotations``
    if annotation in ("bool", bool):
        return Element.parse_bool(raw, field)
    if annotation in ("int", int):
        return Element.parse_int(raw, field)
    return Element.parse_float(raw, field)


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check a configuration, returning it unchanged when it is usable

    :raises ConfigError: naming the first offending field.
    """
    if not isinstance(cfg.mode, Mode):
        raise ConfigError("mode", f"expected a Mode, got {cfg.mode!r}")

    for field in dataclasses.fields(cfg):
        value = getattr(cfg, field.name)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            continue
        if math.isnan(value):
            raise ConfigError(field.name, "must not be NaN")
        if math.isinf(value) and field.name not in UNBOUNDED_FIELDS:
            raise ConfigError(field.name, "must be finite")

    for name in ("num_users", "num_sites", "num_antennas", "num_drops", "seed"):
        value = getattr(cfg, name)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(name, f"must be an integer, got {value!r}")

    positive = (
        "area_side",
        "num_users",
        "num_sites",
        "num_antennas",
        "num_drops",
        "element_spacing",
        "carrier_freq",
        "bandwidth",
        "temperature",
        "bs_height",
    )
    for name in positive:
        if getattr(cfg, name) <= 0:
            raise ConfigError(name, f"must be positive, got {getattr(cfg, name)!r}")

    non_negative = (
        "terminal_height",
        "site_height_above_terminal",
        "bs_nf_db",
        "rep_nf_db",
        "ap_nf_db",
    )
    for name in non_negative:
        if getattr(cfg, name) < 0:
            raise ConfigError(name, f"must not be negative, got {getattr(cfg, name)!r}")

    if cfg.mesh_size**2 != cfg.num_sites:
        raise ConfigError("num_sites", f"{cfg.num_sites} is not a perfect square")
    if not 0 <= cfg.seed < SEED_LIMIT:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")
    if cfg.tau_db == -math.inf:
        raise ConfigError("tau_db", "must not be -inf")

    return cfg
