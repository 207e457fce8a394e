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

import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from ..scenario import ConfigError, Element, Mode, ScenarioConfig
from ..version import __version__


@dataclass(frozen=True)
class RunManifest(Element):
    """Everything needed to reproduce a run

    Required attributes: `command`, `version`

    Child elements: `run`, `scenario`, `outputs`

    The embedded ``<scenario>`` is a complete configuration file of its own,
    so ``simulate --config manifest.xml`` re-runs the campaign.
    """

    command: str
    config: ScenarioConfig
    modes: tuple[Mode, ...]
    outputs: tuple[str, ...] = ()
    duration_s: float = 0.0
    version: str = __version__
    sweep: str | None = None
    sweep_values: tuple[float, ...] = field(default=())

    @classmethod
    def parse_file(cls, input_file: str) -> RunManifest:
        if not os.path.exists(input_file):
            raise ConfigError(input_file, "manifest file does not exist")
        try:
            xmlroot = ET.parse(input_file).getroot()
        except ET.ParseError as e:
            raise ConfigError(input_file, f"not a valid XML file ({e})")
        if xmlroot.tag != "manifest":
            raise ConfigError(input_file, "not a run manifest")
        return cls.parse(xmlroot)

    @classmethod
    def parse(cls, element: ET.Element) -> RunManifest:
        run = element.find("run")
        if run is None:
            raise ConfigError("run", "missing <run> in <manifest>")
        modes = cls.parse_attribute(run, "modes")
        values = cls.parse_optional_attribute(run, "values")
        outputs = element.find("outputs")
        files = [] if outputs is None else outputs.findall("file")

        return cls(
            command=cls.parse_attribute(element, "command"),
            version=cls.parse_attribute(element, "version"),
            duration_s=cls.parse_float(
                cls.parse_attribute(element, "duration-s"), "duration-s"
            ),
            config=cls.parse_child(element, ScenarioConfig, "scenario"),
            modes=tuple(Mode.parse(mode) for mode in modes.split(",")),
            sweep=cls.parse_optional_attribute(run, "sweep"),
            sweep_values=tuple(
                cls.parse_float(value, "values") for value in values.split(",")
            )
            if values
            else (),
            outputs=tuple(cls.parse_attribute(f, "name") for f in files),
        )

    def to_element(self) -> ET.Element:
        element = ET.Element(
            "manifest",
            command=self.command,
            version=self.version,
        )
        element.set("duration-s", f"{self.duration_s:.3f}")
        run = ET.SubElement(element, "run", modes=",".join(mode.value for mode in self.modes))
        if self.sweep is not None:
            run.set("sweep", self.sweep)
            run.set("values", ",".join(self.format_value(v) for v in self.sweep_values))
        element.append(self.config.to_element())
        outputs = ET.SubElement(element, "outputs")
        for name in self.outputs:
            ET.SubElement(outputs, "file", name=name)
        return element

    def write(self, path: str) -> None:
        tree = ET.ElementTree(self.to_element())
        ET.indent(tree)
        tree.write(path, encoding="utf-8", xml_declaration=True)
