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

from typing import TypeVar, Type
import abc
import math
import xml.etree.ElementTree as ET

T = TypeVar("T", bound="Element")

TRUE_VALUES = ("true", "yes", "on", "1")
FALSE_VALUES = ("false", "no", "off", "0")


class ConfigError(ValueError):
    """Invalid scenario configuration

    :param field:
        Name of the offending configuration field (or the path of the file
        that could not be read).
    :param message:
        What is wrong with it.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class Element(abc.ABC):
    """Base for objects read from and written to the XML configuration"""

    @classmethod
    @abc.abstractmethod
    def parse(cls: Type[T], element: ET.Element) -> T:
        pass

    @abc.abstractmethod
    def to_element(self) -> ET.Element:
        pass

    @staticmethod
    def parse_optional_attribute(element: ET.Element, name: str) -> str | None:
        obj = element.attrib.get(name)
        return obj

    @staticmethod
    def parse_attribute(element: ET.Element, name: str) -> str:
        obj = Element.parse_optional_attribute(element, name)
        if obj is None:
            raise ConfigError(name, f"missing required attribute on <{element.tag}>")

        return obj

    @staticmethod
    def parse_float(value: str, field: str) -> float:
        try:
            return float(value)
        except ValueError:
            raise ConfigError(field, f"expected a number, got {value!r}")

    @staticmethod
    def parse_int(value: str, field: str) -> int:
        try:
            return int(value, 0)
        except ValueError:
            pass
        # accept integral floats such as "1e3"
        number = Element.parse_float(value, field)
        if not math.isfinite(number) or number != int(number):
            raise ConfigError(field, f"expected an integer, got {value!r}")
        return int(number)

    @staticmethod
    def parse_bool(value: str, field: str) -> bool:
        lowered = value.strip().lower()
        if lowered in TRUE_VALUES:
            return True
        if lowered in FALSE_VALUES:
            return False
        raise ConfigError(field, f"expected a boolean, got {value!r}")

    @staticmethod
    def format_value(value: object) -> str:
        """Format a value so that parsing it back gives the same value"""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return repr(value)
        return str(value)

    @staticmethod
    def parse_optional_child(
        element: ET.Element, child_class: Type[T], name: str
    ) -> T | None:
        obj = element.find(name)
        if obj is None:
            return None

        return child_class.parse(obj)

    @staticmethod
    def parse_child(element: ET.Element, child_class: Type[T], name: str) -> T:
        obj = Element.parse_optional_child(element, child_class, name)
        if obj is None:
            raise ConfigError(name, f"missing required <{name}> in <{element.tag}>")

        return obj
