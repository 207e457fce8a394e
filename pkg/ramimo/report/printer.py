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

import contextlib
from typing import Iterator, Mapping, TextIO
from xml.sax.saxutils import escape, quoteattr

# the size of the tab stops
TAB_STOP = 2


class Printer:
    def __init__(self, header: str | None = None) -> None:
        """Line based text builder

        Lines are added by directly calling the printer object and are
        indented according to the current :meth:`Printer.indented` level.

        :param header:
            Optional first line of the output.
        """
        self._level = 0
        self._lines: list[str] = [] if header is None else [header]

    def __call__(self, new_line: str | None = None) -> None:
        """Add the new line to the printer

        :param new_line:
            The new line to add, empty lines are kept unindented.
        """
        if new_line:
            self._lines.append((" " * TAB_STOP * self._level) + new_line)
        else:
            self._lines.append("")

    def field(self, label: str, value: str, unit: str = "", width: int = 32) -> None:
        """Add a ``label: value unit`` report line with aligned values"""
        line = f"{label + ':':<{width}} {value}"
        if unit:
            line = f"{line} {unit}"
        self(line)

    def tag(self, name: str, attributes: Mapping[str, object], text: str | None = None) -> None:
        """Add a single XML/SVG element on one line"""
        attrs = "".join(f" {key}={quoteattr(str(value))}" for key, value in attributes.items())
        if text is None:
            self(f"<{name}{attrs}/>")
        else:
            self(f"<{name}{attrs}>{escape(text)}</{name}>")

    @contextlib.contextmanager
    def element(self, name: str, attributes: Mapping[str, object]) -> Iterator[None]:
        """Open an element, children added in the block are indented"""
        attrs = "".join(f" {key}={quoteattr(str(value))}" for key, value in attributes.items())
        self(f"<{name}{attrs}>")
        with self.indented():
            yield
        self(f"</{name}>")

    @contextlib.contextmanager
    def indented(self) -> Iterator[None]:
        """Indent in a level in the context manager block"""
        self._level += 1
        yield
        self._level -= 1

    @property
    def text(self) -> str:
        return "\n".join(self._lines) + "\n"

    def write(self, f: TextIO) -> None:
        """Write the lines added to the printer out to the given file"""
        f.write(self.text)
