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

import math
from dataclasses import dataclass, field

import numpy as np

from .printer import Printer

WIDTH = 640
HEIGHT = 440
MARGIN_LEFT = 64
MARGIN_RIGHT = 160
MARGIN_TOP = 24
MARGIN_BOTTOM = 56

# points per polyline, CDFs are resampled at evenly spaced probabilities
MAX_POINTS = 500

COLORS = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)


@dataclass
class CdfChart:
    """Self-contained SVG plot of empirical CDFs

    Every series added with :meth:`CdfChart.add` becomes one polyline, the x
    axis is SINR in dB, the y axis the CDF.
    """

    title: str = ""
    series: list[tuple[str, np.ndarray]] = field(default_factory=list)

    def add(self, label: str, samples: np.ndarray) -> None:
        self.series.append((label, np.sort(np.asarray(samples, dtype=float))))

    def x_range(self) -> tuple[float, float]:
        """Axis limits, rounded out to multiples of 10 dB"""
        low = min(float(samples[0]) for _, samples in self.series)
        high = max(float(samples[-1]) for _, samples in self.series)
        low = 10 * math.floor(low / 10)
        high = 10 * math.ceil(high / 10)
        if high <= low:
            high = low + 10
        return low, high

    def _x(self, value: float, low: float, high: float) -> float:
        plot_width = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        return MARGIN_LEFT + (value - low) / (high - low) * plot_width

    def _y(self, value: float) -> float:
        plot_height = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        return MARGIN_TOP + (1 - value) * plot_height

    def render(self) -> Printer:
        if not self.series:
            raise ValueError("CDF chart has no series")
        low, high = self.x_range()
        printer = Printer('<?xml version="1.0" encoding="UTF-8"?>')

        svg_attrs = {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": WIDTH,
            "height": HEIGHT,
            "viewBox": f"0 0 {WIDTH} {HEIGHT}",
            "font-family": "sans-serif",
            "font-size": 12,
        }
        with printer.element("svg", svg_attrs):
            printer.tag("rect", {"width": WIDTH, "height": HEIGHT, "fill": "white"})
            if self.title:
                printer.tag("title", {}, self.title)
            self._render_axes(printer, low, high)
            for index, (label, samples) in enumerate(self.series):
                color = COLORS[index % len(COLORS)]
                self._render_series(printer, samples, color, low, high)
                self._render_legend(printer, index, label, color)
        return printer

    def _render_axes(self, printer: Printer, low: float, high: float) -> None:
        left, right = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
        top, bottom = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM
        with printer.element("g", {"stroke": "#cccccc", "stroke-width": 1}):
            step = 10 if high - low <= 100 else 20
            for tick in np.arange(low, high + step / 2, step):
                x = self._x(tick, low, high)
                printer.tag("line", {"x1": f"{x:.2f}", "y1": top, "x2": f"{x:.2f}", "y2": bottom})
            for tick in np.linspace(0, 1, 6):
                y = self._y(tick)
                printer.tag("line", {"x1": left, "y1": f"{y:.2f}", "x2": right, "y2": f"{y:.2f}"})

        printer.tag(
            "rect",
            {"x": left, "y": top, "width": right - left, "height": bottom - top, "fill": "none", "stroke": "black"},
        )
        with printer.element("g", {"text-anchor": "middle"}):
            for tick in np.arange(low, high + step / 2, step):
                x = self._x(tick, low, high)
                printer.tag("text", {"x": f"{x:.2f}", "y": bottom + 16}, f"{tick:g}")
            printer.tag("text", {"x": (left + right) / 2, "y": HEIGHT - 16}, "SINR [dB]")
        with printer.element("g", {"text-anchor": "end"}):
            for tick in np.linspace(0, 1, 6):
                printer.tag("text", {"x": left - 6, "y": f"{self._y(tick) + 4:.2f}"}, f"{tick:.1f}")
        printer.tag(
            "text",
            {
                "x": 16,
                "y": (top + bottom) / 2,
                "text-anchor": "middle",
                "transform": f"rotate(-90 16 {(top + bottom) / 2})",
            },
            "CDF",
        )

    def _render_series(
        self, printer: Printer, samples: np.ndarray, color: str, low: float, high: float
    ) -> None:
        n = len(samples)
        if n > MAX_POINTS:
            picks = np.unique(np.linspace(0, n - 1, MAX_POINTS).round().astype(int))
        else:
            picks = np.arange(n)
        points = " ".join(
            f"{self._x(samples[i], low, high):.2f},{self._y((i + 1) / n):.2f}" for i in picks
        )
        printer.tag(
            "polyline",
            {"points": points, "fill": "none", "stroke": color, "stroke-width": 1.5},
        )

    def _render_legend(self, printer: Printer, index: int, label: str, color: str) -> None:
        x = WIDTH - MARGIN_RIGHT + 12
        y = MARGIN_TOP + 12 + 18 * index
        printer.tag("line", {"x1": x, "y1": y, "x2": x + 20, "y2": y, "stroke": color, "stroke-width": 2})
        printer.tag("text", {"x": x + 26, "y": y + 4}, label)

    def write(self, path: str) -> None:
        with open(path, "w") as f:
            self.render().write(f)
