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

import csv
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

if TYPE_CHECKING:
    from ..montecarlo import CampaignResult

# fixed precision, formatted by Python itself so the locale never matters
PRECISION = 6


def format_float(value: float) -> str:
    return f"{float(value):.{PRECISION}f}"


def write_rows(path: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    """Write a CSV file with ``\\n`` line endings"""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_samples_csv(path: str, results: Sequence[CampaignResult]) -> None:
    """Per-user SINRs, one block per campaign ordered by drop then user"""

    def rows() -> Iterable[tuple[str, ...]]:
        for result in results:
            for drop in result.drops:
                for user, sinr_db in enumerate(drop.sinr_db):
                    yield (str(drop.drop_index), str(user), result.label, format_float(sinr_db))

    write_rows(path, ("drop", "user", "mode", "sinr_db"), rows())


def write_cdf_csv(path: str, results: Sequence[CampaignResult]) -> None:
    """Empirical CDF of the pooled samples of each campaign"""

    def rows() -> Iterable[tuple[str, ...]]:
        for result in results:
            sinr_db, cdf = result.cdf()
            for x, y in zip(sinr_db, cdf):
                yield (result.label, format_float(x), format_float(y))

    write_rows(path, ("mode", "sinr_db", "cdf"), rows())


def write_percentiles_csv(
    path: str,
    results: Sequence[CampaignResult],
    intervals: Mapping[str, Mapping[float, tuple[float, float]]] | None = None,
) -> None:
    """Percentile table, one column per campaign

    With ``intervals`` (label -> percentile -> (low, high)) every campaign also
    gets ``<label>_ci_low`` and ``<label>_ci_high`` columns.
    """
    header = ["percentile"]
    for result in results:
        header.append(result.label)
        if intervals is not None and result.label in intervals:
            header.extend([f"{result.label}_ci_low", f"{result.label}_ci_high"])

    percentiles = sorted(results[0].percentiles) if results else []
    table = []
    for q in percentiles:
        row = [format_float(q)]
        for result in results:
            row.append(format_float(result.percentiles[q]))
            if intervals is not None and result.label in intervals:
                low, high = intervals[result.label][q]
                row.extend([format_float(low), format_float(high)])
        table.append(row)

    write_rows(path, header, table)
