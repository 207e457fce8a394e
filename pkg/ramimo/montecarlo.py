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

import enum
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelRealization, synthesize_channels
from .receiver import assemble_problem, mmse_sinr
from .repeater import RepeaterState, activation_mask, gain_control
from .scenario import ConfigError, Deployment, Mode, ScenarioConfig, build_deployment

logger = logging.getLogger(__name__)

PERCENTILES = (1.0, 5.0, 10.0, 25.0, 50.0, 75.0, 90.0, 95.0, 99.0)

THREADS_ENV = "RAMIMO_THREADS"


class DropError(RuntimeError):
    """Numerical failure while evaluating a drop"""

    def __init__(self, drop_index: int, message: str) -> None:
        super().__init__(f"drop {drop_index}: {message}")
        self.drop_index = drop_index


@enum.unique
class SweepParameter(enum.Enum):
    """Configuration fields a sweep can vary"""

    GAIN_CAP = "gain_cap_db"
    TAU = "tau_db"
    REP_NF = "rep_nf_db"

    @classmethod
    def parse(cls, value: str | SweepParameter) -> SweepParameter:
        if isinstance(value, SweepParameter):
            return value
        aliases = {"cap": cls.GAIN_CAP, "tau": cls.TAU, "nf-rep": cls.REP_NF}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            raise ConfigError("parameter", f"cannot sweep {value!r}")

    @property
    def alias(self) -> str:
        return {"gain_cap_db": "cap", "tau_db": "tau", "rep_nf_db": "nf-rep"}[self.value]


def drop_generator(seed: int, drop_index: int) -> np.random.Generator:
    """Random stream of one drop

    A Philox counter-based generator keyed by the 128-bit word made of the
    campaign seed (low 64 bits) and the drop index (high 64 bits), its
    counter starting at zero.  Drops never share a key, so their streams are
    independent and can be evaluated in any order on any thread.
    """
    key = np.array([seed, drop_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def default_workers() -> int:
    """Worker count, capped by ``RAMIMO_THREADS`` when set"""
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return os.cpu_count() or 1
    try:
        workers = int(value)
    except ValueError:
        raise ConfigError(THREADS_ENV, f"expected a positive integer, got {value!r}")
    if workers < 1:
        raise ConfigError(THREADS_ENV, f"expected a positive integer, got {value!r}")
    return workers


@dataclass(frozen=True)
class DropResult:
    """Per-user SINRs of one drop

    :param repeaters: the repeater state, RA-MIMO only
    """

    drop_index: int
    mode: Mode
    sinr_db: np.ndarray
    repeaters: RepeaterState | None = None

    @property
    def active_count(self) -> int | None:
        return None if self.repeaters is None else self.repeaters.num_active

    @property
    def mean_gain_db(self) -> float | None:
        return None if self.repeaters is None else self.repeaters.mean_gain_db()


def prepare_drop(
    cfg: ScenarioConfig, drop_index: int
) -> tuple[Deployment, ChannelRealization, RepeaterState | None]:
    """Geometry, channels and (RA-MIMO) repeater state of one drop"""
    rng = drop_generator(cfg.seed, drop_index)
    deployment = build_deployment(cfg, rng)
    realization = synthesize_channels(deployment, cfg, rng)

    state = None
    if cfg.mode is Mode.RAMIMO:
        state = gain_control(realization, activation_mask(realization, cfg), cfg, rng)
        logger.debug(
            "drop {}: {} active repeaters, mean gain {} dB".format(
                drop_index, state.num_active, state.mean_gain_db()
            )
        )
    return deployment, realization, state


def run_drop(cfg: ScenarioConfig, drop_index: int) -> DropResult:
    """Evaluate one drop of the configured architecture

    The drop is fully determined by ``(cfg.seed, drop_index)``.
    """
    _, realization, state = prepare_drop(cfg, drop_index)

    problem = assemble_problem(cfg.mode, realization, state, cfg)
    try:
        sinr = mmse_sinr(problem)
    except np.linalg.LinAlgError as e:
        raise DropError(drop_index, str(e)) from e
    if not np.all(np.isfinite(sinr)) or np.any(sinr <= 0):
        raise DropError(drop_index, "non-finite or non-positive SINR")

    return DropResult(
        drop_index=drop_index,
        mode=cfg.mode,
        sinr_db=10 * np.log10(sinr),
        repeaters=state,
    )


@dataclass(frozen=True)
class CampaignResult:
    """Pooled SINR statistics of a campaign

    :param label: name of the campaign in tables and plots
    :param by_drop: SINRs in dB, ``(num_drops, num_users)`` in drop order
    :param samples: all SINRs in dB pooled and sorted ascending
    :param percentiles: percentile -> SINR in dB of the pooled samples
    """

    label: str
    config: ScenarioConfig
    drops: tuple[DropResult, ...]
    by_drop: np.ndarray
    samples: np.ndarray
    percentiles: dict[float, float]

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def mode(self) -> Mode:
        return self.config.mode

    def cdf(self) -> tuple[np.ndarray, np.ndarray]:
        """Empirical CDF, the i-th smallest sample at ``(i + 1) / n``"""
        n = len(self.samples)
        return self.samples, np.arange(1, n + 1) / n

    def percentile(self, q: float) -> float:
        return float(np.percentile(self.samples, q))


def collect(label: str, cfg: ScenarioConfig, drops: Sequence[DropResult]) -> CampaignResult:
    by_drop = np.array([drop.sinr_db for drop in drops])
    samples = np.sort(by_drop, axis=None)
    return CampaignResult(
        label=label,
        config=cfg,
        drops=tuple(drops),
        by_drop=by_drop,
        samples=samples,
        percentiles={q: float(v) for q, v in zip(PERCENTILES, np.percentile(samples, PERCENTILES))},
    )


def run_campaign(
    cfg: ScenarioConfig, workers: int | None = None, label: str | None = None
) -> CampaignResult:
    """Run ``cfg.num_drops`` independent drops and pool their SINRs

    Drops are spread over a thread pool and reduced in drop order, so the
    result does not depend on the number of workers.
    """
    if workers is None:
        workers = default_workers()
    if label is None:
        label = cfg.mode.value

    logger.info(
        "Running {} drops of {} with {} workers".format(cfg.num_drops, label, workers)
    )
    start = time.perf_counter()
    indices = range(cfg.num_drops)
    if workers == 1:
        drops = [run_drop(cfg, index) for index in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            drops = list(executor.map(lambda index: run_drop(cfg, index), indices))
    logger.info("Finished {} in {:.2f} s".format(label, time.perf_counter() - start))

    return collect(label, cfg, drops)


def sweep(
    cfg: ScenarioConfig,
    parameter: SweepParameter | str,
    values: Sequence[float],
    workers: int | None = None,
) -> list[CampaignResult]:
    """One campaign per value of ``parameter``

    Every campaign keeps the seed, so drop ``d`` sees the same users and
    channels at every sweep point.
    """
    parameter = SweepParameter.parse(parameter)
    if len(values) == 0:
        raise ConfigError(parameter.alias, "sweep needs at least one value")

    results = []
    for value in values:
        point = cfg.override(**{parameter.value: float(value)})
        label = "{}={:g}".format(parameter.alias, value)
        logger.info("Sweep point {}".format(label))
        results.append(run_campaign(point, workers=workers, label=label))
    return results


def bootstrap_percentile_intervals(
    by_drop: np.ndarray,
    percentiles: Sequence[float] = PERCENTILES,
    num_resamples: int = 1000,
    confidence: float = 0.95,
    rng: np.random.Generator | None = None,
) -> dict[float, tuple[float, float]]:
    """Bootstrap intervals of pooled percentiles, resampling whole drops

    Users of one drop share a deployment, so drops rather than single SINRs
    are the independent samples.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    num_drops = len(by_drop)
    picks = rng.integers(0, num_drops, size=(num_resamples, num_drops))
    estimates = np.array([np.percentile(by_drop[pick], percentiles) for pick in picks])
    tail = (1 - confidence) / 2 * 100
    low, high = np.percentile(estimates, [tail, 100 - tail], axis=0)
    return {float(q): (float(lo), float(hi)) for q, lo, hi in zip(percentiles, low, high)}


def bootstrap_percentile_ci(
    by_drop: np.ndarray,
    q: float,
    num_resamples: int = 1000,
    confidence: float = 0.95,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Bootstrap interval of a single pooled percentile"""
    intervals = bootstrap_percentile_intervals(by_drop, [q], num_resamples, confidence, rng)
    return intervals[float(q)]


def bootstrap_gap_ci(
    a: np.ndarray,
    b: np.ndarray,
    q: float,
    num_resamples: int = 1000,
    confidence: float = 0.95,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Bootstrap interval of ``percentile(a) - percentile(b)``

    ``a`` and ``b`` are ``(num_drops, num_users)`` arrays from campaigns
    sharing a seed, so drops are resampled in pairs.
    """
    if np.shape(a)[0] != np.shape(b)[0]:
        raise ValueError("paired bootstrap needs the same number of drops")
    if rng is None:
        rng = np.random.default_rng(0)
    num_drops = len(a)
    picks = rng.integers(0, num_drops, size=(num_resamples, num_drops))
    gaps = np.array([np.percentile(a[pick], q) - np.percentile(b[pick], q) for pick in picks])
    tail = (1 - confidence) / 2 * 100
    low, high = np.percentile(gaps, [tail, 100 - tail])
    return float(low), float(high)
