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

import argparse
import csv
import dataclasses
import logging
import os
import shlex
import sys
import time
import xml.etree.ElementTree as ET
from typing import Any, Callable, Sequence

import numpy as np

from . import hwbudget
from .montecarlo import (
    CampaignResult,
    DropError,
    SweepParameter,
    bootstrap_percentile_intervals,
    default_workers,
    prepare_drop,
    run_campaign,
    sweep,
)
from .report import (
    CdfChart,
    Printer,
    RunManifest,
    format_float,
    write_cdf_csv,
    write_percentiles_csv,
    write_samples_csv,
)
from .scenario import ConfigError, Mode, ScenarioConfig
from .version import __version__

logger = logging.getLogger(__name__)

# flag name -> ScenarioConfig field
OVERRIDES = (
    ("drops", "num_drops"),
    ("seed", "seed"),
    ("users", "num_users"),
    ("tau", "tau_db"),
    ("cap", "gain_cap_db"),
    ("nf_rep", "rep_nf_db"),
    ("margin", "activation_snr_margin_db"),
    ("zero_phase", "zero_phase"),
    ("shadowing", "shadowing"),
)

SAMPLES_FILE = "samples.csv"
CDF_FILE = "cdf.csv"
PERCENTILES_FILE = "percentiles.csv"
CHART_FILE = "cdf.svg"
MANIFEST_FILE = "manifest.xml"


def comma_list(convert: Callable[[str], Any]) -> Callable[[str], list[Any]]:
    """argparse type for ``a,b,c`` lists"""

    def parse(value: str) -> list[Any]:
        try:
            return [convert(item.strip()) for item in value.split(",") if item.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))

    return parse


def parse_mode(value: str) -> Mode:
    try:
        return Mode.parse(value)
    except ConfigError as e:
        raise ValueError(e.message)


def add_campaign_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-c",
        "--config",
        metavar="XML_FILE",
        help="Scenario file or run manifest, flags override its values",
    )
    parser.add_argument("--drops", type=int, help="Number of independent drops")
    parser.add_argument("--seed", type=int, help="Campaign seed")
    parser.add_argument("--users", type=int, help="Number of single-antenna users")
    parser.add_argument("--tau", type=float, help="Repeater target ratio in dB")
    parser.add_argument("--cap", type=float, help="Repeater amplification cap in dB")
    parser.add_argument("--nf-rep", type=float, help="Repeater noise figure in dB")
    parser.add_argument(
        "--margin", type=float, help="Repeater activation SNR margin in dB"
    )
    parser.add_argument(
        "--zero-phase",
        action="store_const",
        const=True,
        help="Force the repeater response phase to zero",
    )
    parser.add_argument(
        "--shadowing",
        action="store_const",
        const=True,
        help="Enable log-normal shadow fading",
    )
    parser.add_argument(
        "--threads",
        type=int,
        help="Worker threads, defaults to $RAMIMO_THREADS or the CPU count",
    )
    parser.add_argument(
        "-o",
        "--output-dir",
        metavar="DIR",
        default=".",
        help="Directory to write the results to",
    )
    parser.add_argument("--no-svg", action="store_true", help="Skip the SVG CDF plot")
    parser.add_argument(
        "--dump-drop",
        metavar="INDEX",
        type=int,
        help="Also write the channels and repeater state of one drop",
    )


def add_hwcalc_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--csv", action="store_true", help="Print quantity,value,unit rows"
    )
    # accepted after the calculator name too, unset there unless given
    csv_option = argparse.ArgumentParser(add_help=False)
    csv_option.add_argument(
        "--csv",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Print quantity,value,unit rows",
    )
    calculators = parser.add_subparsers(dest="calculator", metavar="CALCULATOR")
    calculators.required = True

    def add_calculator(name: str, summary: str) -> argparse.ArgumentParser:
        return calculators.add_parser(name, help=summary, parents=[csv_option])

    pa_out = add_calculator("pa-out", "PA output power for an ACLR target")
    pa_out.add_argument("--cp", type=float, required=True, help="1 dB compression point in dBm")
    pa_out.add_argument(
        "--aclr",
        type=float,
        default=hwbudget.ACLR_WIDE_AREA_DB,
        help="ACLR target in dB (default: %(default)s)",
    )

    nf = add_calculator("nf", "Noise figure of passives followed by an LNA")
    nf.add_argument("--losses", type=float, nargs="+", default=[], help="Passive losses in dB")
    nf.add_argument("--lna", type=float, required=True, help="LNA noise figure in dB")

    evm = add_calculator("evm", "EVM of I/Q gain and phase mismatch")
    evm.add_argument("--gain-err", type=float, default=0.01, help="Relative gain error")
    evm.add_argument("--phase-err", type=float, default=1.0, help="Phase error in degrees")
    evm.add_argument("--stages", type=int, default=2, help="Conversion stages")
    evm.add_argument(
        "--rss", action="store_true", help="Independent stages, add in power"
    )

    delay = add_calculator("delay", "Butterworth group delay")
    delay.add_argument("--order", type=int, default=5, help="Filter order")
    delay.add_argument("--bandwidth", type=float, default=10e6, help="Cutoff in Hz")
    delay.add_argument("--freq", type=float, default=0.0, help="Offset frequency in Hz")

    stable = add_calculator("stable-gain", "Maximum stable repeater gain")
    stable.add_argument("--isolation", type=float, required=True, help="PA-to-LNA isolation in dB")
    stable.add_argument("--margin", type=float, default=10.0, help="Stability margin in dB")

    ris = add_calculator("ris-cells", "RIS cells matching a repeater gain")
    ris.add_argument("--gain", type=float, required=True, help="Repeater power gain in dB")

    budget = add_calculator("delay-budget", "Repeater delay against the cyclic prefix")
    budget.add_argument(
        "--delays", type=float, nargs="+", required=True, help="Component delays in s"
    )
    budget.add_argument(
        "--cyclic-prefix",
        type=float,
        default=hwbudget.NORMAL_CYCLIC_PREFIX_S,
        help="Cyclic prefix in s (default: %(default)s)",
    )

    report = add_calculator("report", "Full budget of a default repeater")
    report.add_argument("--isolation", type=float, default=50.0, help="PA-to-LNA isolation in dB")
    report.add_argument("--processing-delay", type=float, default=0.0, help="Digital delay in s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramimo",
        description="Repeater-assisted massive MIMO uplink simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress, twice for per-drop details",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    simulate = commands.add_parser("simulate", help="Run one campaign per mode")
    add_campaign_arguments(simulate)
    simulate.add_argument(
        "--mode",
        type=comma_list(parse_mode),
        help="Comma separated modes (cmimo, dmimo, ramimo)",
    )

    sweep_parser = commands.add_parser("sweep", help="Sweep a repeater parameter")
    add_campaign_arguments(sweep_parser)
    sweep_parser.add_argument(
        "--param",
        choices=[parameter.alias for parameter in SweepParameter],
        help="Parameter to sweep",
    )
    sweep_parser.add_argument(
        "--values",
        type=comma_list(float),
        help="Comma separated parameter values, taken from a sweep manifest if omitted",
    )
    sweep_parser.add_argument(
        "--mode", type=parse_mode, help="Swept mode (default: ramimo)"
    )
    sweep_parser.add_argument(
        "--reference",
        type=comma_list(parse_mode),
        help="Comma separated baseline modes added to the comparison",
    )

    hwcalc = commands.add_parser("hwcalc", help="Repeater hardware budget calculators")
    add_hwcalc_arguments(hwcalc)
    return parser


def resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    """Configuration file (or defaults) with the command line flags applied"""
    cfg = ScenarioConfig() if args.config is None else ScenarioConfig.parse_file(args.config)
    overrides = {
        field: getattr(args, flag)
        for flag, field in OVERRIDES
        if getattr(args, flag) is not None
    }
    logger.debug("Configuration overrides: {}".format(overrides))
    return cfg.override(**overrides)


def resolve_workers(args: argparse.Namespace) -> int:
    if args.threads is None:
        return default_workers()
    if args.threads < 1:
        raise ConfigError("threads", f"expected a positive integer, got {args.threads}")
    return args.threads


def read_manifest(path: str) -> RunManifest | None:
    """The run manifest at ``path``, ``None`` for plain scenario files"""
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError:
        return None
    if root.tag != "manifest":
        return None
    return RunManifest.parse(root)


def command_line(argv: Sequence[str]) -> str:
    return " ".join(shlex.quote(arg) for arg in ["ramimo", *argv])


def dump_drop(output_dir: str, cfg: ScenarioConfig, drop_index: int) -> list[str]:
    """Write the channels (and repeater state) of a single drop"""
    if drop_index < 0:
        raise ConfigError("dump-drop", f"drop index must not be negative, got {drop_index}")
    _, realization, state = prepare_drop(cfg, drop_index)

    written = [f"channels_drop{drop_index}.csv"]
    realization.write_csv(os.path.join(output_dir, written[0]))
    if state is not None:
        written.append(f"repeaters_drop{drop_index}.csv")
        state.write_csv(os.path.join(output_dir, written[1]))
    return written


def write_results(
    output_dir: str,
    results: Sequence[CampaignResult],
    svg: bool,
    with_intervals: bool = False,
) -> list[str]:
    """samples, CDF and percentile tables plus the overlay plot"""
    os.makedirs(output_dir, exist_ok=True)
    write_samples_csv(os.path.join(output_dir, SAMPLES_FILE), results)
    write_cdf_csv(os.path.join(output_dir, CDF_FILE), results)

    intervals = None
    if with_intervals:
        intervals = {
            result.label: bootstrap_percentile_intervals(result.by_drop)
            for result in results
            if len(result.by_drop) > 1
        }
    write_percentiles_csv(os.path.join(output_dir, PERCENTILES_FILE), results, intervals)
    written = [SAMPLES_FILE, CDF_FILE, PERCENTILES_FILE]

    if svg:
        chart = CdfChart(title="Uplink SINR")
        for result in results:
            chart.add(result.label, result.samples)
        chart.write(os.path.join(output_dir, CHART_FILE))
        written.append(CHART_FILE)

    for name in written:
        logger.info("Wrote {}".format(os.path.join(output_dir, name)))
    return written


def cmd_simulate(args: argparse.Namespace, argv: Sequence[str]) -> int:
    start = time.perf_counter()
    cfg = resolve_config(args)
    workers = resolve_workers(args)

    manifest = None if args.config is None else read_manifest(args.config)
    if manifest is not None and manifest.sweep is not None:
        raise ConfigError(args.config, "manifest records a sweep, replay it with 'ramimo sweep'")

    modes: Sequence[Mode] | None = args.mode
    if not modes and manifest is not None:
        modes = manifest.modes
    if not modes:
        modes = [cfg.mode]
    modes = list(dict.fromkeys(modes))

    results = [
        run_campaign(cfg.override(mode=mode), workers=workers, label=mode.value)
        for mode in modes
    ]
    outputs = write_results(args.output_dir, results, not args.no_svg, with_intervals=True)

    if args.dump_drop is not None:
        target = Mode.RAMIMO if Mode.RAMIMO in modes else modes[0]
        outputs += dump_drop(args.output_dir, cfg.override(mode=target), args.dump_drop)

    RunManifest(
        command=command_line(argv),
        config=cfg.override(mode=modes[0]),
        modes=tuple(modes),
        outputs=tuple(outputs + [MANIFEST_FILE]),
        duration_s=time.perf_counter() - start,
    ).write(os.path.join(args.output_dir, MANIFEST_FILE))
    for result in results:
        print(summary_line(result))
    return 0


def cmd_sweep(args: argparse.Namespace, argv: Sequence[str]) -> int:
    start = time.perf_counter()
    base = resolve_config(args)

    # a sweep manifest supplies whatever the flags leave out
    manifest = None if args.config is None else read_manifest(args.config)
    recorded = manifest if manifest is not None and manifest.sweep is not None else None

    name = args.param
    if name is None and recorded is not None:
        name = recorded.sweep
    if name is None:
        raise ConfigError("param", "sweep needs --param or a sweep manifest")
    parameter = SweepParameter.parse(name)

    values = args.values
    if values is None and recorded is not None and recorded.sweep == parameter.alias:
        values = list(recorded.sweep_values)
    if not values:
        raise ConfigError("values", "sweep needs at least one value")

    mode = args.mode
    reference = args.reference
    if recorded is not None:
        mode = mode or recorded.modes[0]
        reference = reference if reference is not None else list(recorded.modes[1:])
    cfg = base.override(mode=mode or Mode.RAMIMO)
    workers = resolve_workers(args)

    points = sweep(cfg, parameter, values, workers=workers)
    for value, point in zip(values, points):
        subdir = os.path.join(args.output_dir, "{}_{:g}".format(parameter.alias, value))
        # per-point files match a plain simulate run of the point's config
        plain = dataclasses.replace(point, label=point.mode.value)
        outputs = write_results(subdir, [plain], not args.no_svg, with_intervals=True)
        RunManifest(
            command=command_line(argv),
            config=point.config,
            modes=(point.mode,),
            outputs=tuple(outputs + [MANIFEST_FILE]),
            duration_s=time.perf_counter() - start,
        ).write(os.path.join(subdir, MANIFEST_FILE))

    references = [
        run_campaign(cfg.override(mode=mode), workers=workers, label=mode.value)
        for mode in dict.fromkeys(reference or [])
        if mode is not cfg.mode
    ]
    comparison = points + references
    outputs = write_results(args.output_dir, comparison, not args.no_svg)

    if args.dump_drop is not None:
        outputs += dump_drop(args.output_dir, cfg, args.dump_drop)

    RunManifest(
        command=command_line(argv),
        config=cfg,
        modes=(cfg.mode, *(result.mode for result in references)),
        outputs=tuple(outputs + [MANIFEST_FILE]),
        duration_s=time.perf_counter() - start,
        sweep=parameter.alias,
        sweep_values=tuple(float(value) for value in values),
    ).write(os.path.join(args.output_dir, MANIFEST_FILE))
    for result in comparison:
        print(summary_line(result))
    return 0


def summary_line(result: CampaignResult) -> str:
    p10, p50, p90 = (result.percentiles[q] for q in (10.0, 50.0, 90.0))
    return "{}: {} samples, SINR 10/50/90% = {:.2f} / {:.2f} / {:.2f} dB".format(
        result.label, len(result.samples), p10, p50, p90
    )


def hwcalc_lines(args: argparse.Namespace) -> list[hwbudget.BudgetLine]:
    """Evaluate the requested calculator, ``ValueError`` on bad input"""
    BudgetLine = hwbudget.BudgetLine
    calculator = args.calculator
    if calculator == "pa-out":
        value = hwbudget.pa_output_power_dbm(args.cp, args.aclr)
        return [BudgetLine("pa-out", "PA output power", value, "dBm")]
    if calculator == "nf":
        value = hwbudget.cascade_nf_db(args.losses, args.lna)
        return [BudgetLine("nf", "Noise figure", value, "dB")]
    if calculator == "evm":
        evm = hwbudget.iq_evm_fraction(
            args.gain_err, args.phase_err, args.stages, coherent=not args.rss
        )
        return [BudgetLine("evm", "I/Q EVM", 100 * evm, "%")]
    if calculator == "delay":
        numeric = hwbudget.butterworth_group_delay_s(args.order, args.bandwidth, args.freq)
        lines = [BudgetLine("delay", "Filter group delay", numeric * 1e9, "ns")]
        if args.freq == 0:
            closed = hwbudget.butterworth_dc_group_delay_s(args.order, args.bandwidth)
            lines.append(BudgetLine("delay-dc", "DC group delay (pole sum)", closed * 1e9, "ns"))
        return lines
    if calculator == "stable-gain":
        value = hwbudget.max_stable_gain_db(args.isolation, args.margin)
        return [BudgetLine("stable-gain", "Max stable gain", value, "dB")]
    if calculator == "ris-cells":
        cells = hwbudget.ris_equivalent_cells(args.gain)
        return [BudgetLine("ris-cells", "RIS cells for same gain", cells, "cells")]
    if calculator == "delay-budget":
        verdict = hwbudget.delay_budget_check(args.delays, args.cyclic_prefix)
        return [
            BudgetLine("delay-total", "Total repeater delay", verdict.total_s * 1e9, "ns"),
            BudgetLine("delay-ratio", "Delay / cyclic prefix", verdict.ratio, ""),
            BudgetLine("delay-margin", "Margin to cyclic prefix", verdict.margin_s * 1e9, "ns"),
            BudgetLine("delay-pass", "Delay budget met", float(verdict.passed), ""),
        ]
    if calculator == "report":
        budget = hwbudget.RepeaterBudget(
            isolation_db=args.isolation, processing_delay_s=args.processing_delay
        )
        return budget.evaluate()
    raise ValueError(f"unknown calculator {calculator!r}")


def format_budget_value(value: float) -> str:
    return f"{value:.6g}"


def cmd_hwcalc(args: argparse.Namespace) -> int:
    lines = hwcalc_lines(args)
    if args.csv:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(("quantity", "value", "unit"))
        for line in lines:
            writer.writerow((line.quantity, format_float(line.value), line.unit))
        return 0

    printer = Printer()
    for line in lines:
        printer.field(line.label, format_budget_value(line.value), line.unit)
    printer.write(sys.stdout)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "simulate":
            return cmd_simulate(args, argv)
        if args.command == "sweep":
            return cmd_sweep(args, argv)
        return cmd_hwcalc(args)
    except (DropError, np.linalg.LinAlgError) as e:
        logger.error("Simulation failed: {}".format(e))
        return 1
    except (ValueError, OSError) as e:
        # ConfigError is a ValueError
        logger.error("{}".format(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
