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

"""Compare the three architectures and a target-ratio sweep

Prints the 10th, 50th and 90th percentile SINR of C-MIMO, D-MIMO and RA-MIMO
at several target ratios, all campaigns sharing the same drops.
"""

import logging
import os
import sys

this_file = os.path.abspath(__file__)
this_dir = os.path.split(this_file)[0]
root_dir = os.path.split(this_dir)[0]
ramimo_dir = os.path.join(root_dir, "ramimo")
if os.path.exists(ramimo_dir):
    sys.path.append(root_dir)

from ramimo import Mode, ScenarioConfig  # noqa: E402
from ramimo.montecarlo import run_campaign, sweep  # noqa: E402

DROPS = 200


def report(result):
    p10, p50, p90 = (result.percentile(q) for q in (10, 50, 90))
    print(f"{result.label:>10}: {p10:7.2f} {p50:7.2f} {p90:7.2f} dB")


def main():
    cfg = ScenarioConfig.parse_file(os.path.join(this_dir, "default.xml"))
    cfg = cfg.override(num_drops=DROPS)

    print(f"{'':>10}  {'10%':>7} {'50%':>7} {'90%':>7}")
    for mode in (Mode.CMIMO, Mode.DMIMO):
        report(run_campaign(cfg.override(mode=mode), label=mode.label))
    for result in sweep(cfg, "tau", [20, 40, 60]):
        report(result)


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    main()
