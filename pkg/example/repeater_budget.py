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

"""Hardware budget of a low-cost repeater, for a few filter orders"""

import os
import sys

this_file = os.path.abspath(__file__)
this_dir = os.path.split(this_file)[0]
root_dir = os.path.split(this_dir)[0]
ramimo_dir = os.path.join(root_dir, "ramimo")
if os.path.exists(ramimo_dir):
    sys.path.append(root_dir)

from ramimo.hwbudget import RepeaterBudget  # noqa: E402
from ramimo.report import Printer  # noqa: E402


def main():
    for order in (3, 5, 7):
        printer = Printer(f"Butterworth order {order}")
        with printer.indented():
            for line in RepeaterBudget(filter_order=order).evaluate():
                printer.field(line.label, f"{line.value:.4g}", line.unit)
        printer()
        printer.write(sys.stdout)


if __name__ == "__main__":
    main()
