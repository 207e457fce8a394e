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

from .manifest import RunManifest  # noqa: F401
from .printer import Printer  # noqa: F401
from .svg import CdfChart  # noqa: F401
from .tables import (  # noqa: F401
    format_float,
    write_cdf_csv,
    write_percentiles_csv,
    write_rows,
    write_samples_csv,
)
