# Copyright 2024 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""The reversible flow group: elements as atlases, its standard generators, and the generation and
fragmentation constructions."""

from dyadic_flows.flow_group.atlas import (
    Atlas,
    AtlasPiece,
    ChartElement,
    Region,
    chart_region,
    cocycle_eval,
    elem_compose,
    elem_equal,
    elem_eval,
    elem_invert,
    elem_validate,
    identity_atlas,
    random_points,
    support_region,
)
from dyadic_flows.flow_group.fragmentation import default_cover, fragment_element, interpolation_chain
from dyadic_flows.flow_group.generators import (
    LABELS,
    check_generator_intervals,
    generating_charts,
    generator_elements,
    standard_generators,
)
from dyadic_flows.flow_group.rewriting import Word, completeness, intersection_rewrite
