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
"""Subshifts of finite type with reversing involutions, their points, clopen sets and orbit schemes."""

from dyadic_flows.subshifts.checks import (
    check_irreducible_and_clopen_invariants,
    check_reversibility,
    check_topological_freeness,
    orbits,
)
from dyadic_flows.subshifts.clopen import Clopen, clopen_ops, cylinder, whole
from dyadic_flows.subshifts.constructions import (
    build_doubling,
    build_reduced,
    disjoint_union,
    full_shift,
    transitive_point,
)
from dyadic_flows.subshifts.points import EventuallyPeriodic, Lazy, SymPoint, reversal, shift_apply
from dyadic_flows.subshifts.prescribed import build_prescribed_rigidity
from dyadic_flows.subshifts.salo import SaloFamily
from dyadic_flows.subshifts.schemes import OrbitClass, OrbitScheme, sft_scheme
from dyadic_flows.subshifts.sft import InvAlphabet, Reversal, Sft


def build_salo_rank(letters, patterns, name: str = "salo") -> SaloFamily:
    """The coded family of a countable closed set given by block patterns."""
    return SaloFamily.from_config(letters, patterns, name=name)
