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
"""Provides the builder that turns a parsed subshift config document into a subshift or an orbit-scheme family.

The `kind` key selects the builder:

* `sft` (default): `alphabet`, optional `involution` pairs, optional `sigma` (`{letters, center}`), and either
  `forbidden` words or `edges` between letters.
* `reduced`: reduced words over `alphabet` with its `involution`.
* `doubling`: the doubling of the subshift described under `base`.
* `union`: the disjoint union of the subshifts listed under `parts`.
* `salo`: a coded countable family with `alphabet` and `patterns`.
* `prescribed`: the prescribed-rigidity subshift with `n` spliced points.

Words may be written as lists of letters or, when every letter is one character, as plain strings.
"""


def _word(raw) -> tuple[str, ...]:
    if isinstance(raw, str):
        return tuple(raw)
    return tuple(str(a) for a in raw)


class SubshiftProvider:
    def __call__(self, config: dict):
        # Imported here: the subshift modules resolve the container at import time.
        from dyadic_flows.subshifts.constructions import build_doubling, build_reduced, disjoint_union
        from dyadic_flows.subshifts.prescribed import build_prescribed_rigidity
        from dyadic_flows.subshifts.salo import SaloFamily
        from dyadic_flows.subshifts.sft import InvAlphabet, Reversal, Sft

        if not isinstance(config, dict):
            raise TypeError(f"A subshift config must be a mapping, got {type(config).__name__}")
        kind = config.get("kind", "sft")
        name = config.get("name", kind)
        if kind == "prescribed":
            return build_prescribed_rigidity(int(config.get("n", 1)))
        if kind == "salo":
            return SaloFamily.from_config(config["alphabet"], config["patterns"], name=name)
        if kind == "doubling":
            return build_doubling(self(config["base"]))
        if kind == "union":
            return disjoint_union([self(part) for part in config["parts"]])

        if "alphabet" not in config:
            raise ValueError(f"Subshift config {name} has no alphabet")
        alphabet = InvAlphabet.from_pairs(config["alphabet"], config.get("involution", []))
        if kind == "reduced":
            return build_reduced(alphabet)
        if kind != "sft":
            raise ValueError(f"Not implemented subshift kind: {kind}")

        reversal = None
        sigma = config.get("sigma")
        if sigma == "formal":
            reversal = Reversal.formal_inverse(alphabet)
        elif isinstance(sigma, dict):
            pairs = tuple(tuple(str(a) for a in pair) for pair in sigma.get("letters", alphabet.pairs))
            reversal = Reversal(pairs, int(sigma.get("center", -1)))
        elif sigma is not None:
            raise ValueError(f"Subshift config {name}: sigma must be 'formal' or a mapping")
        if "edges" in config:
            return Sft.from_edges(alphabet, config["edges"], reversal, name=name)
        return Sft(alphabet, [_word(w) for w in config.get("forbidden", [])], reversal, name=name)
