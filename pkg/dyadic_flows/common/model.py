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
"""
Defines the verdict models shared by every check in the package.

This module provides the following:

* **Verdicts:**
    * `Certificate`: the outcome of one check, with a witness when it fails (or a certifying object when it
      passes, such as an isolating window).
    * `Report`: an ordered collection of certificates and free-form facts for one input.

* **Rendering:**
    * `transform_to_dictionary`: drops default-valued fields so records stay short.
    * `Report.records()`: flat dictionaries, one per certificate, for JSON-lines output.
"""

from typing import Any

from pydantic import BaseModel, Field


def transform_to_dictionary(base_model: BaseModel) -> dict:
    """
    Transform a Pydantic BaseModel instance into a dictionary containing only
    attributes that do not have their default values.

    Args:
        base_model (BaseModel): An instance of a Pydantic BaseModel.

    Returns:
        dict: A dictionary with keys and values from the BaseModel instance where
              the values are not equal to their defined default values.
    """
    return {k: v for k, v in base_model.model_dump().items() if v != base_model.model_fields[k].default}


class Certificate(BaseModel):
    """Outcome of a single exact or sampled check.

    Attributes:
        name (str): Identifier of the check, e.g. "reversibility.sigma_fixed".
        passed (bool): Verdict.
        witness (str): Rendered counterexample, or certifying object for positive certificates.
        details (dict): Check-specific data such as sample counts, radii or orbit names.
    """

    name: str
    passed: bool = True
    witness: str = ""
    details: dict[str, Any] = Field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def combine(cls, name: str, parts: list["Certificate"]) -> "Certificate":
        """Folds several certificates into one that fails with the first failing part's witness."""
        for part in parts:
            if not part.passed:
                return cls(name=name, passed=False, witness=part.witness, details={"failed": part.name, **part.details})
        return cls(name=name, passed=True, details={"checks": [part.name for part in parts]})


class Report(BaseModel):
    """A named collection of certificates and facts about one input."""

    subject: str
    certificates: list[Certificate] = Field(default_factory=list)
    facts: dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates)

    def add(self, certificate: Certificate) -> Certificate:
        self.certificates.append(certificate)
        return certificate

    def records(self) -> list[dict]:
        rows = [{"subject": self.subject, **transform_to_dictionary(c)} for c in self.certificates]
        if self.facts:
            rows.append({"subject": self.subject, "facts": self.facts})
        return rows

    def render_text(self) -> str:
        lines = [f"subject: {self.subject}"]
        for c in self.certificates:
            verdict = "pass" if c.passed else "fail"
            line = f"  {c.name}: {verdict}"
            if c.witness:
                line += f" witness={c.witness}"
            lines.append(line)
        for key, value in self.facts.items():
            lines.append(f"  {key}: {value}")
        return "\n".join(lines)
