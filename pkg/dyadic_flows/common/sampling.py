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
Data-parallel execution of sampled identity checks.

Every sampled check in the package has the same shape: a predicate over one sample that either holds or
produces a witness. `verify_samples` fans the predicate out over the shared thread pool, keeps going when a
single sample raises, and folds the outcomes into one `Certificate` whose witness is the first failing sample
in input order, so results do not depend on scheduling.

Functions:
    verify_samples(name, check, samples, render=str, progress=False) -> Certificate
    sample_many(rng, draw, count) -> list: Draws `count` samples with a seeded generator.
"""

from concurrent.futures import as_completed
from typing import Any, Callable, Iterable, TypeVar

from tqdm import tqdm

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.common.model import Certificate

T = TypeVar("T")


def sample_many(rng, draw: Callable[[Any], T], count: int) -> list[T]:
    return [draw(rng) for _ in range(count)]


def verify_samples(
    name: str,
    check: Callable[[T], bool],
    samples: Iterable[T],
    render: Callable[[T], str] = str,
    progress: bool = False,
) -> Certificate:
    """Runs `check` on every sample concurrently and returns a certificate.

    Args:
        name: Name of the resulting certificate.
        check: Predicate returning True when the identity holds at the sample.
        samples: The sample points.
        render: Formats a failing sample as the witness string.
        progress: Shows a tqdm progress bar over completed samples.

    Returns:
        Certificate: passed when every sample satisfies `check`; otherwise fails with the first failing sample
        (in input order) as witness. A sample whose check raises counts as failing, with the error attached.
    """
    samples = list(samples)
    executor = Container.executor()
    futures = {executor.submit(check, sample): index for index, sample in enumerate(samples)}
    failures: dict[int, str] = {}
    completed = as_completed(futures)
    if progress:
        completed = tqdm(completed, total=len(futures), desc=name)
    for future in completed:
        index = futures[future]
        try:
            if not future.result():
                failures[index] = ""
        except Exception as e:  # pylint: disable=W0718
            failures[index] = f"{type(e).__name__}: {e}"

    if not failures:
        return Certificate(name=name, passed=True, details={"samples": len(samples)})
    first = min(failures)
    Container.logger().warning(msg=f"{name}: {len(failures)} of {len(samples)} samples failed")
    details = {"samples": len(samples), "failures": len(failures)}
    if failures[first]:
        details["error"] = failures[first]
    return Certificate(name=name, passed=False, witness=render(samples[first]), details=details)
