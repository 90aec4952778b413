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
from unittest.mock import patch

import pytest

from dyadic_flows.common.ioc_container import Container

TEST_CONFIG = {
    "seed": 1234,
    "samples": 24,
    "window": 4,
    "print_system_metrics": False,
    "completeness_depth": 1,
    "completeness_max_sequences": 1,
}


@pytest.fixture(autouse=True, scope="session")
def quiet_container():
    """Pins a small, seeded configuration and silences the container logger for the whole session.

    Sampled checks draw their sample counts and seeds from `Container.config`, so the values in TEST_CONFIG keep
    the suite deterministic and fast. The original values are restored after the session.

    Yields:
        The patched logger mock.
    """
    original = {key: Container.config.get(key) for key in TEST_CONFIG}
    Container.config.update(TEST_CONFIG)
    with patch("dyadic_flows.common.ioc_container.Container.logger") as mock_logger:
        yield mock_logger
    Container.config.update(original)
