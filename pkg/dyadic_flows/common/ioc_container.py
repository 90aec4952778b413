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
This module wires the shared services of the package: configuration, logging, a worker pool for batch
verification, and the subshift provider used by the command line and the reports.

The module leverages the dependency_injector package so that the logger and the executor are created once and
reused by every module. Configuration is loaded from config.yaml next to the package and exposed as a plain
dictionary, so tests and the command line can override single keys in place.

Functions:
    provide_logger() -> Logger: Configures and returns the root logger with a stdout handler.
    provide_rng(seed) -> random.Random: Returns a seeded random generator for sampled checks.

Classes:
    Container: A dependency injection container that provides the config, logger, executor and providers.

Usage:
    Container.logger().info(msg="building charts")
    Container.config["samples"]
"""

import logging
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from logging import Logger

from dependency_injector import containers, providers

import dyadic_flows.common.common as common
from dyadic_flows.common.providers import SubshiftProvider

CONFIG_YAML_FILE = os.path.join(os.path.dirname(os.path.realpath(__file__)), "..", "config.yaml")


def provide_logger() -> Logger:
    formatter = logging.Formatter("%(asctime)s: %(levelname)s: %(message)s")
    stdout_handler = logging.StreamHandler(stream=sys.stdout)
    stdout_handler.setFormatter(formatter)

    logger = logging.getLogger()
    logger.setLevel(logging.INFO)
    logger.addHandler(stdout_handler)

    return logger


def provide_rng(seed: int | None = None) -> random.Random:
    """Returns a random generator seeded from the argument or from the configured default seed."""
    if seed is None:
        seed = Container.config.get("seed", 0)
    return random.Random(seed)


class Container(containers.DeclarativeContainer):
    """
    Dependency injection container for the package services.

    Attributes:
        config (dict): Configuration loaded from CONFIG_YAML_FILE.
        logger (Provider): Root logger configured for console output.
        executor (Provider): Thread pool shared by batch verification.
        subshift_provider (Provider): Builds subshifts and orbit schemes from parsed config documents.
    """

    config = common.load_yaml(CONFIG_YAML_FILE)
    logger = providers.Singleton(provide_logger)
    executor = providers.Singleton(ThreadPoolExecutor, max_workers=config.get("max_workers", 4))
    subshift_provider = providers.Singleton(SubshiftProvider)
