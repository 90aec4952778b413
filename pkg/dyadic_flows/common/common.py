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
Shared file helpers for the dyadic_flows package.

Functions:
    load_yaml(file_path) -> dict: Reads a YAML document (package config, subshift configs, atlas files).
    dump_yaml(file_path, data): Writes a YAML document with stable key order.
    read_json(file_path): Reads a JSON document.
    write_json(file_path, data): Writes a JSON document with indentation.
    resource_path(name) -> str: Resolves a shipped resource name such as "xred4" to its YAML path.
"""

import json
import os

import yaml

RESOURCES_DIR = os.path.join(os.path.dirname(os.path.realpath(__file__)), "..", "resources")


def read_json(file_path):
    with open(file_path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_json(file_path, data):
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=4)


def load_yaml(file_path: str) -> dict:
    with open(file_path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def dump_yaml(file_path: str, data) -> None:
    with open(file_path, "w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, sort_keys=False)


def resource_path(name: str) -> str:
    """Resolves a config argument to a file path.

    Existing paths are returned unchanged; bare names (with or without the .yaml/.cfg suffix) are looked up
    in the shipped resources directory.

    Args:
        name (str): A path or a resource name like "xred4" or "xred4.cfg".

    Returns:
        str: Path of the YAML file.

    Raises:
        ValueError: If neither a file nor a shipped resource matches.
    """
    if os.path.isfile(name):
        return name
    stem = os.path.basename(name)
    for suffix in (".yaml", ".cfg", ".yml"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    candidate = os.path.join(RESOURCES_DIR, f"{stem}.yaml")
    if os.path.isfile(candidate):
        return candidate
    raise ValueError(f"No such config file or shipped resource: {name}")
