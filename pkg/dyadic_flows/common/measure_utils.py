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
"""This module provides a decorator for timing the expensive constructions and logging their duration."""

import functools
from timeit import default_timer

from dyadic_flows.common.ioc_container import Container


def trace_on(msg: str, measure_time: bool = False):
    """Decorates a function so that a message is logged after it runs, optionally with its wall time.

    Logging only happens when `print_system_metrics` is set in the container configuration, so the decorator
    is free to put on hot paths such as chart decomposition or fragmentation.

    Args:
        msg: The message to log after the decorated function returns.
        measure_time: Whether to append the elapsed time to the message. Defaults to False.

    Returns:
        A decorator preserving the wrapped function's name and docstring.

    Example:
        @trace_on("Chart decomposition", measure_time=True)
        def chart_decomposition(sft):
            ...
    """

    def decorator(function):
        @functools.wraps(function)
        def traced(*args, **kwargs):
            start = default_timer()
            result = function(*args, **kwargs)
            end = default_timer()

            output_msg = msg
            if measure_time:
                output_msg = f"{output_msg} took {end - start} seconds"

            if Container.config.get("print_system_metrics"):
                Container.logger().info(msg=output_msg)
            return result

        return traced

    return decorator
