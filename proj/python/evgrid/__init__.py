# Copyright 2026 The evgrid Authors
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
"""Evidential top-view grid mapping."""

from ._core import (
    Config,
    ConfigError,
    FormatError,
    GridMap,
    GridSpec,
    PipelineError,
    Scene,
    config_keys,
    confusion_rates,
    default_config,
    evaluate_sequence,
    label_names,
    load_config,
    load_grid_map,
    load_scene,
    map_range_image,
    mass_from_log,
    not_relevant,
    parse_config,
    parse_scene,
    pignistic,
    render_frame,
    run_pipeline,
    save_grid_map,
    validate_bba,
)

__all__ = [name for name in dir() if not name.startswith("_")]
