# Copyright 2026 The nbuplift Authors.
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

"""Uplift curve confidence bands from two-step samples."""

from ._nbuplift import (
    ArgumentError,
    ConfigurationError,
    ConsistencyError,
    Error,
    EstimationError,
    SchemaError,
    default_percentiles,
    equal_sub_sizes,
    estimate_bands,
    generate_population,
    hypergeom_cdf,
    hypergeom_logpmf,
    hypergeom_sf,
    inclusion_prob_multi,
    inclusion_prob_single,
    inclusion_probabilities,
    two_step_sample,
    uplift_curve,
)

__all__ = [
    "ArgumentError",
    "ConfigurationError",
    "ConsistencyError",
    "Error",
    "EstimationError",
    "SchemaError",
    "default_percentiles",
    "equal_sub_sizes",
    "estimate_bands",
    "generate_population",
    "hypergeom_cdf",
    "hypergeom_logpmf",
    "hypergeom_sf",
    "inclusion_prob_multi",
    "inclusion_prob_single",
    "inclusion_probabilities",
    "two_step_sample",
    "uplift_curve",
]
