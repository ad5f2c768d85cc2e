/*
 * Copyright 2026 The seqlr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SEQLR_JSON_IO_HPP_
#define SEQLR_JSON_IO_HPP_

#include <json.hpp>

#include "seqlr/baselines.hpp"
#include "seqlr/genmodel.hpp"
#include "seqlr/seqdata.hpp"
#include "seqlr/synth.hpp"

namespace seqlr {

nlohmann::json perturb_config_to_json(const PerturbConfig& config);
PerturbConfig perturb_config_from_json(const nlohmann::json& j);

nlohmann::json classifier_config_to_json(const ClassifierConfig& config);
ClassifierConfig classifier_config_from_json(const nlohmann::json& j);

nlohmann::json ar_config_to_json(const ARConfig& config);
ARConfig ar_config_from_json(const nlohmann::json& j);

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

}  // namespace seqlr

#endif  // SEQLR_JSON_IO_HPP_
