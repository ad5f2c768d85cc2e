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

#include "seqlr/json_io.hpp"

#include <stdexcept>

namespace seqlr {

using nlohmann::json;

json perturb_config_to_json(const PerturbConfig& config) {
  return {{"mutation_rate", config.mutation_rate},
          {"semantics", config.semantics == PerturbSemantics::kFullAlphabet
                            ? "full_alphabet"
                            : "other_symbols"}};
}

PerturbConfig perturb_config_from_json(const json& j) {
  PerturbConfig config;
  config.mutation_rate = j.at("mutation_rate");
  const std::string sem = j.value("semantics", "full_alphabet");
  if (sem == "full_alphabet") config.semantics = PerturbSemantics::kFullAlphabet;
  else if (sem == "other_symbols") config.semantics = PerturbSemantics::kOtherSymbols;
  else throw std::invalid_argument("unknown perturbation semantics: " + sem);
  return config;
}

json ar_config_to_json(const ARConfig& config) {
  json training = {
      {"steps", config.training.steps},
      {"batch_size", config.training.batch_size},
      {"learning_rate", config.training.learning_rate},
      {"beta1", config.training.beta1},
      {"beta2", config.training.beta2},
      {"epsilon", config.training.epsilon},
      {"l2", config.training.l2},
      {"log_every", config.training.log_every},
  };
  if (config.training.perturbation)
    training["perturbation"] = perturb_config_to_json(*config.training.perturbation);
  return {
      {"kind", model_kind_to_string(config.kind)},
      {"alphabet_size", config.alphabet_size},
      {"hidden_units", config.hidden_units},
      {"ngram_order", config.ngram_order},
      {"ngram_weights", config.ngram_weights},
      {"training", training},
  };
}

ARConfig ar_config_from_json(const json& j) {
  ARConfig config;
  config.kind = model_kind_from_string(j.value("kind", "lstm"));
  config.alphabet_size = j.value("alphabet_size", 4);
  config.hidden_units = j.value("hidden_units", 128);
  config.ngram_order = j.value("ngram_order", 4);
  config.ngram_weights = j.value("ngram_weights", std::vector<double>{});
  if (j.contains("training")) {
    const json& t = j.at("training");
    config.training.steps = t.value("steps", config.training.steps);
    config.training.batch_size = t.value("batch_size", config.training.batch_size);
    config.training.learning_rate = t.value("learning_rate", config.training.learning_rate);
    config.training.beta1 = t.value("beta1", config.training.beta1);
    config.training.beta2 = t.value("beta2", config.training.beta2);
    config.training.epsilon = t.value("epsilon", config.training.epsilon);
    config.training.l2 = t.value("l2", config.training.l2);
    config.training.log_every = t.value("log_every", config.training.log_every);
    if (t.contains("perturbation"))
      config.training.perturbation = perturb_config_from_json(t.at("perturbation"));
  }
  if (config.hidden_units < 1) throw std::invalid_argument("hidden_units must be >= 1");
  if (config.ngram_order < 1) throw std::invalid_argument("ngram_order must be >= 1");
  if (config.training.l2 < 0.0) throw std::invalid_argument("l2 must be >= 0");
  return config;
}

namespace {

std::string variant_to_string(ClassifierVariant v) {
  switch (v) {
    case ClassifierVariant::kPlain: return "plain";
    case ClassifierVariant::kBinary: return "binary";
    case ClassifierVariant::kKPlus1: return "kplus1";
    case ClassifierVariant::kCalibrated: return "calibrated";
  }
  return "plain";
}

ClassifierVariant variant_from_string(const std::string& name) {
  if (name == "plain") return ClassifierVariant::kPlain;
  if (name == "binary") return ClassifierVariant::kBinary;
  if (name == "kplus1") return ClassifierVariant::kKPlus1;
  if (name == "calibrated") return ClassifierVariant::kCalibrated;
  throw std::invalid_argument("unknown classifier variant: " + name);
}

}  // namespace

json classifier_config_to_json(const ClassifierConfig& config) {
  json j = {
      {"num_classes", config.num_classes},
      {"filters", config.filters},
      {"filter_width", config.filter_width},
      {"dense_width", config.dense_width},
      {"steps", config.steps},
      {"batch_size", config.batch_size},
      {"learning_rate", config.learning_rate},
      {"beta1", config.beta1},
      {"beta2", config.beta2},
      {"epsilon", config.epsilon},
      {"l2", config.l2},
      {"variant", variant_to_string(config.variant)},
      {"calibration_weight", config.calibration_weight},
      {"alphabet_size", config.alphabet_size},
  };
  if (config.perturbation) j["perturbation"] = perturb_config_to_json(*config.perturbation);
  return j;
}

ClassifierConfig classifier_config_from_json(const json& j) {
  ClassifierConfig config;
  config.num_classes = j.value("num_classes", 2);
  config.filters = j.value("filters", config.filters);
  config.filter_width = j.value("filter_width", config.filter_width);
  config.dense_width = j.value("dense_width", config.dense_width);
  config.steps = j.value("steps", config.steps);
  config.batch_size = j.value("batch_size", config.batch_size);
  config.learning_rate = j.value("learning_rate", config.learning_rate);
  config.beta1 = j.value("beta1", config.beta1);
  config.beta2 = j.value("beta2", config.beta2);
  config.epsilon = j.value("epsilon", config.epsilon);
  config.l2 = j.value("l2", config.l2);
  config.variant = variant_from_string(j.value("variant", "plain"));
  config.calibration_weight = j.value("calibration_weight", 1.0);
  config.alphabet_size = j.value("alphabet_size", 4);
  if (j.contains("perturbation"))
    config.perturbation = perturb_config_from_json(j.at("perturbation"));
  return config;
}

namespace {

json class_to_json(const SyntheticClass& cls) {
  return {{"label", cls.label},
          {"gc_target", cls.gc_target},
          {"motifs", cls.motifs},
          {"planting_rate", cls.planting_rate}};
}

SyntheticClass class_from_json(const json& j) {
  SyntheticClass cls;
  cls.label = j.at("label");
  cls.gc_target = j.at("gc_target");
  cls.motifs = j.value("motifs", std::vector<std::string>{});
  cls.planting_rate = j.value("planting_rate", 1.0);
  return cls;
}

}  // namespace

json synthetic_spec_to_json(const SyntheticSpec& spec) {
  json in = json::array(), val_ood = json::array(), test_ood = json::array();
  for (const auto& c : spec.in_classes) in.push_back(class_to_json(c));
  for (const auto& c : spec.val_ood_classes) val_ood.push_back(class_to_json(c));
  for (const auto& c : spec.test_ood_classes) test_ood.push_back(class_to_json(c));
  return {
      {"in_classes", in},
      {"val_ood_classes", val_ood},
      {"test_ood_classes", test_ood},
      {"sequence_length", spec.sequence_length},
      {"train_per_class", spec.train_per_class},
      {"val_per_class", spec.val_per_class},
      {"test_per_class", spec.test_per_class},
  };
}

SyntheticSpec synthetic_spec_from_json(const json& j) {
  SyntheticSpec spec;
  for (const auto& c : j.at("in_classes")) spec.in_classes.push_back(class_from_json(c));
  for (const auto& c : j.value("val_ood_classes", json::array()))
    spec.val_ood_classes.push_back(class_from_json(c));
  for (const auto& c : j.value("test_ood_classes", json::array()))
    spec.test_ood_classes.push_back(class_from_json(c));
  spec.sequence_length = j.value("sequence_length", 250);
  spec.train_per_class = j.value("train_per_class", 0);
  spec.val_per_class = j.value("val_per_class", 0);
  spec.test_per_class = j.value("test_per_class", 0);
  return spec;
}

}  // namespace seqlr
