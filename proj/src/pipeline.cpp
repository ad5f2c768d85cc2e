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

#include "seqlr/pipeline.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seqlr/d2s.hpp"
#include "seqlr/hash.hpp"
#include "seqlr/json_io.hpp"
#include "seqlr/manifest.hpp"
#include "seqlr/rng.hpp"

namespace seqlr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

// shortest-lossless double formatting, stable across runs
std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Provenance make_prov(const RunConfig& config, const std::string& stage) {
  return {stage, config.seed, config.config_hash()};
}

void ensure_dir(const std::string& path) { fs::create_directories(path); }

std::string models_dir(const RunConfig& c) { return c.out_dir + "/models"; }
std::string eval_dir(const RunConfig& c) { return c.out_dir + "/eval"; }

struct Splits {
  std::vector<EncodedSequence> train, val_in, val_ood, test_in, test_ood;
};

const std::vector<std::string>& split_names() {
  static const std::vector<std::string> names = {"train", "val_in", "val_ood", "test_in",
                                                 "test_ood"};
  return names;
}

Splits load_splits(const RunConfig& config, const Alphabet& alphabet) {
  Splits s;
  try {
    s.train = read_dataset_jsonl(dataset_path(config, "train"), alphabet);
    s.val_in = read_dataset_jsonl(dataset_path(config, "val_in"), alphabet);
    s.val_ood = read_dataset_jsonl(dataset_path(config, "val_ood"), alphabet);
    s.test_in = read_dataset_jsonl(dataset_path(config, "test_in"), alphabet);
    s.test_ood = read_dataset_jsonl(dataset_path(config, "test_ood"), alphabet);
  } catch (const std::runtime_error& e) {
    throw DataError(std::string("cannot load dataset manifests: ") + e.what());
  }
  if (s.train.empty()) throw DataError("training split is empty");
  return s;
}

bool wants(const std::vector<std::string>& methods, const std::string& name) {
  return std::find(methods.begin(), methods.end(), name) != methods.end();
}

bool wants_prefix(const std::vector<std::string>& methods, const std::string& prefix) {
  for (const auto& m : methods)
    if (m.rfind(prefix, 0) == 0) return true;
  return false;
}

bool any_classifier_method(const std::vector<std::string>& methods) {
  for (const auto& m : methods)
    if (m == "maxprob" || m == "entropy" || m == "odin" || m == "mahalanobis" ||
        m == "calibrated" || m.rfind("ensemble", 0) == 0)
      return true;
  return false;
}

// deterministic dense remap of the (possibly sparse) in-distribution labels
std::map<int, int> label_remap(const std::vector<EncodedSequence>& train) {
  std::set<int> labels;
  for (const auto& s : train) {
    if (!s.class_label) throw DataError("training sequence without class label");
    labels.insert(*s.class_label);
  }
  std::map<int, int> remap;
  int next = 0;
  for (int l : labels) remap[l] = next++;
  return remap;
}

}  // namespace

std::string RunConfig::config_hash() const {
  json canonical = raw;
  canonical.erase("out_dir");  // the output location is not part of the run identity
  std::string dump = canonical.dump();
  dump += "|seed=" + std::to_string(seed);
  return hex64(fnv1a64(dump));
}

std::string dataset_path(const RunConfig& config, const std::string& split) {
  return config.out_dir + "/dataset/" + split + ".jsonl";
}

std::string scores_path(const RunConfig& config) {
  return config.out_dir + "/scores/test_scores.jsonl";
}

RunConfig load_run_config(const std::string& path, std::optional<std::uint64_t> seed_override,
                          std::optional<std::string> out_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("schema_version", -1) != kSchemaVersion)
      throw ConfigError("config schema_version must be " + std::to_string(kSchemaVersion));

    RunConfig config;
    config.raw = j;
    if (!j.contains("seed")) throw ConfigError("config requires a seed");
    config.seed = j.at("seed").get<std::uint64_t>();
    config.out_dir = j.value("out_dir", "run_out");

    const json dataset = j.value("dataset", json::object());
    if (dataset.contains("synthetic") == dataset.contains("fasta"))
      throw ConfigError("config requires exactly one dataset source (synthetic or fasta)");
    if (dataset.contains("synthetic"))
      config.synthetic = synthetic_spec_from_json(dataset.at("synthetic"));
    if (dataset.contains("fasta")) {
      const json& f = dataset.at("fasta");
      FastaIngestSpec spec;
      spec.fragment_length = f.value("fragment_length", 250);
      spec.train_fragments = f.value("train_fragments", 100);
      spec.val_fragments = f.value("val_fragments", 20);
      spec.test_fragments = f.value("test_fragments", 20);
      for (const auto& c : f.value("classes", json::array())) {
        FastaClassSpec cls;
        cls.label = c.at("label");
        cls.role = c.at("role");
        cls.path = c.at("fasta");
        if (cls.role != "in" && cls.role != "val_ood" && cls.role != "test_ood")
          throw ConfigError("fasta class role must be in, val_ood, or test_ood");
        spec.classes.push_back(std::move(cls));
      }
      if (spec.classes.empty()) throw ConfigError("fasta dataset requires classes");
      config.fasta = std::move(spec);
    }

    config.foreground = ar_config_from_json(j.value("foreground", json::object()));
    if (j.contains("background")) {
      const json& b = j.at("background");
      config.background = ar_config_from_json(b);
      // architecture follows the foreground unless overridden
      if (!b.contains("kind")) config.background.kind = config.foreground.kind;
      if (!b.contains("hidden_units"))
        config.background.hidden_units = config.foreground.hidden_units;
      if (!b.contains("ngram_order")) config.background.ngram_order = config.foreground.ngram_order;
      if (!b.contains("ngram_weights"))
        config.background.ngram_weights = config.foreground.ngram_weights;
      if (!b.contains("training")) config.background.training = config.foreground.training;
      PerturbConfig pc = config.background.training.perturbation.value_or(PerturbConfig{});
      if (b.contains("mu")) pc.mutation_rate = b.at("mu").get<double>();
      if (b.contains("semantics"))
        pc = perturb_config_from_json(
            {{"mutation_rate", pc.mutation_rate}, {"semantics", b.at("semantics")}});
      config.background.training.perturbation = pc;
      if (b.contains("lambda")) config.background.training.l2 = b.at("lambda").get<double>();
    } else {
      config.background = config.foreground;
      PerturbConfig pc;
      pc.mutation_rate = 0.1;
      config.background.training.perturbation = pc;
    }
    config.background.alphabet_size = config.foreground.alphabet_size;

    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      config.grid.mus = s.value("mu", std::vector<double>{0.01, 0.05, 0.1, 0.2});
      config.grid.lambdas = s.value("lambda", std::vector<double>{0, 1e-6, 1e-5, 1e-4, 1e-3});
      config.sim_rate = s.value("sim_rate", 0.1);
    } else {
      config.grid.mus = {0.01, 0.05, 0.1, 0.2};
      config.grid.lambdas = {0, 1e-6, 1e-5, 1e-4, 1e-3};
    }

    if (j.contains("classifier"))
      config.classifier = classifier_config_from_json(j.at("classifier"));
    config.classifier.alphabet_size = config.foreground.alphabet_size;
    config.ensemble_sizes = j.value("ensemble_sizes", std::vector<int>{5, 10, 20});
    config.waic_models = j.value("waic_models", 5);
    config.methods = j.value("methods", std::vector<std::string>{"likelihood", "llr"});

    if (j.contains("distance")) {
      const json& d = j.at("distance");
      config.distance.enabled = d.value("enabled", true);
      config.distance.k = d.value("k", 6);
      config.distance.m = d.value("m", 0);
      config.distance.sequences_per_class = d.value("sequences_per_class", 20);
    }

    if (j.contains("eval")) {
      const json& e = j.at("eval");
      config.eval.equal_subsample = e.value("equal_subsample", false);
      config.eval.hist_bins = e.value("hist_bins", 30);
      config.eval.target_tpr = e.value("target_tpr", 0.8);
    }
    config.eval.subsample_seed = config.seed;

    if (seed_override) config.seed = *seed_override;
    if (out_override) config.out_dir = *out_override;
    return config;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

void cmd_synth(const RunConfig& config) {
  if (!config.synthetic) throw ConfigError("synth requires a synthetic dataset config");
  const Alphabet alphabet = Alphabet::dna();
  Rng rng = Rng::derive(config.seed, fnv1a64("synth"));
  DatasetSplit split = synth_generate(*config.synthetic, alphabet, rng);

  ensure_dir(config.out_dir + "/dataset");
  const Provenance prov = make_prov(config, "synth");
  write_dataset_jsonl(dataset_path(config, "train"), split.train, alphabet, prov);
  write_dataset_jsonl(dataset_path(config, "val_in"), split.val_in, alphabet, prov);
  write_dataset_jsonl(dataset_path(config, "val_ood"), split.val_ood, alphabet, prov);
  write_dataset_jsonl(dataset_path(config, "test_in"), split.test_in, alphabet, prov);
  write_dataset_jsonl(dataset_path(config, "test_ood"), split.test_ood, alphabet, prov);
  write_motif_masks(config.out_dir + "/dataset/masks.jsonl", split.motif_masks, prov);
}

void cmd_ingest(const RunConfig& config) {
  if (!config.fasta) throw ConfigError("ingest requires a fasta dataset config");
  const FastaIngestSpec& spec = *config.fasta;
  const Alphabet alphabet = Alphabet::dna();

  std::set<int> in_labels, val_ood_labels, test_ood_labels;
  for (const auto& cls : spec.classes) {
    auto& target = cls.role == "in" ? in_labels
                   : cls.role == "val_ood" ? val_ood_labels
                                           : test_ood_labels;
    target.insert(cls.label);
  }
  for (int l : val_ood_labels)
    if (test_ood_labels.count(l) || in_labels.count(l))
      throw ConfigError("fasta class lists must be disjoint across roles");
  for (int l : test_ood_labels)
    if (in_labels.count(l)) throw ConfigError("fasta class lists must be disjoint across roles");

  DatasetSplit split;
  std::uint64_t stream = 0;
  for (const auto& cls : spec.classes) {
    std::vector<FastaRecord> records;
    try {
      records = parse_fasta_file(cls.path);
    } catch (const std::runtime_error& e) {
      throw DataError(e.what());
    }
    for (const auto& rec : records) {
      Rng rng = Rng::derive(config.seed, fnv1a64("ingest") ^ stream++);
      auto take = [&](int count, Origin origin, const std::string& tag,
                      std::vector<EncodedSequence>& out) {
        if (count <= 0) return;
        std::vector<EncodedSequence> frags;
        try {
          frags = fragment(rec.sequence, spec.fragment_length, count, alphabet, rng);
        } catch (const std::exception& e) {
          throw DataError("fragmenting " + rec.id + ": " + e.what());
        }
        int i = 0;
        for (auto& f : frags) {
          f.id = "c" + std::to_string(cls.label) + "_" + rec.id + "_" + tag + "_" +
                 std::to_string(i++);
          f.class_label = cls.label;
          f.origin = origin;
          out.push_back(std::move(f));
        }
      };
      if (cls.role == "in") {
        take(spec.train_fragments, Origin::kInDistribution, "train", split.train);
        take(spec.val_fragments, Origin::kInDistribution, "val", split.val_in);
        take(spec.test_fragments, Origin::kInDistribution, "test", split.test_in);
      } else if (cls.role == "val_ood") {
        take(spec.val_fragments, Origin::kOod, "val", split.val_ood);
      } else {
        take(spec.test_fragments, Origin::kOod, "test", split.test_ood);
      }
    }
  }
  validate_split(split);

  ensure_dir(config.out_dir + "/dataset");
  const Provenance prov = make_prov(config, "ingest");
  write_dataset_jsonl(dataset_path(config, "train"), split.train, alphabet, prov);
  write_dataset_jsonl(dataset_path(config, "val_in"), split.val_in, alphabet, prov);
  write_dataset_jsonl(dataset_path(config, "val_ood"), split.val_ood, alphabet, prov);
  write_dataset_jsonl(dataset_path(config, "test_in"), split.test_in, alphabet, prov);
  write_dataset_jsonl(dataset_path(config, "test_ood"), split.test_ood, alphabet, prov);
}

void cmd_train(const RunConfig& config) {
  const Alphabet alphabet = Alphabet::dna();
  const Splits splits = load_splits(config, alphabet);
  ensure_dir(models_dir(config));

  ARConfig fg = config.foreground;
  fg.training.perturbation.reset();  // the foreground always trains on clean data
  std::ofstream metrics(models_dir(config) + "/fg_metrics.jsonl");
  metrics << make_prov(config, "train").jsonl_line() << "\n";
  const Checkpoint cp = train_ar(splits.train, fg, alphabet,
                                 Rng::derive(config.seed, fnv1a64("fg")).next_u64(),
                                 &splits.val_in, &metrics);
  save_checkpoint(cp, models_dir(config) + "/fg.ckpt");

  if (wants(config.methods, "waic")) {
    for (int i = 0; i < config.waic_models; ++i) {
      const Checkpoint wcp =
          train_ar(splits.train, fg, alphabet,
                   Rng::derive(config.seed, fnv1a64("waic") ^ static_cast<std::uint64_t>(i))
                       .next_u64());
      save_checkpoint(wcp, models_dir(config) + "/waic_" + std::to_string(i) + ".ckpt");
    }
  }
}

void cmd_train_bg(const RunConfig& config) {
  const Alphabet alphabet = Alphabet::dna();
  const Splits splits = load_splits(config, alphabet);
  ensure_dir(models_dir(config));
  if (!config.background.training.perturbation ||
      config.background.training.perturbation->mutation_rate <= 0.0)
    throw ConfigError("background model requires mutation rate mu > 0");

  std::ofstream metrics(models_dir(config) + "/bg_metrics.jsonl");
  metrics << make_prov(config, "train-bg").jsonl_line() << "\n";
  const Checkpoint cp = train_ar(splits.train, config.background, alphabet,
                                 Rng::derive(config.seed, fnv1a64("bg")).next_u64(),
                                 &splits.val_in, &metrics);
  save_checkpoint(cp, models_dir(config) + "/bg.ckpt");
}

void cmd_train_clf(const RunConfig& config) {
  const Alphabet alphabet = Alphabet::dna();
  const Splits splits = load_splits(config, alphabet);
  ensure_dir(models_dir(config));

  const std::map<int, int> remap = label_remap(splits.train);
  std::vector<int> labels;
  labels.reserve(splits.train.size());
  for (const auto& s : splits.train) labels.push_back(remap.at(*s.class_label));

  ClassifierConfig base = config.classifier;
  base.num_classes = static_cast<int>(remap.size());

  int plain_members = 1;
  for (int n : config.ensemble_sizes)
    if (wants(config.methods, "ensemble" + std::to_string(n)))
      plain_members = std::max(plain_members, n);
  if (wants(config.methods, "waic") && plain_members < 1) plain_members = 1;

  if (any_classifier_method(config.methods) || wants(config.methods, "odin")) {
    ClassifierConfig plain = base;
    plain.variant = ClassifierVariant::kPlain;
    for (int i = 0; i < plain_members; ++i) {
      const Classifier clf =
          train_classifier(splits.train, labels, plain, alphabet,
                           Rng::derive(config.seed, fnv1a64("clf") ^ static_cast<std::uint64_t>(i))
                               .next_u64());
      save_classifier(clf, models_dir(config) + "/clf_" + std::to_string(i) + ".clf");
    }
  }
  const auto train_variant = [&](ClassifierVariant variant, const std::string& name) {
    ClassifierConfig cfg = base;
    cfg.variant = variant;
    if (!cfg.perturbation) {
      PerturbConfig pc = config.background.training.perturbation.value_or(PerturbConfig{});
      if (pc.mutation_rate <= 0.0) pc.mutation_rate = 0.1;
      cfg.perturbation = pc;
    }
    const Classifier clf = train_classifier(
        splits.train, labels, cfg, alphabet,
        Rng::derive(config.seed, fnv1a64(name)).next_u64());
    save_classifier(clf, models_dir(config) + "/clf_" + name + ".clf");
  };
  if (wants(config.methods, "binary")) train_variant(ClassifierVariant::kBinary, "binary");
  if (wants(config.methods, "kplus1")) train_variant(ClassifierVariant::kKPlus1, "kplus1");
  if (wants(config.methods, "calibrated"))
    train_variant(ClassifierVariant::kCalibrated, "calibrated");
}

namespace {

// concatenated class representative for alignment-free distances
EncodedSequence class_representative(const std::vector<EncodedSequence>& seqs, int label,
                                     int max_sequences) {
  std::vector<const EncodedSequence*> members;
  for (const auto& s : seqs)
    if (s.class_label && *s.class_label == label) members.push_back(&s);
  std::sort(members.begin(), members.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });
  EncodedSequence rep;
  rep.id = "class_rep_" + std::to_string(label);
  rep.class_label = label;
  for (std::size_t i = 0; i < members.size() && i < static_cast<std::size_t>(max_sequences); ++i)
    rep.symbols.insert(rep.symbols.end(), members[i]->symbols.begin(),
                       members[i]->symbols.end());
  return rep;
}

std::map<int, double> ood_min_distances(const Splits& splits, const DistanceSpec& spec,
                                        const Alphabet& alphabet) {
  std::set<int> in_labels, ood_labels;
  for (const auto& s : splits.train)
    if (s.class_label) in_labels.insert(*s.class_label);
  for (const auto& s : splits.test_ood)
    if (s.class_label) ood_labels.insert(*s.class_label);

  std::vector<EncodedSequence> in_reps;
  for (int l : in_labels)
    in_reps.push_back(class_representative(splits.train, l, spec.sequences_per_class));

  std::map<int, double> result;
  for (int l : ood_labels) {
    const EncodedSequence rep =
        class_representative(splits.test_ood, l, spec.sequences_per_class);
    result[l] = min_distance_to_set(rep, in_reps, spec.k, spec.m, alphabet);
  }
  return result;
}

struct OdinParams {
  double temperature = 1.0;
  double epsilon = 0.0;
};

OdinParams tune_odin(const Classifier& clf, const Splits& splits) {
  const std::vector<double> temperatures = {1, 5, 10, 100, 1000};
  const std::vector<double> epsilons = {0, 1e-4, 1e-3, 1e-2, 1e-1};
  OdinParams best;
  double best_auroc = -1.0;
  for (double t : temperatures) {
    for (double e : epsilons) {
      std::vector<double> in_scores, ood_scores;
      for (const auto& s : splits.val_in) in_scores.push_back(score_odin(clf, s, t, e));
      for (const auto& s : splits.val_ood) ood_scores.push_back(score_odin(clf, s, t, e));
      const double a = auroc(in_scores, ood_scores);
      if (a > best_auroc) {
        best_auroc = a;
        best = {t, e};
      }
    }
  }
  return best;
}

}  // namespace

void cmd_score(const RunConfig& config, const std::vector<std::string>& requested) {
  const Alphabet alphabet = Alphabet::dna();
  const Splits splits = load_splits(config, alphabet);
  const std::vector<std::string> methods = requested.empty() ? config.methods : requested;

  std::map<int, double> distances;
  if (config.distance.enabled) distances = ood_min_distances(splits, config.distance, alphabet);

  std::vector<ScoreRecord> records;
  auto emit = [&](const EncodedSequence& seq, const std::string& method, double score) {
    if (!std::isfinite(score)) throw NumericError("non-finite score from method " + method);
    ScoreRecord rec;
    rec.id = seq.id;
    rec.origin = seq.origin;
    rec.method = method;
    rec.score = score;
    rec.gc_content = gc_content(seq, alphabet);
    rec.class_label = seq.class_label;
    rec.seed = config.seed;
    if (seq.origin == Origin::kOod && seq.class_label) {
      const auto it = distances.find(*seq.class_label);
      if (it != distances.end()) rec.min_d2s = it->second;
    }
    records.push_back(std::move(rec));
  };
  auto for_each_test = [&](auto&& fn) {
    for (const auto& s : splits.test_in) fn(s);
    for (const auto& s : splits.test_ood) fn(s);
  };
  auto require_file = [&](const std::string& path) {
    if (!fs::exists(path)) throw DataError("missing checkpoint: " + path);
    return path;
  };

  if (wants(methods, "likelihood") || wants(methods, "llr")) {
    const Checkpoint fg = load_checkpoint(require_file(models_dir(config) + "/fg.ckpt"));
    if (wants(methods, "likelihood"))
      for_each_test([&](const EncodedSequence& s) { emit(s, "likelihood", log_likelihood(fg, s)); });
    if (wants(methods, "llr")) {
      LLRScorer scorer{fg, load_checkpoint(require_file(models_dir(config) + "/bg.ckpt"))};
      scorer.validate();
      for_each_test([&](const EncodedSequence& s) { emit(s, "llr", llr_score(scorer, s)); });
    }
  }
  if (wants(methods, "waic")) {
    std::vector<Checkpoint> models;
    for (int i = 0; i < config.waic_models; ++i)
      models.push_back(
          load_checkpoint(require_file(models_dir(config) + "/waic_" + std::to_string(i) + ".ckpt")));
    for_each_test([&](const EncodedSequence& s) { emit(s, "waic", waic_score(models, s)); });
  }

  std::vector<Classifier> plain;
  auto ensure_plain = [&](int count) {
    while (static_cast<int>(plain.size()) < count)
      plain.push_back(load_classifier(require_file(
          models_dir(config) + "/clf_" + std::to_string(plain.size()) + ".clf")));
  };
  if (wants(methods, "maxprob")) {
    ensure_plain(1);
    for_each_test([&](const EncodedSequence& s) { emit(s, "maxprob", score_max_prob(plain[0], s)); });
  }
  if (wants(methods, "entropy")) {
    ensure_plain(1);
    for_each_test(
        [&](const EncodedSequence& s) { emit(s, "entropy", score_neg_entropy(plain[0], s)); });
  }
  if (wants(methods, "odin")) {
    ensure_plain(1);
    const OdinParams params = tune_odin(plain[0], splits);
    for_each_test([&](const EncodedSequence& s) {
      emit(s, "odin", score_odin(plain[0], s, params.temperature, params.epsilon));
    });
  }
  if (wants(methods, "mahalanobis")) {
    ensure_plain(1);
    const std::map<int, int> remap = label_remap(splits.train);
    std::vector<int> labels;
    for (const auto& s : splits.train) labels.push_back(remap.at(*s.class_label));
    const MahalanobisFit fit = fit_mahalanobis(plain[0], splits.train, labels);
    for_each_test([&](const EncodedSequence& s) {
      emit(s, "mahalanobis", score_mahalanobis(fit, plain[0], s));
    });
  }
  if (wants_prefix(methods, "ensemble")) {
    for (int n : config.ensemble_sizes) {
      const std::string name = "ensemble" + std::to_string(n);
      if (!wants(methods, name)) continue;
      ensure_plain(n);
      const std::vector<Classifier> members(plain.begin(), plain.begin() + n);
      for_each_test(
          [&](const EncodedSequence& s) { emit(s, name, ensemble_score(members, s)); });
    }
  }
  if (wants(methods, "binary")) {
    const Classifier clf = load_classifier(require_file(models_dir(config) + "/clf_binary.clf"));
    for_each_test(
        [&](const EncodedSequence& s) { emit(s, "binary", score_binary_logodds(clf, s)); });
  }
  if (wants(methods, "kplus1")) {
    const Classifier clf = load_classifier(require_file(models_dir(config) + "/clf_kplus1.clf"));
    for_each_test([&](const EncodedSequence& s) { emit(s, "kplus1", score_kplus1(clf, s)); });
  }
  if (wants(methods, "calibrated")) {
    const Classifier clf =
        load_classifier(require_file(models_dir(config) + "/clf_calibrated.clf"));
    for_each_test(
        [&](const EncodedSequence& s) { emit(s, "calibrated", score_max_prob(clf, s)); });
  }

  if (records.empty()) throw ConfigError("no known methods requested");
  ensure_dir(config.out_dir + "/scores");
  write_score_records(scores_path(config), records, make_prov(config, "score"));
}

namespace {

void write_sweep_outputs(const RunConfig& config, const SweepResult& result,
                         const std::string& dir, const std::string& stage) {
  ensure_dir(dir);
  const Provenance prov = make_prov(config, stage);
  std::ofstream csv(dir + "/sweep.csv");
  csv << prov.csv_comment() << "\n";
  csv << "mu,lambda,val_auroc,checkpoint_path\n";
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const SweepCell& cell = result.cells[i];
    const std::string ckpt = dir + "/cell_" + std::to_string(i) + ".ckpt";
    save_checkpoint(cell.background, ckpt);
    csv << fmt_double(cell.mu) << "," << fmt_double(cell.lambda) << ","
        << fmt_double(cell.val_auroc) << "," << ckpt << "\n";
  }
  const SweepCell& best = result.best();
  std::ofstream sel(dir + "/selected.json");
  sel << json{{"provenance", {{"stage", stage}, {"seed", config.seed},
                              {"config_hash", config.config_hash()}}},
              {"mu", best.mu},
              {"lambda", best.lambda},
              {"val_auroc", best.val_auroc},
              {"checkpoint_path", dir + "/cell_" + std::to_string(result.selected) + ".ckpt"}}
             .dump(2)
      << "\n";
}

}  // namespace

void cmd_sweep(const RunConfig& config) {
  const Alphabet alphabet = Alphabet::dna();
  const Splits splits = load_splits(config, alphabet);
  if (splits.val_in.empty() || splits.val_ood.empty())
    throw DataError("sweep requires non-empty val_in and val_ood");
  const Checkpoint fg = load_checkpoint(models_dir(config) + "/fg.ckpt");
  const SweepResult result =
      sweep(splits.train, fg, config.grid, splits.val_in, splits.val_ood, config.background,
            alphabet, Rng::derive(config.seed, fnv1a64("sweep")).next_u64());
  write_sweep_outputs(config, result, config.out_dir + "/sweep", "sweep");
}

void cmd_tune_sim(const RunConfig& config) {
  const Alphabet alphabet = Alphabet::dna();
  const Splits splits = load_splits(config, alphabet);
  if (splits.val_in.empty()) throw DataError("tune-sim requires non-empty val_in");
  const Checkpoint fg = load_checkpoint(models_dir(config) + "/fg.ckpt");
  const SweepResult result = simulated_ood_tune(
      splits.train, fg, config.grid, splits.val_in, config.sim_rate, config.background, alphabet,
      Rng::derive(config.seed, fnv1a64("tune-sim")).next_u64());
  write_sweep_outputs(config, result, config.out_dir + "/tune_sim", "tune-sim");
}

void write_eval_report(const EvalReport& report, const std::string& dir, const Provenance& prov,
                       bool plot_tables) {
  ensure_dir(dir);
  {
    std::ofstream csv(dir + "/metrics.csv");
    csv << prov.csv_comment() << "\n";
    csv << "method,auroc,auprc,fpr80,n_in,n_ood,mean,stderr\n";
    for (const auto& m : report.methods)
      csv << m.method << "," << fmt_double(m.auroc) << "," << fmt_double(m.auprc) << ","
          << fmt_double(m.fpr80) << "," << m.n_in << "," << m.n_ood << ","
          << fmt_double(m.auroc_mean) << "," << fmt_double(m.auroc_stderr) << "\n";
  }
  {
    json jm = json::array();
    for (const auto& m : report.methods) {
      json row = {{"method", m.method},   {"auroc", m.auroc},
                  {"auprc", m.auprc},     {"fpr80", m.fpr80},
                  {"n_in", m.n_in},       {"n_ood", m.n_ood},
                  {"auroc_mean", m.auroc_mean}, {"auroc_stderr", m.auroc_stderr}};
      if (m.pcc_score_gc) row["pcc_score_gc"] = *m.pcc_score_gc;
      jm.push_back(row);
    }
    json j = {{"provenance",
               {{"stage", prov.stage}, {"seed", prov.seed}, {"config_hash", prov.config_hash}}},
              {"methods", jm},
              {"class_distance_pcc", report.class_distance_pcc}};
    std::ofstream out(dir + "/report.json");
    out << j.dump(2) << "\n";
  }
  if (!plot_tables) return;
  {
    std::ofstream csv(dir + "/roc_points.csv");
    csv << prov.csv_comment() << "\n" << "method,fpr,tpr\n";
    for (const auto& m : report.methods)
      for (const auto& p : m.roc_points)
        csv << m.method << "," << fmt_double(p.fpr) << "," << fmt_double(p.tpr) << "\n";
  }
  {
    std::ofstream csv(dir + "/pr_points.csv");
    csv << prov.csv_comment() << "\n" << "method,recall,precision\n";
    for (const auto& m : report.methods)
      for (const auto& p : m.pr_points)
        csv << m.method << "," << fmt_double(p.recall) << "," << fmt_double(p.precision)
            << "\n";
  }
  {
    std::ofstream csv(dir + "/hist_bins.csv");
    csv << prov.csv_comment() << "\n" << "method,lo,hi,n_in,n_ood\n";
    for (const auto& m : report.methods)
      for (const auto& b : m.hist_bins)
        csv << m.method << "," << fmt_double(b.lo) << "," << fmt_double(b.hi) << "," << b.n_in
            << "," << b.n_ood << "\n";
  }
  {
    std::ofstream csv(dir + "/class_distance_auroc.csv");
    csv << prov.csv_comment() << "\n" << "method,class,min_d2s,auroc\n";
    for (const auto& row : report.class_distance)
      csv << row.method << "," << row.class_label << "," << fmt_double(row.min_d2s) << ","
          << fmt_double(row.auroc) << "\n";
  }
}

void cmd_eval(const RunConfig& config, const std::string& scores) {
  std::vector<ScoreRecord> records;
  try {
    records = read_score_records(scores.empty() ? scores_path(config) : scores);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
  const EvalReport report = build_report(records, config.eval);
  write_eval_report(report, eval_dir(config), make_prov(config, "eval"), false);
}

void cmd_report(const RunConfig& config, const std::string& scores) {
  std::vector<ScoreRecord> records;
  try {
    records = read_score_records(scores.empty() ? scores_path(config) : scores);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
  const EvalReport report = build_report(records, config.eval);
  write_eval_report(report, eval_dir(config), make_prov(config, "report"), true);
}

}  // namespace seqlr
