// Copyright 2026 The vgskit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vgskit/vgskit.h"

namespace vgs::cli {
namespace {

namespace fs = std::filesystem;

// Carries the process exit code alongside the message.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

void Check(vgs_status status) {
  if (status == VGS_OK) return;
  throw CliError(vgs_status_is_io(status) ? kExitIo : kExitValidation, vgs_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using MatrixHandle = Handle<vgs_matrix, vgs_matrix_free>;
using ManifestHandle = Handle<vgs_manifest, vgs_manifest_free>;
using KMeansHandle = Handle<vgs_kmeans, vgs_kmeans_free>;
using UnitsHandle = Handle<vgs_units, vgs_units_free>;
using RankingHandle = Handle<vgs_ranking, vgs_ranking_free>;
using StoreHandle = Handle<vgs_feature_store, vgs_feature_store_free>;
using AbxHandle = Handle<vgs_abx_report, vgs_abx_report_free>;
using NGramHandle = Handle<vgs_ngram, vgs_ngram_free>;

MatrixHandle ReadMatrix(const std::string& path) {
  vgs_matrix* m = nullptr;
  Check(vgs_matrix_read(path.c_str(), &m));
  return MatrixHandle(m);
}

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

enum class Format { kHuman, kJsonLines };

// One output line: a metric name plus ordered fields.
class Record {
 public:
  explicit Record(std::string metric) : metric_(std::move(metric)) {}

  Record& Str(std::string key, const std::string& v) {
    fields_.push_back({std::move(key), nlohmann::json(v).dump(), v});
    return *this;
  }
  Record& Num(std::string key, double v) {
    const std::string s = FormatNumber(v);
    fields_.push_back({std::move(key), std::isfinite(v) ? s : "null", s});
    return *this;
  }
  Record& Int(std::string key, std::uint64_t v) {
    const std::string s = std::to_string(v);
    fields_.push_back({std::move(key), s, s});
    return *this;
  }

  std::string Render(Format format) const {
    std::string line;
    if (format == Format::kJsonLines) {
      line = "{\"metric\":" + nlohmann::json(metric_).dump();
      for (const auto& f : fields_) line += ",\"" + f.key + "\":" + f.json;
      line += "}";
    } else {
      line = metric_;
      for (const auto& f : fields_) line += " " + f.key + "=" + f.text;
    }
    return line;
  }

 private:
  struct Field {
    std::string key;
    std::string json;
    std::string text;
  };
  std::string metric_;
  std::vector<Field> fields_;
};

struct Globals {
  std::string format = "human";
  std::uint64_t seed = 42;
  std::size_t threads = 0;
};

class Emitter {
 public:
  Emitter(std::ostream& out, const Globals& g)
      : out_(out), format_(g.format == "json-lines" ? Format::kJsonLines : Format::kHuman) {}
  void operator()(const Record& r) { out_ << r.Render(format_) << '\n'; }

 private:
  std::ostream& out_;
  Format format_;
};

struct NamedMatrix {
  std::string id;
  MatrixHandle m;
};

// A single .fvf file, or every .fvf in a directory in name order.
std::vector<NamedMatrix> LoadFeatureInputs(const std::string& path) {
  std::vector<NamedMatrix> out;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".fvf") {
        files.push_back(entry.path());
      }
    }
    if (ec) throw CliError(kExitIo, "cannot list " + path + ": " + ec.message());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw CliError(kExitIo, "no .fvf files in " + path);
    for (const auto& f : files) out.push_back({f.stem().string(), ReadMatrix(f.string())});
  } else {
    out.push_back({fs::path(path).stem().string(), ReadMatrix(path)});
  }
  return out;
}

MatrixHandle Concatenate(const std::vector<NamedMatrix>& parts) {
  const std::size_t cols = vgs_matrix_cols(parts.front().m.get());
  std::vector<float> values;
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (vgs_matrix_cols(p.m.get()) != cols) {
      throw CliError(kExitValidation, "feature '" + p.id + "' has dimension " +
                                          std::to_string(vgs_matrix_cols(p.m.get())) +
                                          ", expected " + std::to_string(cols));
    }
    const std::size_t n = vgs_matrix_rows(p.m.get());
    const float* d = vgs_matrix_data(p.m.get());
    values.insert(values.end(), d, d + n * cols);
    rows += n;
  }
  vgs_matrix* m = nullptr;
  Check(vgs_matrix_create(rows, cols, values.data(), &m));
  return MatrixHandle(m);
}

std::vector<double> MatrixAsDoubles(const vgs_matrix* m) {
  const float* d = vgs_matrix_data(m);
  return std::vector<double>(d, d + vgs_matrix_rows(m) * vgs_matrix_cols(m));
}

std::vector<double> Transpose(const std::vector<double>& v, std::size_t rows,
                              std::size_t cols) {
  std::vector<double> t(v.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = v[r * cols + c];
  }
  return t;
}

// Plain numbers or JSON objects carrying "value" or "pseudo_logprob", one per
// line. Blank lines are skipped.
std::vector<double> ReadScores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitIo, "cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto where = path + ":" + std::to_string(lineno);
    if (line[first] == '{') {
      const auto rec = nlohmann::json::parse(line, nullptr, false);
      if (rec.is_discarded()) throw CliError(kExitIo, where + ": malformed record");
      const char* key = rec.contains("pseudo_logprob") ? "pseudo_logprob" : "value";
      if (!rec.contains(key) || !rec[key].is_number()) {
        throw CliError(kExitIo, where + ": record has no numeric score");
      }
      out.push_back(rec[key].get<double>());
    } else {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(line.substr(first), &used);
      } catch (const std::exception&) {
        throw CliError(kExitIo, where + ": not a number");
      }
      if (line.find_first_not_of(" \t\r", first + used) != std::string::npos) {
        throw CliError(kExitIo, where + ": trailing characters");
      }
      out.push_back(v);
    }
  }
  return out;
}

// ---- Subcommands ---------------------------------------------------------

struct LossCheckArgs {
  std::size_t instances = 100;
  std::size_t max_batch = 8;
  std::size_t max_dim = 16;
  std::size_t max_distractors = 10;
  std::size_t max_groups = 8;
  std::size_t max_entries = 8;
  double eps = 1e-4;
  double tolerance = 1e-5;
};

int LossCheck(const LossCheckArgs& a, const Globals& g, Emitter& emit, std::ostream& err) {
  vgs_gradient_suite_options opts = vgs_default_gradient_suite_options();
  opts.instances = a.instances;
  opts.max_batch = a.max_batch;
  opts.max_dim = a.max_dim;
  opts.max_distractors = a.max_distractors;
  opts.max_groups = a.max_groups;
  opts.max_entries = a.max_entries;
  opts.eps = a.eps;
  opts.seed = g.seed;
  vgs_gradient_suite_result r{};
  Check(vgs_gradient_suite(&opts, &r));
  const std::pair<const char*, double> rows[] = {{"matching", r.matching_max_error},
                                                 {"w2v2", r.w2v2_max_error},
                                                 {"diversity", r.diversity_max_error}};
  bool ok = true;
  for (const auto& [loss, value] : rows) {
    emit(Record("grad_max_rel_error")
             .Str("loss", loss)
             .Int("instances", a.instances)
             .Num("value", value));
    ok = ok && value < a.tolerance;
  }
  if (!ok) {
    err << "error: gradient check exceeded tolerance " << FormatNumber(a.tolerance) << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

struct RetrieveArgs {
  std::string queries;
  std::string targets;
  std::string fine_scores;
  std::string manifest;
  std::size_t kc = 0;
  std::size_t n = 10;
};

int Retrieve(const RetrieveArgs& a, const Globals& g, Emitter& emit) {
  const auto q = ReadMatrix(a.queries);
  const auto t = ReadMatrix(a.targets);
  const auto f = ReadMatrix(a.fine_scores);
  vgs_manifest* raw_manifest = nullptr;
  Check(vgs_manifest_read(a.manifest.c_str(), &raw_manifest));
  const ManifestHandle manifest(raw_manifest);

  const std::size_t nq = vgs_matrix_rows(q.get());
  const std::size_t nt = vgs_matrix_rows(t.get());
  if (nq != vgs_manifest_num_captions(manifest.get()) ||
      nt != vgs_manifest_num_images(manifest.get())) {
    throw CliError(kExitValidation,
                   "queries/targets must have one row per manifest caption/image (" +
                       std::to_string(nq) + "x" + std::to_string(nt) + " vs " +
                       std::to_string(vgs_manifest_num_captions(manifest.get())) + "x" +
                       std::to_string(vgs_manifest_num_images(manifest.get())) + ")");
  }
  if (vgs_matrix_rows(f.get()) != nq || vgs_matrix_cols(f.get()) != nt) {
    throw CliError(kExitValidation, "fine score table must be " + std::to_string(nq) +
                                        "x" + std::to_string(nt));
  }
  const auto table = MatrixAsDoubles(f.get());
  const auto table_t = Transpose(table, nq, nt);

  struct Pass {
    const char* name;
    const vgs_matrix* queries;
    const vgs_matrix* targets;
    const std::vector<double>* table;
    vgs_direction direction;
  };
  const Pass passes[] = {
      {"speech_to_image", q.get(), t.get(), &table, VGS_SPEECH_TO_IMAGE},
      {"image_to_speech", t.get(), q.get(), &table_t, VGS_IMAGE_TO_SPEECH},
  };
  for (const auto& p : passes) {
    vgs_ranking* raw = nullptr;
    std::uint64_t calls = 0;
    Check(vgs_ctf_retrieve_table(p.queries, p.targets, p.table->data(), a.kc, a.n,
                                 g.threads, &raw, &calls));
    const RankingHandle ranking(raw);
    for (std::size_t k : {1, 5, 10}) {
      if (k > a.n) break;
      double recall = 0.0;
      Check(vgs_recall_at_n(ranking.get(), manifest.get(), k, p.direction, &recall));
      emit(Record("recall").Str("direction", p.name).Int("n", k).Num("value", recall));
    }
    emit(Record("fine_calls").Str("direction", p.name).Int("kc", a.kc).Int("value", calls));
  }
  return kExitOk;
}

struct AbxArgs {
  std::string features;
  std::string triplets;
  bool weighted = false;
};

int Abx(const AbxArgs& a, const Globals& g, Emitter& emit) {
  vgs_feature_store* raw_store = nullptr;
  Check(vgs_feature_store_load_dir(a.features.c_str(), 50.0, &raw_store));
  const StoreHandle store(raw_store);
  vgs_abx_report* raw = nullptr;
  Check(vgs_abx_evaluate(store.get(), a.triplets.c_str(), a.weighted ? 1 : 0, g.threads,
                         &raw));
  const AbxHandle report(raw);
  for (std::size_t i = 0; i < vgs_abx_num_groups(report.get()); ++i) {
    emit(Record("abx_error")
             .Str("group", vgs_abx_group_key(report.get(), i))
             .Int("triples", vgs_abx_group_triples(report.get(), i))
             .Num("value", vgs_abx_group_error(report.get(), i)));
  }
  emit(Record("abx_error")
           .Str("group", "overall")
           .Int("triples", vgs_abx_triples(report.get()))
           .Str("aggregation", a.weighted ? "weighted" : "unweighted")
           .Num("value", vgs_abx_overall(report.get())));
  return kExitOk;
}

struct SemanticArgs {
  std::string features;
  std::string judgments;
  std::string pool = "mean";
};

int Semantic(const SemanticArgs& a, const Globals& g, Emitter& emit) {
  vgs_feature_store* raw_store = nullptr;
  Check(vgs_feature_store_load_dir(a.features.c_str(), 50.0, &raw_store));
  const StoreHandle store(raw_store);
  double score = 0.0;
  std::size_t pairs = 0;
  Check(vgs_semantic_score(store.get(), a.judgments.c_str(),
                           a.pool == "max" ? VGS_POOL_MAX : VGS_POOL_MEAN, g.threads,
                           &score, &pairs));
  emit(Record("semantic_score").Str("pool", a.pool).Int("pairs", pairs).Num("value", score));
  return kExitOk;
}

struct KMeansFitArgs {
  std::string features;
  std::size_t k = 50;
  std::size_t max_iters = 100;
  std::string out;
};

int KMeansFit(const KMeansFitArgs& a, const Globals& g, Emitter& emit) {
  const auto parts = LoadFeatureInputs(a.features);
  const auto data = Concatenate(parts);
  vgs_kmeans* raw = nullptr;
  Check(vgs_kmeans_fit(data.get(), a.k, a.max_iters, g.seed, &raw));
  const KMeansHandle model(raw);
  Check(vgs_kmeans_save(model.get(), a.out.c_str()));
  const std::size_t h = vgs_kmeans_history_size(model.get());
  emit(Record("kmeans")
           .Int("k", vgs_kmeans_k(model.get()))
           .Int("dim", vgs_kmeans_dim(model.get()))
           .Int("frames", vgs_matrix_rows(data.get()))
           .Int("iterations", vgs_kmeans_iterations(model.get()))
           .Num("inertia", h ? vgs_kmeans_history(model.get(), h - 1) : 0.0));
  return kExitOk;
}

struct QuantizeArgs {
  std::string model;
  std::string features;
  std::string out;
};

int Quantize(const QuantizeArgs& a, const Globals&, Emitter& emit) {
  vgs_kmeans* raw = nullptr;
  Check(vgs_kmeans_load(a.model.c_str(), &raw));
  const KMeansHandle model(raw);
  const auto parts = LoadFeatureInputs(a.features);
  vgs_units* raw_units = nullptr;
  Check(vgs_units_create(&raw_units));
  const UnitsHandle units(raw_units);
  std::size_t frames = 0;
  for (const auto& p : parts) {
    std::vector<std::uint32_t> u(vgs_matrix_rows(p.m.get()));
    Check(vgs_kmeans_quantize(model.get(), p.m.get(), u.data()));
    Check(vgs_units_append(units.get(), p.id.c_str(), u.data(), u.size()));
    frames += u.size();
  }
  Check(vgs_units_write(units.get(), a.out.c_str()));
  emit(Record("quantize")
           .Int("utterances", parts.size())
           .Int("frames", frames)
           .Int("k", vgs_kmeans_k(model.get())));
  return kExitOk;
}

struct MaskStatsArgs {
  std::vector<std::size_t> lengths{10000};
  double p = 0.065;
  std::size_t span_len = 10;
  std::string mode = "per-utterance";
  std::size_t num_seeds = 100;
};

int MaskStats(const MaskStatsArgs& a, const Globals& g, Emitter& emit) {
  vgs_mask_spec spec = vgs_default_mask_spec();
  spec.p = a.p;
  spec.span_len = a.span_len;
  spec.mode = a.mode == "batch-min-crop" ? VGS_MASK_BATCH_MIN_CROP : VGS_MASK_PER_UTTERANCE;
  spec.seed = g.seed;
  std::vector<double> fractions(a.lengths.size());
  Check(vgs_mean_masked_fraction(a.lengths.data(), a.lengths.size(), &spec, a.num_seeds,
                                 fractions.data()));
  const double expected = 1.0 - std::pow(1.0 - a.p, static_cast<double>(a.span_len));
  for (std::size_t i = 0; i < a.lengths.size(); ++i) {
    emit(Record("masked_fraction")
             .Int("utterance", i)
             .Int("length", a.lengths[i])
             .Str("mode", a.mode)
             .Int("seeds", a.num_seeds)
             .Num("expected", expected)
             .Num("value", fractions[i]));
  }
  return kExitOk;
}

struct LmTrainArgs {
  std::string units;
  std::size_t order = 3;
  double add_k = 0.1;
  std::size_t vocab = 0;
  std::string out;
};

int LmTrain(const LmTrainArgs& a, const Globals&, Emitter& emit) {
  vgs_units* raw_units = nullptr;
  Check(vgs_units_read(a.units.c_str(), &raw_units));
  const UnitsHandle units(raw_units);
  vgs_ngram* raw = nullptr;
  Check(vgs_ngram_train(units.get(), a.order, a.add_k, a.vocab, &raw));
  const NGramHandle lm(raw);
  Check(vgs_ngram_save(lm.get(), a.out.c_str()));
  emit(Record("lm")
           .Int("order", vgs_ngram_order(lm.get()))
           .Int("vocab", vgs_ngram_vocab_size(lm.get()))
           .Int("sequences", vgs_units_count(units.get()))
           .Num("add_k", a.add_k));
  return kExitOk;
}

struct PseudoProbArgs {
  std::string lm;
  std::string units;
  std::size_t repeats = 1;
  double span_mean = 5.0;
  double span_std = 5.0;
  double coverage = 0.5;
};

int PseudoProb(const PseudoProbArgs& a, const Globals& g, Emitter& emit) {
  vgs_ngram* raw = nullptr;
  Check(vgs_ngram_load(a.lm.c_str(), &raw));
  const NGramHandle lm(raw);
  vgs_units* raw_units = nullptr;
  Check(vgs_units_read(a.units.c_str(), &raw_units));
  const UnitsHandle units(raw_units);
  vgs_span_spec spec = vgs_default_span_spec();
  spec.mean = a.span_mean;
  spec.std = a.span_std;
  spec.coverage_target = a.coverage;
  spec.seed = g.seed;
  for (std::size_t i = 0; i < vgs_units_count(units.get()); ++i) {
    double lp = 0.0;
    Check(vgs_pseudo_logprob(lm.get(), vgs_units_data(units.get(), i),
                             vgs_units_length(units.get(), i), &spec, a.repeats, &lp));
    emit(Record("pseudo_logprob")
             .Str("utterance_id", vgs_units_id(units.get(), i))
             .Num("value", lp));
  }
  return kExitOk;
}

struct ScorePairsArgs {
  std::string pos;
  std::string neg;
};

int ScorePairs(const ScorePairsArgs& a, const Globals&, Emitter& emit) {
  const auto pos = ReadScores(a.pos);
  const auto neg = ReadScores(a.neg);
  if (pos.size() != neg.size()) {
    throw CliError(kExitValidation, std::to_string(pos.size()) + " positive vs " +
                                        std::to_string(neg.size()) + " negative scores");
  }
  double acc = 0.0;
  Check(vgs_paired_accuracy(pos.data(), neg.data(), pos.size(), &acc));
  emit(Record("paired_accuracy").Int("pairs", pos.size()).Num("value", acc));
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visually grounded speech toolkit: losses, retrieval and unit evaluation",
               "vgskit"};
  app.set_version_flag("--version", vgs_version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"human", "json-lines"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads, 0 = all cores")
      ->capture_default_str();

  std::function<int(std::ostream&, std::ostream&)> action;
  auto on = [&](CLI::App* sub, auto fn) {
    sub->callback([&action, fn] { action = fn; });
  };

  LossCheckArgs lc;
  auto* loss = app.add_subcommand("loss-check", "Audit loss gradients by finite differences");
  loss->add_option("--instances", lc.instances, "Random instances per loss")->capture_default_str();
  loss->add_option("--max-batch", lc.max_batch, "Largest matching-loss batch")->capture_default_str();
  loss->add_option("--max-dim", lc.max_dim, "Largest contrastive vector size")->capture_default_str();
  loss->add_option("--max-distractors", lc.max_distractors, "Most distractors")->capture_default_str();
  loss->add_option("--max-groups", lc.max_groups, "Most codebook groups")->capture_default_str();
  loss->add_option("--max-entries", lc.max_entries, "Most codebook entries")->capture_default_str();
  loss->add_option("--eps", lc.eps, "Central difference step")->capture_default_str();
  loss->add_option("--tolerance", lc.tolerance, "Largest accepted relative error")->capture_default_str();
  on(loss, [&](std::ostream& o, std::ostream& e) {
    Emitter emit(o, g);
    return LossCheck(lc, g, emit, e);
  });

  RetrieveArgs ra;
  auto* retrieve = app.add_subcommand("retrieve", "Coarse-to-fine retrieval recall");
  retrieve->add_option("--queries", ra.queries, "Caption embeddings (.fvf)")->required();
  retrieve->add_option("--targets", ra.targets, "Image embeddings (.fvf)")->required();
  retrieve->add_option("--fine-scores", ra.fine_scores, "Caption x image fine scores (.fvf)")
      ->required();
  retrieve->add_option("--manifest", ra.manifest, "Caption/image pairs (.jsonl)")->required();
  retrieve->add_option("--kc", ra.kc, "Coarse candidates per query")->required();
  retrieve->add_option("--n", ra.n, "Ranked list length")->capture_default_str();
  on(retrieve, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return Retrieve(ra, g, emit);
  });

  AbxArgs aa;
  auto* abx = app.add_subcommand("abx", "ABX discrimination error");
  abx->add_option("--features", aa.features, "Directory of .fvf files")->required();
  abx->add_option("--triplets", aa.triplets, "Triplet list (.jsonl)")->required();
  abx->add_flag("--weighted", aa.weighted, "Average over triples instead of groups");
  on(abx, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return Abx(aa, g, emit);
  });

  SemanticArgs sa;
  auto* semantic = app.add_subcommand("semantic", "Semantic similarity correlation");
  semantic->add_option("--features", sa.features, "Directory of .fvf files")->required();
  semantic->add_option("--judgments", sa.judgments, "Human judgments (.jsonl)")->required();
  semantic->add_option("--pool", sa.pool, "Temporal pooling")
      ->check(CLI::IsMember({"mean", "max"}))
      ->capture_default_str();
  on(semantic, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return Semantic(sa, g, emit);
  });

  QuantizeArgs qa;
  auto* quantize = app.add_subcommand("quantize", "Map frames to nearest-centroid units");
  quantize->add_option("--model", qa.model, "k-means model (.fvf)")->required();
  quantize->add_option("--features", qa.features, "A .fvf file or a directory of them")
      ->required();
  quantize->add_option("--out", qa.out, "Unit sequences (.jsonl)")->required();
  on(quantize, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return Quantize(qa, g, emit);
  });

  KMeansFitArgs ka;
  auto* kmeans = app.add_subcommand("kmeans-fit", "Fit k-means centroids");
  kmeans->add_option("--features", ka.features, "A .fvf file or a directory of them")
      ->required();
  kmeans->add_option("--k", ka.k, "Number of clusters")->capture_default_str();
  kmeans->add_option("--max-iters", ka.max_iters, "Lloyd iteration cap")->capture_default_str();
  kmeans->add_option("--out", ka.out, "Model path (.fvf, plus .meta)")->required();
  on(kmeans, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return KMeansFit(ka, g, emit);
  });

  MaskStatsArgs ma;
  auto* mask = app.add_subcommand("mask-stats", "Empirical masked fraction of span masks");
  mask->add_option("--lengths", ma.lengths, "Utterance lengths, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  mask->add_option("--p", ma.p, "Span start probability")->capture_default_str();
  mask->add_option("--span-len", ma.span_len, "Span length")->capture_default_str();
  mask->add_option("--mode", ma.mode, "Batch mode")
      ->check(CLI::IsMember({"per-utterance", "batch-min-crop"}))
      ->capture_default_str();
  mask->add_option("--num-seeds", ma.num_seeds, "Seeds averaged")->capture_default_str();
  on(mask, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return MaskStats(ma, g, emit);
  });

  LmTrainArgs la;
  auto* lm_train = app.add_subcommand("lm-train", "Train an n-gram unit language model");
  lm_train->add_option("--units", la.units, "Training unit sequences (.jsonl)")->required();
  lm_train->add_option("--order", la.order, "n-gram order")->capture_default_str();
  lm_train->add_option("--add-k", la.add_k, "Additive smoothing constant")
      ->capture_default_str();
  lm_train->add_option("--vocab", la.vocab, "Vocabulary size, 0 = largest unit + 1")
      ->capture_default_str();
  lm_train->add_option("--out", la.out, "Model path")->required();
  on(lm_train, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return LmTrain(la, g, emit);
  });

  PseudoProbArgs pa;
  auto* pseudo = app.add_subcommand("pseudo-prob", "Span pseudo log-probabilities");
  pseudo->add_option("--lm", pa.lm, "Model from lm-train")->required();
  pseudo->add_option("--units", pa.units, "Unit sequences (.jsonl)")->required();
  pseudo->add_option("--repeats", pa.repeats, "Span draws averaged per utterance")
      ->capture_default_str();
  pseudo->add_option("--span-mean", pa.span_mean, "Mean span length")->capture_default_str();
  pseudo->add_option("--span-std", pa.span_std, "Span length deviation")->capture_default_str();
  pseudo->add_option("--coverage", pa.coverage, "Target union coverage")->capture_default_str();
  on(pseudo, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return PseudoProb(pa, g, emit);
  });

  ScorePairsArgs sp;
  auto* pairs = app.add_subcommand("score-pairs", "Paired accuracy of two score lists");
  pairs->add_option("--pos", sp.pos, "Scores of the preferred items")->required();
  pairs->add_option("--neg", sp.neg, "Scores of the contrasting items")->required();
  on(pairs, [&](std::ostream& o, std::ostream&) {
    Emitter emit(o, g);
    return ScorePairs(sp, g, emit);
  });

  std::vector<const char*> argv{"vgskit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (app.exit(e, out, err) == 0) return kExitOk;
    err << app.help();
    return kExitValidation;
  }

  try {
    return action(out, err);
  } catch (const CliError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace vgs::cli
