// Copyright 2026 The Forge Authors
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

#include "forge/pipeline.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "forge/accounts.h"
#include "forge/agreement.h"
#include "forge/errors.h"
#include "forge/metrics.h"
#include "forge/random.h"
#include "forge/rounds.h"
#include "forge/sampler.h"

namespace forge {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out)) {
    throw InvalidArgument(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw InvalidArgument(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt_double(v[i]);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

struct Field {
  const char* key;
  void (*set)(PipelineConfig&, const std::string& key, const std::string& value);
  std::string (*get)(const PipelineConfig&);
};

#define FORGE_INT_FIELD(name, member, type)                                               \
  Field {                                                                                 \
    name, [](PipelineConfig& c, const std::string& k, const std::string& v) {             \
      c.member = parse_integer<type>(k, v);                                               \
    },                                                                                    \
        [](const PipelineConfig& c) { return std::to_string(c.member); }                  \
  }
#define FORGE_DOUBLE_FIELD(name, member)                                                  \
  Field {                                                                                 \
    name, [](PipelineConfig& c, const std::string& k, const std::string& v) {             \
      c.member = parse_double(k, v);                                                      \
    },                                                                                    \
        [](const PipelineConfig& c) { return fmt_double(c.member); }                      \
  }
#define FORGE_STRING_FIELD(name, member)                                                  \
  Field {                                                                                 \
    name, [](PipelineConfig& c, const std::string&, const std::string& v) { c.member = v; }, \
        [](const PipelineConfig& c) { return std::string(c.member); }                     \
  }
#define FORGE_DOUBLES_FIELD(name, member)                                                  \
  Field {                                                                                  \
    name, [](PipelineConfig& c, const std::string& k, const std::string& v) {              \
      c.member.clear();                                                                    \
      for (const auto& item : split_list(v)) c.member.push_back(parse_double(k, item));    \
    },                                                                                     \
        [](const PipelineConfig& c) { return join_doubles(c.member); }                     \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      Field{"work_dir",
            [](PipelineConfig& c, const std::string&, const std::string& v) { c.work_dir = v; },
            [](const PipelineConfig& c) { return c.work_dir.string(); }},
      Field{"seed",
            [](PipelineConfig& c, const std::string& k, const std::string& v) {
              c.seed = parse_integer<std::uint64_t>(k, v);
              c.has_seed = true;
            },
            [](const PipelineConfig& c) { return std::to_string(c.seed); }},
      FORGE_STRING_FIELD("input", input),
      Field{"simulate",
            [](PipelineConfig& c, const std::string& k, const std::string& v) {
              c.simulate = parse_bool(k, v);
            },
            [](const PipelineConfig& c) { return std::string(c.simulate ? "true" : "false"); }},
      FORGE_STRING_FIELD("slang", slang_file),
      FORGE_STRING_FIELD("c0_rules", c0_rules_file),
      FORGE_STRING_FIELD("c4_rules", c4_rules_file),
      FORGE_STRING_FIELD("hashtags", hashtags_file),
      FORGE_INT_FIELD("min_tokens", min_tokens, int),
      FORGE_INT_FIELD("max_n", max_n, int),
      FORGE_INT_FIELD("min_df", min_df, int),
      FORGE_INT_FIELD("annotators", annotators, int),
      FORGE_INT_FIELD("unanimity", unanimity, int),
      FORGE_INT_FIELD("majority", majority, int),
      FORGE_INT_FIELD("hit.subset_size", subset_size, std::size_t),
      FORGE_INT_FIELD("hit.duplicates", n_dups, std::size_t),
      FORGE_INT_FIELD("r1.size", r1_size, std::size_t),
      FORGE_INT_FIELD("r2.type1", r2_type1, std::size_t),
      FORGE_INT_FIELD("r2.type2", r2_type2, std::size_t),
      FORGE_DOUBLE_FIELD("r2.percentile", r2_percentile),
      FORGE_DOUBLE_FIELD("r2.band_fraction", r2_band_fraction),
      FORGE_INT_FIELD("validation.per_model", validation_per_model, std::size_t),
      FORGE_INT_FIELD("r4.size", r4_size, std::size_t),
      FORGE_INT_FIELD("cv.k", cv_k, int),
      FORGE_DOUBLES_FIELD("grid.c", grid_c),
      FORGE_DOUBLES_FIELD("grid.class_weight_pos", grid_pos),
      FORGE_DOUBLES_FIELD("grid.class_weight_neg", grid_neg),
      FORGE_INT_FIELD("svm.epochs", svm_epochs, int),
      FORGE_DOUBLE_FIELD("svm.tolerance", svm_tolerance),
      Field{"experts",
            [](PipelineConfig& c, const std::string&, const std::string& v) {
              c.experts = split_list(v);
            },
            [](const PipelineConfig& c) { return join(c.experts); }},
      FORGE_INT_FIELD("sim.corpus_size", synthetic.corpus_size, std::size_t),
      FORGE_DOUBLE_FIELD("sim.job_fraction", synthetic.job_fraction),
      FORGE_DOUBLE_FIELD("sim.confounder_rate", synthetic.confounder_rate),
      FORGE_DOUBLE_FIELD("sim.recruit_fraction", synthetic.recruit_fraction),
      FORGE_DOUBLE_FIELD("sim.short_rate", synthetic.short_rate),
      FORGE_DOUBLE_FIELD("sim.accuracy", sim_accuracy),
      FORGE_DOUBLE_FIELD("sim.careless_rate", sim_careless_rate),
      FORGE_INT_FIELD("sim.pool_size", sim_pool_size, std::size_t),
      FORGE_DOUBLE_FIELD("sim.expert_accuracy", sim_expert_accuracy),
  };
  return f;
}

#undef FORGE_INT_FIELD
#undef FORGE_DOUBLE_FIELD
#undef FORGE_STRING_FIELD
#undef FORGE_DOUBLES_FIELD

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string hash_text(std::string_view s) { return hex64(fnv1a64(s)); }

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NotFound("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so a crash never leaves a half-written artifact.
void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

std::vector<std::string> id_list(const json& j) {
  return j.get<std::vector<std::string>>();
}

json eval_json(const EvalReport& r) {
  auto cls = [](const ClassMetrics& m) {
    return json{{"name", m.name},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"support", m.support}};
  };
  json classes = json::array();
  for (const auto& c : r.classes) classes.push_back(cls(c));
  return json{{"classes", classes}, {"weighted", cls(r.weighted)}};
}

json agreement_json(const std::vector<RatingMatrix>& hits, AgreementStatistic stat) {
  try {
    auto s = round_summary(hits, stat);
    return json{{"statistic", statistic_name(stat)},
                {"mean", s.mean},
                {"stdev", s.stdev},
                {"band", band_name(s.band)},
                {"hits", s.per_hit_values.size()},
                {"undefined_hits", s.undefined_hits}};
  } catch (const UndefinedStatistic& e) {
    return json{{"statistic", statistic_name(stat)}, {"undefined", true}, {"reason", e.what()}};
  }
}

json counts_json(const LabelCounts& c) {
  return json{{"positive", c.positive}, {"negative", c.negative}, {"na", c.na}};
}


const std::vector<std::string> kEvaluated = {"c0", "c1", "c2", "c3", "c5"};
const std::vector<std::string> kValidated = {"c0", "c1", "c2", "c3"};
const std::vector<std::string> kAnnotationRounds = {"r1", "r2", "validation", "r4"};

}  // namespace

// --- config ---------------------------------------------------------------

PipelineConfig PipelineConfig::parse(std::istream& in) {
  PipelineConfig cfg;
  std::set<std::string> seen;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    // Whitespace then '#' starts a trailing comment; a '#' glued to a
    // value (a path, say) is kept.
    for (std::size_t i = 1; i < line.size(); ++i) {
      if (line[i] == '#' && std::isspace(static_cast<unsigned char>(line[i - 1]))) {
        line = trim(line.substr(0, i));
        break;
      }
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& f = fields();
    auto it = std::find_if(f.begin(), f.end(), [&](const Field& x) { return key == x.key; });
    if (it == f.end()) throw ParseError(lineno, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ParseError(lineno, "duplicate key '" + key + "'");
    try {
      it->set(cfg, key, value);
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open config " + path);
  PipelineConfig cfg = parse(in);
  // Relative paths are relative to the config file.
  const fs::path base = fs::absolute(path).parent_path();
  auto rebase = [&](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  if (!cfg.work_dir.empty() && cfg.work_dir.is_relative()) {
    cfg.work_dir = (base / cfg.work_dir).lexically_normal();
  }
  rebase(cfg.input);
  rebase(cfg.slang_file);
  rebase(cfg.c0_rules_file);
  rebase(cfg.c4_rules_file);
  rebase(cfg.hashtags_file);
  return cfg;
}

void PipelineConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument("config: " + what);
  };
  need(!work_dir.empty(), "work_dir is required");
  need(has_seed, "seed is required");
  need(simulate || !input.empty(), "input is required unless simulate = true");
  need(min_tokens >= 0, "min_tokens must be >= 0");
  need(max_n >= 1, "max_n must be >= 1");
  need(min_df >= 1, "min_df must be >= 1");
  need(annotators >= 1 && annotators % 2 == 1, "annotators must be a positive odd number");
  need(unanimity >= 1 && unanimity <= annotators, "unanimity must be in [1, annotators]");
  need(2 * majority > annotators && majority <= annotators,
       "majority must be more than half of annotators and at most annotators");
  need(subset_size >= 1, "hit.subset_size must be >= 1");
  need(r2_percentile > 0 && r2_percentile < 1, "r2.percentile must be in (0, 1)");
  need(r2_band_fraction > 0 && r2_band_fraction < 1, "r2.band_fraction must be in (0, 1)");
  need(cv_k >= 2, "cv.k must be >= 2");
  need(!grid_c.empty() && !grid_pos.empty() && !grid_neg.empty(), "grid lists must be non-empty");
  for (double v : grid_c) need(v > 0, "grid.c values must be > 0");
  for (double v : grid_pos) need(v > 0, "grid.class_weight_pos values must be > 0");
  for (double v : grid_neg) need(v > 0, "grid.class_weight_neg values must be > 0");
  need(svm_epochs >= 1, "svm.epochs must be >= 1");
  need(svm_tolerance > 0, "svm.tolerance must be > 0");
  need(!experts.empty(), "experts must name at least one expert");
  if (simulate) {
    need(synthetic.corpus_size >= 1, "sim.corpus_size must be >= 1");
    need(synthetic.job_fraction > 0 && synthetic.job_fraction < 1,
         "sim.job_fraction must be in (0, 1)");
    need(sim_accuracy > 0.5 && sim_accuracy <= 1, "sim.accuracy must be in (0.5, 1]");
    need(sim_careless_rate >= 0 && sim_careless_rate <= 1, "sim.careless_rate must be in [0, 1]");
    need(sim_pool_size >= static_cast<std::size_t>(annotators),
         "sim.pool_size must be at least annotators");
    need(sim_expert_accuracy >= 0 && sim_expert_accuracy <= 1,
         "sim.expert_accuracy must be in [0, 1]");
  }
}

std::string PipelineConfig::canonical() const {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += '=';
    out += f.get(*this);
    out += '\n';
  }
  return out;
}

std::vector<GridCell> PipelineConfig::grid() const {
  std::vector<GridCell> out;
  for (double c : grid_c) {
    for (double p : grid_pos) {
      for (double n : grid_neg) out.push_back({c, p, n});
    }
  }
  return out;
}

TrainConfig PipelineConfig::train_base() const {
  TrainConfig t;
  t.epochs = svm_epochs;
  t.tolerance = svm_tolerance;
  t.seed = derive_seed(seed, "svm");
  return t;
}

const std::vector<std::string>& stage_order() {
  static const std::vector<std::string> kOrder = {
      "ingest", "c0", "r1", "c1", "r2", "c2", "r3",
      "c3", "validation", "c4", "r4", "c5", "accounts", "export"};
  return kOrder;
}

const std::vector<std::string>& stage_prerequisites(const std::string& stage) {
  static const std::map<std::string, std::vector<std::string>> kPrereq = [] {
    std::map<std::string, std::vector<std::string>> m;
    const auto& order = stage_order();
    for (std::size_t i = 0; i < order.size(); ++i) {
      m[order[i]] = std::vector<std::string>(order.begin(), order.begin() + i);
    }
    return m;
  }();
  auto it = kPrereq.find(stage);
  if (it == kPrereq.end()) throw InvalidArgument("unknown stage '" + stage + "'");
  return it->second;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DependencyError*>(&e)) return 2;
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const ConflictError*>(&e)) {
    return 3;
  }
  return 1;
}

// --- pipeline -------------------------------------------------------------

struct Pipeline::Cache {
  std::optional<SlangDictionary> slang;
  std::optional<LexiconRuleSet> c0, c4;
  std::optional<RecruitmentPattern> pattern;
  std::optional<std::vector<Tweet>> tweets;
  std::map<std::string, std::size_t> tweet_index;
  std::map<std::string, NormalizedDoc> docs;
  std::optional<GroundTruth> truth;
  std::map<std::string, LinearModel> models;
  std::map<std::string, std::map<std::string, Label>> predictions;
};

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)), cache_(std::make_unique<Cache>()) {
  cfg_.validate();
  fs::create_directories(cfg_.work_dir);
  store_ = std::make_unique<Store>(cfg_.work_dir / "store");
}

Pipeline::~Pipeline() = default;

fs::path Pipeline::artifact_path(const std::string& stage) const {
  return cfg_.work_dir / "artifacts" / (stage + ".json");
}

fs::path Pipeline::manifest_path(const std::string& stage) const {
  return cfg_.work_dir / "manifests" / (stage + ".json");
}

fs::path Pipeline::model_path(const std::string& name) const {
  return cfg_.work_dir / "models" / (name + ".model");
}

bool Pipeline::completed(const std::string& stage) const {
  return fs::exists(manifest_path(stage));
}

json Pipeline::artifact(const std::string& stage) const {
  const auto p = artifact_path(stage);
  if (!fs::exists(p)) throw DependencyError(stage, "stage " + stage + " has not run");
  return json::parse(read_text(p));
}

std::string Pipeline::extra_inputs(const std::string& stage) const {
  // The annotations a stage reads; new imports change its input hash.
  static const std::map<std::string, std::vector<std::string>> kReads = {
      {"c1", {"r1"}},         {"c2", {"r1", "r2"}},         {"r3", {"r1", "r2"}},
      {"c3", {"r1", "r2"}},   {"c5", {"r1", "r2", "r4"}},  {"accounts", {"validation"}},
      {"export", {"r1", "r2", "r4", "validation"}},
  };
  std::string out;
  auto it = kReads.find(stage);
  if (it != kReads.end()) {
    for (const auto& rid : it->second) {
      out += "responses " + rid + "\n";
      for (const auto& r : store_->responses(rid)) {
        out += r.worker_id + '\t' + r.item_id + '\t' + std::string(answer_name(r.answer)) + '\n';
      }
    }
  }
  if (stage == "c3" || stage == "c5" || stage == "export") {
    out += "adjudications r3\n";
    for (const auto& a : store_->adjudications("r3")) {
      out += a.tweet_id + '\t' + a.expert_id + '\t' + std::string(label_name(a.final_label)) + '\n';
    }
  }
  return out;
}

StageReport Pipeline::run_stage(const std::string& stage) {
  const auto& prereq = stage_prerequisites(stage);
  for (const auto& dep : prereq) {
    if (!completed(dep)) {
      throw DependencyError(dep, "stage " + stage + " needs stage " + dep + " to run first");
    }
  }
  json inputs;
  inputs["config"] = hash_text(cfg_.canonical());
  if (!prereq.empty()) {
    const auto upstream = json::parse(read_text(manifest_path(prereq.back())));
    inputs["upstream"] = upstream.at("output_hash");
  }
  inputs["annotations"] = hash_text(extra_inputs(stage));
  const std::string input_hash = hash_text(inputs.dump());

  const auto mpath = manifest_path(stage);
  if (fs::exists(mpath)) {
    const auto m = json::parse(read_text(mpath));
    if (m.at("input_hash") == input_hash) return {stage, true, artifact(stage)};
    throw ConflictError("stage " + stage +
                        " already ran with different inputs; its store writes are append-only, "
                        "so start again in a fresh work_dir");
  }
  const fs::path marker = cfg_.work_dir / "manifests" / (stage + ".started");
  if (fs::exists(marker)) {
    throw ConflictError("stage " + stage +
                        " was interrupted after it began writing; start again in a fresh work_dir");
  }
  write_text(marker, input_hash + "\n");

  json out;
  try {
    if (stage == "ingest") out = stage_ingest();
    else if (stage == "c0") out = stage_c0();
    else if (stage == "r1") out = stage_r1();
    else if (stage == "c1") out = stage_c1();
    else if (stage == "r2") out = stage_r2();
    else if (stage == "c2") out = stage_c2();
    else if (stage == "r3") out = stage_r3();
    else if (stage == "c3") out = stage_c3();
    else if (stage == "validation") out = stage_validation();
    else if (stage == "c4") out = stage_c4();
    else if (stage == "r4") out = stage_r4();
    else if (stage == "c5") out = stage_c5();
    else if (stage == "accounts") out = stage_accounts();
    else out = stage_export();
  } catch (...) {
    fs::remove(marker);
    throw;
  }
  const std::string body = out.dump(1) + "\n";
  write_text(artifact_path(stage), body);
  json manifest{{"stage", stage},
                {"input_hash", input_hash},
                {"inputs", inputs},
                {"output_hash", hash_text(body)}};
  write_text(mpath, manifest.dump(1) + "\n");
  fs::remove(marker);
  return {stage, false, out};
}

json Pipeline::run_all(const std::function<void(const StageReport&)>& progress) {
  for (const auto& s : stage_order()) {
    auto r = run_stage(s);
    if (progress) progress(r);
  }
  return report();
}

// --- shared helpers -------------------------------------------------------

const SlangDictionary& Pipeline::slang() {
  if (!cache_->slang) {
    cache_->slang = cfg_.slang_file.empty() ? SlangDictionary::builtin()
                                            : SlangDictionary::load(cfg_.slang_file);
  }
  return *cache_->slang;
}

const std::vector<Tweet>& Pipeline::tweets() {
  if (!cache_->tweets) {
    cache_->tweets = store_->tweets();
    for (std::size_t i = 0; i < cache_->tweets->size(); ++i) {
      cache_->tweet_index[(*cache_->tweets)[i].tweet_id] = i;
    }
  }
  return *cache_->tweets;
}

const NormalizedDoc& Pipeline::doc(const std::string& tweet_id) {
  auto it = cache_->docs.find(tweet_id);
  if (it != cache_->docs.end()) return it->second;
  const auto& all = tweets();
  auto idx = cache_->tweet_index.find(tweet_id);
  if (idx == cache_->tweet_index.end()) throw NotFound("unknown tweet " + tweet_id);
  return cache_->docs.emplace(tweet_id, normalize(all[idx->second], slang())).first->second;
}

const GroundTruth& Pipeline::truth() {
  if (!cache_->truth) {
    if (!cfg_.simulate) throw InvalidArgument("ground truth exists only for simulated runs");
    cache_->truth = read_truth((cfg_.work_dir / "truth.jsonl").string());
  }
  return *cache_->truth;
}

const LinearModel& Pipeline::model(const std::string& name) {
  auto it = cache_->models.find(name);
  if (it != cache_->models.end()) return it->second;
  const auto p = model_path(name);
  if (!fs::exists(p)) throw DependencyError(name, "model " + name + " has not been trained");
  return cache_->models.emplace(name, load_model_file(p.string())).first->second;
}

AnnotatorPool Pipeline::pool() const {
  return AnnotatorPool::make(cfg_.sim_pool_size, cfg_.sim_accuracy, cfg_.sim_careless_rate,
                             derive_seed(cfg_.seed, "crowd"));
}

const std::map<std::string, Label>& Pipeline::corpus_predictions(const std::string& name) {
  auto it = cache_->predictions.find(name);
  if (it != cache_->predictions.end()) return it->second;
  std::map<std::string, Label> out;
  if (name == "c0") {
    const auto ids = id_list(artifact("c0").at("job_likely"));
    const std::set<std::string> likely(ids.begin(), ids.end());
    for (const auto& t : tweets()) {
      out[t.tweet_id] = likely.count(t.tweet_id) ? Label::kJob : Label::kNotJob;
    }
  } else {
    const auto& m = model(name);
    for (const auto& t : tweets()) out[t.tweet_id] = predict(m, doc(t.tweet_id)).label;
  }
  return cache_->predictions.emplace(name, std::move(out)).first->second;
}

AggregateResult Pipeline::aggregate_round(const std::string& round_id) const {
  const auto hits = store_->hits(round_id);
  if (hits.empty()) throw DependencyError(round_id, "round " + round_id + " has no HITs");
  const auto responses = store_->responses(round_id);
  const auto screening = screen_workers(responses, hits);
  return aggregate(responses, hits, screening, cfg_.annotators);
}

std::vector<AggregatedLabel> Pipeline::unanimous(const AggregateResult& r) const {
  std::vector<AggregatedLabel> out;
  for (const auto& l : r.labels) {
    if (l.y >= cfg_.unanimity || l.n >= cfg_.unanimity) out.push_back(l);
  }
  return out;
}

std::map<std::string, Label> Pipeline::references(const std::string& round_id) const {
  std::map<std::string, Label> out;
  for (const auto& l : aggregate_round(round_id).labels) {
    if (l.y >= cfg_.majority) out[l.tweet_id] = Label::kJob;
    else if (l.n >= cfg_.majority) out[l.tweet_id] = Label::kNotJob;
  }
  return out;
}

AdjudicationBook Pipeline::adjudication_book() const {
  const auto info = store_->round("r3");
  if (!info) throw DependencyError("r3", "adjudication round r3 does not exist");
  std::vector<AggregatedLabel> crowd;
  for (const auto& item : info->queue) {
    AggregatedLabel l;
    l.tweet_id = item.tweet_id;
    l.y = item.y;
    l.n = item.n;
    l.consensus = item.y > item.n ? Consensus::kMajorityJob : Consensus::kMajorityNotJob;
    l.needs_adjudication = true;
    crowd.push_back(l);
  }
  AdjudicationBook book(info->experts, crowd);
  for (const auto& a : store_->adjudications("r3")) book.record(a.tweet_id, a.expert_id, a.final_label);
  return book;
}

std::map<std::string, Label> Pipeline::gold_labels(bool with_r4) const {
  std::map<std::string, Label> gold;
  std::vector<std::string> rounds = {"r1", "r2"};
  if (with_r4) rounds.push_back("r4");
  for (const auto& rid : rounds) {
    for (const auto& l : unanimous(aggregate_round(rid))) gold[l.tweet_id] = l.majority_label();
  }
  for (const auto& [id, label] : adjudication_book().resolved()) gold[id] = label;
  return gold;
}

json Pipeline::publish_round(const std::string& round_id, const std::vector<std::string>& ids) {
  if (ids.empty()) throw InvalidArgument("round " + round_id + " sampled no tweets");
  std::vector<Tweet> batch;
  batch.reserve(ids.size());
  for (const auto& id : ids) {
    auto t = store_->tweet(id);
    if (!t) throw NotFound("unknown tweet " + id);
    batch.push_back(std::move(*t));
  }
  auto hits = build_hits(round_id, batch, cfg_.subset_size, cfg_.n_dups,
                         derive_seed(cfg_.seed, round_id + "/hits"));
  store_->consume(ids, round_id);
  RoundInfo info;
  info.round_id = round_id;
  info.kind = RoundKind::kAnnotation;
  info.workers_per_hit = cfg_.annotators;
  store_->put_round(info);
  store_->add_hits(hits);
  json a{{"round", round_id}, {"tweets", ids}, {"hits", hits.size()}};
  if (cfg_.simulate) {
    const auto s = simulate_round(*store_, round_id, truth().topic, pool(), cfg_.annotators,
                                  derive_seed(cfg_.seed, round_id + "/crowd"));
    a["simulation"] = {{"responses", s.responses},
                       {"worker_hits", s.worker_hits},
                       {"rejected_pairs", s.rejected_pairs},
                       {"unfilled_hits", s.unfilled_hits}};
  }
  return a;
}

json Pipeline::train_labeler(const std::string& name,
                             const std::vector<std::pair<std::string, Label>>& rows) {
  std::vector<NormalizedDoc> docs;
  std::vector<Label> y;
  std::size_t n_job = 0;
  for (const auto& [id, label] : rows) {
    docs.push_back(doc(id));
    y.push_back(label);
    if (label == Label::kJob) ++n_job;
  }
  const std::size_t n_notjob = rows.size() - n_job;
  const auto k = static_cast<std::size_t>(cfg_.cv_k);
  if (n_job < k || n_notjob < k) {
    throw InvalidArgument("training set for " + name + " has " + std::to_string(n_job) +
                          " job and " + std::to_string(n_notjob) +
                          " notjob examples; cross-validation needs at least cv.k of each");
  }
  const Vocabulary vocab = build_vocab(docs, cfg_.max_n, cfg_.min_df);
  const auto x = vectorize_all(docs, vocab, cfg_.max_n);
  const auto cv = grid_search_cv(x, y, vocab.size(), cfg_.grid(), cfg_.cv_k, cfg_.train_base());
  LinearModel m = fit(docs, y, cv.best, cfg_.max_n, cfg_.min_df);
  const auto path = model_path(name);
  fs::create_directories(path.parent_path());
  save_model_file(m, path.string());
  cache_->models[name] = std::move(m);
  cache_->predictions.erase(name);

  json cells = json::array();
  for (const auto& c : cv.cells) {
    cells.push_back({{"c", c.cell.c},
                     {"class_weight_pos", c.cell.class_weight_pos},
                     {"class_weight_neg", c.cell.class_weight_neg},
                     {"mean_f1", c.mean_f1}});
  }
  return json{{"model", "models/" + name + ".model"},
              {"model_hash", hash_text(read_text(path))},
              {"training", {{"size", rows.size()}, {"job", n_job}, {"notjob", n_notjob}}},
              {"vocabulary", vocab.size()},
              {"cv",
               {{"k", cfg_.cv_k},
                {"cells", cells},
                {"best_index", cv.best_index},
                {"best",
                 {{"c", cv.best.c},
                  {"class_weight_pos", cv.best.class_weight_pos},
                  {"class_weight_neg", cv.best.class_weight_neg},
                  {"mean_f1", cv.cells.at(cv.best_index).mean_f1}}}}}};
}

// --- stages ---------------------------------------------------------------

json Pipeline::stage_ingest() {
  json a;
  if (cfg_.simulate) {
    SyntheticConfig sc = cfg_.synthetic;
    sc.seed = derive_seed(cfg_.seed, "corpus");
    auto corpus = generate_synthetic_corpus(sc);
    write_truth(corpus.truth, (cfg_.work_dir / "truth.jsonl").string());
    const std::size_t added = store_->add_tweets(corpus.tweets);
    std::size_t jobs = 0, confounders = 0, business = 0;
    for (const auto& [id, l] : corpus.truth.topic) jobs += l == Label::kJob;
    for (const auto& [id, c] : corpus.truth.confounder) confounders += c;
    for (const auto& [id, s] : corpus.truth.account) business += s == Source::kBusiness;
    a = {{"source", "synthetic"},
         {"generated", corpus.tweets.size()},
         {"accepted", added},
         {"truth",
          {{"job", jobs},
           {"confounders", confounders},
           {"accounts", corpus.truth.account.size()},
           {"business_accounts", business}}}};
  } else {
    const auto r = store_->ingest_file(cfg_.input);
    json errors = json::array();
    for (std::size_t i = 0; i < r.errors.size() && i < 50; ++i) {
      errors.push_back({{"line", r.errors[i].line}, {"message", r.errors[i].message}});
    }
    a = {{"source", cfg_.input},
         {"accepted", r.accepted},
         {"duplicates", r.duplicates},
         {"rejected", r.errors.size()},
         {"errors", errors}};
  }
  cache_->tweets.reset();
  a["corpus_size"] = store_->tweet_count();
  if (store_->tweet_count() == 0) throw InvalidArgument("no tweets were ingested");
  return a;
}

json Pipeline::stage_c0() {
  const LexiconRuleSet& rules = cfg_.c0_rules_file.empty()
                                    ? c0_ruleset()
                                    : *(cache_->c0 = load_rules(cfg_.c0_rules_file));
  const auto likely = job_likely_filter(tweets(), rules, cfg_.min_tokens, slang());
  std::vector<std::string> ids(likely.begin(), likely.end());
  std::sort(ids.begin(), ids.end(), id_less);
  json a{{"rules", rules.name}, {"count", ids.size()}, {"job_likely", ids}};
  if (cfg_.simulate) {
    std::size_t job = 0, confounders = 0;
    for (const auto& id : ids) {
      job += truth().topic.at(id) == Label::kJob;
      auto c = truth().confounder.find(id);
      confounders += c != truth().confounder.end() && c->second;
    }
    a["truth"] = {{"job", job}, {"notjob", ids.size() - job}, {"confounders", confounders}};
  }
  return a;
}

json Pipeline::stage_r1() {
  const auto likely = id_list(artifact("c0").at("job_likely"));
  const auto ids =
      sample_ids(likely, cfg_.r1_size, derive_seed(cfg_.seed, "r1"), store_->ledger());
  json a = publish_round("r1", ids);
  a["requested"] = cfg_.r1_size;
  return a;
}

json Pipeline::stage_c1() {
  const auto part1 = unanimous(aggregate_round("r1"));
  if (part1.empty()) {
    throw DependencyError("r1", "round r1 has no unanimous labels yet; import its responses first");
  }
  std::vector<std::pair<std::string, Label>> rows;
  std::size_t n_job = 0;
  for (const auto& l : part1) {
    rows.emplace_back(l.tweet_id, l.majority_label());
    n_job += l.majority_label() == Label::kJob;
  }
  const std::size_t n_notjob = part1.size() - n_job;
  // Random tweets from outside the job-likely set balance the classes.
  const std::size_t k = n_job > n_notjob ? n_job - n_notjob : 0;
  const auto likely_ids = id_list(artifact("c0").at("job_likely"));
  const std::set<std::string> likely(likely_ids.begin(), likely_ids.end());
  const auto negatives = sample_random_negatives(store_->tweet_ids(), likely, k,
                                                 derive_seed(cfg_.seed, "c1/negatives"),
                                                 store_->ledger());
  for (const auto& id : negatives) rows.emplace_back(id, Label::kNotJob);
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return id_less(a.first, b.first); });

  json a = train_labeler("c1", rows);
  store_->consume(negatives, "c1-negatives");
  a["part1"] = {{"job", n_job}, {"notjob", n_notjob}};
  a["random_negatives"] = negatives;
  return a;
}

json Pipeline::stage_r2() {
  const auto& m = model("c1");
  const auto ledger = store_->ledger();
  std::vector<ScoredId> scored;
  for (const auto& t : tweets()) {
    if (ledger.contains(t.tweet_id)) continue;
    scored.push_back({t.tweet_id, predict(m, doc(t.tweet_id)).confidence});
  }
  const auto ranked = decision_rank(std::move(scored));
  SampleSpec s1{Strategy::kType1, cfg_.r2_type1, cfg_.r2_percentile, cfg_.r2_band_fraction,
                derive_seed(cfg_.seed, "r2/type1")};
  const auto type1 = sample_type1(ranked.positive, s1, ledger);
  UsageLedger with_type1 = ledger;
  with_type1.consume(type1, "r2");
  SampleSpec s2{Strategy::kType2, cfg_.r2_type2, cfg_.r2_percentile, cfg_.r2_band_fraction,
                derive_seed(cfg_.seed, "r2/type2")};
  const auto type2 = sample_type2(ranked.positive, ranked.negative, s2, with_type1);

  std::vector<std::string> ids = type1;
  ids.insert(ids.end(), type2.begin(), type2.end());
  json a = publish_round("r2", ids);
  std::vector<double> conf;
  for (const auto& s : ranked.positive) conf.push_back(s.confidence);
  a["pool"] = {{"predicted_job", ranked.positive.size()},
               {"predicted_notjob", ranked.negative.size()}};
  if (!conf.empty()) a["type1_threshold"] = quantile_threshold(conf, cfg_.r2_percentile);
  a["requested"] = {{"type1", cfg_.r2_type1}, {"type2", cfg_.r2_type2}};
  a["type1"] = type1;
  a["type2"] = type2;
  return a;
}

json Pipeline::stage_c2() {
  std::map<std::string, Label> gold;
  std::size_t part2_job = 0, part2_notjob = 0;
  for (const auto& l : unanimous(aggregate_round("r1"))) gold[l.tweet_id] = l.majority_label();
  const auto part2 = unanimous(aggregate_round("r2"));
  if (part2.empty()) {
    throw DependencyError("r2", "round r2 has no unanimous labels yet; import its responses first");
  }
  for (const auto& l : part2) {
    gold[l.tweet_id] = l.majority_label();
    (l.majority_label() == Label::kJob ? part2_job : part2_notjob)++;
  }
  std::vector<std::pair<std::string, Label>> rows(gold.begin(), gold.end());
  json a = train_labeler("c2", rows);
  a["part2"] = {{"job", part2_job}, {"notjob", part2_notjob}};
  return a;
}

json Pipeline::stage_r3() {
  std::vector<AggregatedLabel> disputed;
  for (const auto& rid : {"r1", "r2"}) {
    for (auto l : aggregate_round(rid).labels) {
      if (l.y >= cfg_.unanimity || l.n >= cfg_.unanimity) continue;
      l.needs_adjudication = true;
      disputed.push_back(l);
    }
  }
  std::map<std::string, const AggregatedLabel*> by_id;
  for (const auto& l : disputed) by_id[l.tweet_id] = &l;
  const auto order = adjudication_queue(disputed);

  RoundInfo info;
  info.round_id = "r3";
  info.kind = RoundKind::kAdjudication;
  info.workers_per_hit = 1;
  info.experts = cfg_.experts;
  char buf[32];
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "r3-a%04zu", i + 1);
    const auto* l = by_id.at(order[i]);
    info.queue.push_back({buf, l->tweet_id, l->y, l->n});
  }
  store_->put_round(info);

  json a{{"queue", order}, {"experts", cfg_.experts}};
  if (cfg_.simulate) {
    std::size_t recorded = 0;
    for (const auto& e : cfg_.experts) {
      SimulatedExpert expert{e, cfg_.sim_expert_accuracy, derive_seed(cfg_.seed, "expert/" + e)};
      for (const auto& id : order) {
        store_->record_adjudication("r3", {id, e, expert.label(id, truth().topic.at(id))});
        ++recorded;
      }
    }
    a["simulation"] = {{"labels", recorded}};
  }
  return a;
}

json Pipeline::stage_c3() {
  const auto book = adjudication_book();
  if (!book.queue().empty() && book.log().empty()) {
    throw DependencyError("r3", "no expert labels recorded for r3 yet");
  }
  const auto resolved = book.resolved();
  std::size_t job = 0, corrected = 0;
  for (const auto& [id, label] : resolved) {
    job += label == Label::kJob;
    if (label != book.crowd(id)->majority_label()) ++corrected;
  }
  std::map<std::string, Label> gold;
  for (const auto& rid : {"r1", "r2"}) {
    for (const auto& l : unanimous(aggregate_round(rid))) gold[l.tweet_id] = l.majority_label();
  }
  for (const auto& [id, label] : resolved) gold[id] = label;
  std::vector<std::pair<std::string, Label>> rows(gold.begin(), gold.end());
  json a = train_labeler("c3", rows);

  // Agreement between the first two experts on the tweets both labeled.
  json kappa = nullptr;
  if (book.experts().size() >= 2) {
    std::map<std::string, std::map<std::string, Label>> per;
    for (const auto& entry : book.log()) per[entry.tweet_id][entry.expert_id] = entry.final_label;
    std::vector<int> x, y;
    for (const auto& [id, m] : per) {
      auto a1 = m.find(book.experts()[0]);
      auto a2 = m.find(book.experts()[1]);
      if (a1 == m.end() || a2 == m.end()) continue;
      x.push_back(static_cast<int>(a1->second));
      y.push_back(static_cast<int>(a2->second));
    }
    try {
      kappa = {{"value", cohen_kappa(x, y)}, {"items", x.size()}};
    } catch (const Error& e) {
      kappa = {{"undefined", true}, {"reason", e.what()}, {"items", x.size()}};
    }
  }
  a["part3"] = {{"queue", book.queue().size()},
                {"resolved", resolved.size()},
                {"job", job},
                {"notjob", resolved.size() - job},
                {"unresolved", book.unresolved()},
                {"corrected_crowd_majority", corrected}};
  a["expert_kappa"] = kappa;
  return a;
}

json Pipeline::stage_validation() {
  UsageLedger used = store_->ledger();
  json samples = json::object();
  std::vector<std::string> all;
  const std::size_t want_pos = (cfg_.validation_per_model + 1) / 2;
  const std::size_t want_neg = cfg_.validation_per_model / 2;
  for (const auto& name : kValidated) {
    const auto& preds = corpus_predictions(name);
    std::vector<std::string> pos, neg;
    for (const auto& [id, label] : preds) (label == Label::kJob ? pos : neg).push_back(id);
    pos = sample_ids(pos, pos.size(), derive_seed(cfg_.seed, "validation/" + name + "/job"), used);
    neg = sample_ids(neg, neg.size(), derive_seed(cfg_.seed, "validation/" + name + "/notjob"), used);
    std::size_t take_pos = std::min(want_pos, pos.size());
    std::size_t take_neg = std::min(want_neg, neg.size());
    // A short side is filled from the other.
    if (take_pos < want_pos) take_neg = std::min(neg.size(), take_neg + (want_pos - take_pos));
    if (take_neg < want_neg) take_pos = std::min(pos.size(), take_pos + (want_neg - take_neg));
    std::vector<std::string> pick(pos.begin(), pos.begin() + take_pos);
    pick.insert(pick.end(), neg.begin(), neg.begin() + take_neg);
    used.consume(pick, "validation");
    samples[name] = {{"tweets", pick}, {"predicted_job", take_pos}, {"predicted_notjob", take_neg}};
    all.insert(all.end(), pick.begin(), pick.end());
  }
  json a = publish_round("validation", all);
  a["samples"] = samples;
  return a;
}

json Pipeline::stage_c4() {
  const LexiconRuleSet& rules = cfg_.c4_rules_file.empty()
                                    ? c4_ruleset()
                                    : *(cache_->c4 = load_rules(cfg_.c4_rules_file));
  const auto matched = job_likely_filter(tweets(), rules, cfg_.min_tokens, slang());
  std::vector<std::string> ids(matched.begin(), matched.end());
  std::sort(ids.begin(), ids.end(), id_less);
  const auto ledger = store_->ledger();
  const auto unused = std::count_if(ids.begin(), ids.end(),
                                    [&](const std::string& id) { return !ledger.contains(id); });
  json a{{"rules", rules.name}, {"count", ids.size()}, {"unused", unused}, {"matched", ids}};
  if (cfg_.simulate) {
    std::size_t job = 0;
    for (const auto& id : ids) job += truth().topic.at(id) == Label::kJob;
    a["truth"] = {{"job", job}, {"notjob", ids.size() - job}};
  }
  return a;
}

json Pipeline::stage_r4() {
  const auto matched = id_list(artifact("c4").at("matched"));
  const auto ids =
      sample_rule_pool(matched, cfg_.r4_size, derive_seed(cfg_.seed, "r4"), store_->ledger());
  json a = publish_round("r4", ids);
  a["requested"] = cfg_.r4_size;
  return a;
}

json Pipeline::stage_c5() {
  const auto part4 = unanimous(aggregate_round("r4"));
  std::size_t job = 0;
  for (const auto& l : part4) job += l.majority_label() == Label::kJob;
  const auto gold = gold_labels(true);
  std::vector<std::pair<std::string, Label>> rows(gold.begin(), gold.end());
  json a = train_labeler("c5", rows);
  a["part4"] = {{"job", job}, {"notjob", part4.size() - job}};
  return a;
}

json Pipeline::stage_accounts() {
  const RecruitmentPattern& pattern =
      cfg_.hashtags_file.empty() ? RecruitmentPattern::builtin()
                                 : *(cache_->pattern = RecruitmentPattern::load(cfg_.hashtags_file));
  const auto& preds = corpus_predictions("c5");
  std::vector<std::pair<Tweet, Label>> labeled;
  for (const auto& t : tweets()) labeled.emplace_back(t, preds.at(t.tweet_id));
  const auto profiles = classify_accounts(labeled, pattern);
  std::vector<std::string> business;
  for (const auto& [id, p] : profiles) {
    if (p.kind == Source::kBusiness) business.push_back(id);
  }

  json a{{"accounts", profiles.size()},
         {"business_accounts", business},
         {"personal", profiles.size() - business.size()}};

  // Human source labels for the validation tweets the crowd called job.
  json human = json::object();
  if (cfg_.simulate) {
    const auto refs = references("validation");
    const auto workers = pool().workers;
    std::vector<Source> machine, reference;
    for (const auto& [id, label] : refs) {
      if (label != Label::kJob) continue;
      const auto& t = tweets()[cache_->tweet_index.at(id)];
      Rng rng(derive_seed(cfg_.seed, "source/" + id));
      const auto panel = rng.sample(workers, static_cast<std::size_t>(cfg_.annotators));
      const Source s = simulated_source_vote(panel, id, truth().account.at(t.account_id));
      human[id] = source_name(s);
      machine.push_back(profiles.at(t.account_id).kind);
      reference.push_back(s);
    }
    if (!machine.empty()) a["evaluation"] = eval_json(eval_sources(machine, reference));
    // Account-level check against the generator's truth.
    std::vector<Source> m2, r2;
    for (const auto& [id, p] : profiles) {
      m2.push_back(p.kind);
      r2.push_back(truth().account.at(id));
    }
    a["truth_evaluation"] = eval_json(eval_sources(m2, r2));
  }
  a["source_human"] = human;

  json census = json::array();
  for (const auto& row : hashtag_census(tweets(), pattern)) {
    census.push_back({{"hashtag", row.hashtag},
                      {"with_hashtag", row.with_hashtag},
                      {"with_hashtag_and_url", row.with_hashtag_and_url},
                      {"percent", row.percent}});
  }
  a["census"] = census;
  return a;
}

json Pipeline::stage_export() {
  auto human = gold_labels(true);
  for (const auto& [id, label] : references("validation")) human.emplace(id, label);
  const auto acc = artifact("accounts");
  const auto business_ids = id_list(acc.at("business_accounts"));
  const std::set<std::string> business(business_ids.begin(), business_ids.end());
  const auto& source_human = acc.at("source_human");
  const auto& preds = corpus_predictions("c5");

  std::vector<CorpusRecord> records;
  for (const auto& t : tweets()) {
    CorpusRecord r;
    r.tweet_id = t.tweet_id;
    if (auto it = human.find(t.tweet_id); it != human.end()) r.topic_human = it->second;
    r.topic_machine = preds.at(t.tweet_id);
    if (source_human.contains(t.tweet_id)) {
      r.source_human = source_from_string(source_human.at(t.tweet_id).get<std::string>());
    }
    r.source_machine = business.count(t.account_id) ? Source::kBusiness : Source::kPersonal;
    records.push_back(r);
  }
  store_->put_records(records);
  std::ostringstream out;
  export_release(records, out, true);
  write_text(cfg_.work_dir / "release.jsonl", out.str());
  const auto stats = corpus_stats(records);
  return json{{"records", records.size()},
              {"release", "release.jsonl"},
              {"release_hash", hash_text(out.str())},
              {"stats",
               {{"topic_human", counts_json(stats.topic_human)},
                {"topic_machine", counts_json(stats.topic_machine)},
                {"source_human", counts_json(stats.source_human)},
                {"source_machine", counts_json(stats.source_machine)}}}};
}

// --- report ---------------------------------------------------------------

json Pipeline::report() {
  if (!completed("export")) throw DependencyError("export", "the report needs a finished run");
  json r;
  const auto ingest = artifact("ingest");
  const auto c0 = artifact("c0");
  const auto c4 = artifact("c4");
  r["corpus"] = {{"tweets", ingest.at("corpus_size")},
                 {"job_likely", c0.at("count")},
                 {"c4_matched", c4.at("count")},
                 {"simulated", cfg_.simulate}};
  if (cfg_.simulate) r["corpus"]["truth"] = ingest.at("truth");

  // Rounds: consensus mix and agreement.
  json rounds = json::object();
  std::map<std::string, std::set<std::string>> annotated;
  for (const auto& rid : kAnnotationRounds) {
    const auto hits = store_->hits(rid);
    const auto responses = store_->responses(rid);
    const auto screening = screen_workers(responses, hits);
    const auto agg = aggregate(responses, hits, screening, cfg_.annotators);
    std::map<std::string, std::size_t> mix;
    for (const auto& l : agg.labels) mix[std::string(consensus_name(l.consensus))]++;
    const auto matrices = hit_rating_matrices(responses, hits, screening);
    for (const auto& h : hits) {
      for (const auto& item : h.items) annotated[rid].insert(item.tweet_id);
    }
    rounds[rid] = {{"hits", hits.size()},
                   {"tweets", annotated[rid].size()},
                   {"responses", responses.size()},
                   {"valid_worker_hits", screening.valid.size()},
                   {"rejected_worker_hits", screening.rejected.size()},
                   {"consensus", mix},
                   {"short_staffed", agg.short_staffed.size()},
                   {"fleiss_kappa", agreement_json(matrices, AgreementStatistic::kFleissKappa)},
                   {"krippendorff_alpha",
                    agreement_json(matrices, AgreementStatistic::kKrippendorffAlpha)}};
  }
  r["rounds"] = rounds;

  const auto c3 = artifact("c3");
  r["adjudication"] = {{"queue", c3.at("part3").at("queue")},
                       {"resolved", c3.at("part3").at("resolved")},
                       {"unresolved", c3.at("part3").at("unresolved").size()},
                       {"corrected_crowd_majority", c3.at("part3").at("corrected_crowd_majority")},
                       {"expert_kappa", c3.at("expert_kappa")}};

  json training = json::object();
  for (const auto& m : {"c1", "c2", "c3", "c5"}) {
    const auto a = artifact(m);
    training[m] = {{"training", a.at("training")}, {"best", a.at("cv").at("best")}};
  }
  training["c1"]["random_negatives"] = artifact("c1").at("random_negatives").size();
  r["training"] = training;

  // Validation: every model on the union of the per-model samples.
  const auto refs = references("validation");
  std::vector<std::string> test_ids;
  for (const auto& [id, l] : refs) test_ids.push_back(id);
  std::vector<Label> crowd;
  for (const auto& id : test_ids) crowd.push_back(refs.at(id));
  const auto val = artifact("validation");
  r["test_set"] = {{"tweets", val.at("tweets").size()},
                   {"with_reference", test_ids.size()},
                   {"majority", cfg_.majority}};

  json evaluation = json::object();
  json effective = json::object();
  for (const auto& name : kEvaluated) {
    const auto& preds = corpus_predictions(name);
    std::vector<Label> p;
    for (const auto& id : test_ids) p.push_back(preds.at(id));
    const auto vs_crowd = eval_report(p, crowd);
    evaluation[name]["crowd"] = eval_json(vs_crowd);

    EffectiveRecallInputs in;
    for (const auto& [id, l] : preds) (l == Label::kJob ? in.corpus_job : in.corpus_notjob) += 1;
    for (const auto& l : p) in.test_job += l == Label::kJob;
    in.test_notjob = static_cast<double>(p.size()) - in.test_job;
    in.test_recall = vs_crowd.positive().recall;
    json e{{"corpus_job", in.corpus_job},
           {"corpus_notjob", in.corpus_notjob},
           {"test_job", in.test_job},
           {"test_notjob", in.test_notjob},
           {"test_recall", in.test_recall}};
    try {
      e["estimate"] = effective_recall(in);
    } catch (const Error& err) {
      e["estimate"] = nullptr;
      e["undefined"] = err.what();
    }

    if (cfg_.simulate) {
      std::vector<Label> t;
      for (const auto& id : test_ids) t.push_back(truth().topic.at(id));
      evaluation[name]["truth"] = eval_json(eval_report(p, t));
      std::size_t tp = 0, pos = 0;
      for (const auto& [id, l] : truth().topic) {
        if (l != Label::kJob) continue;
        ++pos;
        tp += preds.at(id) == Label::kJob;
      }
      e["true_recall"] = pos ? static_cast<double>(tp) / static_cast<double>(pos) : 0.0;
    }
    effective[name] = e;
  }
  r["evaluation"] = evaluation;
  r["effective_recall"] = effective;

  const auto acc = artifact("accounts");
  r["accounts"] = {{"accounts", acc.at("accounts")},
                   {"business", acc.at("business_accounts").size()},
                   {"personal", acc.at("personal")},
                   {"source_human_labels", acc.at("source_human").size()},
                   {"census", acc.at("census")}};
  if (acc.contains("evaluation")) r["accounts"]["evaluation"] = acc.at("evaluation");
  if (acc.contains("truth_evaluation")) r["accounts"]["truth_evaluation"] = acc.at("truth_evaluation");

  r["release"] = artifact("export").at("stats");
  r["release"]["records"] = artifact("export").at("records");

  // Reuse checks: no tweet in two rounds, per-model validation samples
  // disjoint, and the store's own integrity audit.
  std::size_t reused = 0;
  std::map<std::string, std::string> owner;
  const auto c1 = artifact("c1");
  for (const auto& id : id_list(c1.at("random_negatives"))) owner[id] = "c1-negatives";
  for (const auto& [rid, ids] : annotated) {
    for (const auto& id : ids) {
      if (!owner.emplace(id, rid).second) ++reused;
    }
  }
  std::set<std::string> seen;
  bool disjoint = true;
  for (const auto& name : kValidated) {
    for (const auto& id : id_list(val.at("samples").at(name).at("tweets"))) {
      disjoint = seen.insert(id).second && disjoint;
    }
  }
  const auto ledger = store_->ledger();
  std::size_t unledgered = 0;
  for (const auto& [id, rid] : owner) {
    auto r0 = ledger.round_of(id);
    if (!r0 || *r0 != rid) ++unledgered;
  }
  const auto audit = store_->audit();
  r["audit"] = {{"store_problems", audit.problems},
                {"tweets_used", owner.size()},
                {"reused_tweets", reused},
                {"unledgered_tweets", unledgered},
                {"validation_disjoint", disjoint}};

  write_text(cfg_.work_dir / "report.json", r.dump(1) + "\n");
  return r;
}

}  // namespace forge
