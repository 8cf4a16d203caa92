#pragma once

// JSON-driven pipeline: config -> split -> decomposition -> metric spaces ->
// normalizer reduction -> submersion metrics, plus golden-corpus comparison.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "homspace/errors.hpp"
#include "homspace/homspace.hpp"
#include "homspace/isotropy.hpp"
#include "homspace/liealg.hpp"
#include "homspace/metricspace.hpp"
#include "homspace/reduction.hpp"

namespace homspace {

using json = nlohmann::json;

enum class Task { Analyze, Metric, Reduce, Submersion };

struct SpaceConfig {
  std::string name;
  Family family = Family::SO;
  int n = 0;
  BlockEmbedding subgroup;
  std::optional<BlockEmbedding> k_subgroup;
  std::uint64_t seed = 0;
  Tolerance tol;
  std::set<Task> tasks{Task::Analyze};
  std::optional<std::vector<double>> metric_params;
  std::optional<std::vector<double>> a_params;
  std::optional<std::vector<double>> p_params;
  SubmersionParametrization submersion_mode = SubmersionParametrization::Blocks;

  bool has(Task t) const { return tasks.count(t) > 0; }
};

namespace detail {

inline const json& require_field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("config", where + ": missing field '" + key + "'");
  return j.at(key);
}

inline int require_int(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_number_integer()) throw ConfigError("config", where + "." + key + " must be an integer");
  return v.get<int>();
}

inline Family require_family(const json& j, const std::string& where) {
  const json& v = require_field(j, "family", where);
  if (!v.is_string()) throw ConfigError("config", where + ".family must be a string");
  auto f = parse_family(v.get<std::string>());
  if (!f) throw ConfigError("config", where + ".family '" + v.get<std::string>() + "' is not one of SO, SU, Sp, U");
  return *f;
}

inline BlockEmbedding parse_blocks(const json& j, const std::string& where) {
  const json& arr = require_field(j, "blocks", where);
  if (!arr.is_array()) throw ConfigError("config", where + ".blocks must be an array");
  BlockEmbedding emb;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = where + ".blocks[" + std::to_string(i) + "]";
    emb.blocks.push_back(Block{require_family(arr[i], w), require_int(arr[i], "n", w), require_int(arr[i], "offset", w)});
  }
  return emb;
}

inline std::vector<double> parse_reals(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError("config", where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("config", where + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline json blocks_json(const BlockEmbedding& emb) {
  json arr = json::array();
  for (const auto& b : emb.blocks) arr.push_back({{"family", family_name(b.family)}, {"n", b.n}, {"offset", b.offset}});
  return arr;
}

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

}  // namespace detail

inline SpaceConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  SpaceConfig c;
  if (j.contains("name")) c.name = j.at("name").get<std::string>();
  const json& g = detail::require_field(j, "group", "config");
  c.family = detail::require_family(g, "group");
  c.n = detail::require_int(g, "n", "group");
  c.subgroup = detail::parse_blocks(detail::require_field(j, "subgroup", "config"), "subgroup");
  if (j.contains("k_subgroup") && !j.at("k_subgroup").is_null()) {
    c.k_subgroup = detail::parse_blocks(j.at("k_subgroup"), "k_subgroup");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0)) {
      throw ConfigError("config", "seed must be a nonnegative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (t.contains("rel")) c.tol.rel = t.at("rel").get<double>();
    if (t.contains("abs")) c.tol.abs = t.at("abs").get<double>();
    try {
      c.tol.validate();
    } catch (const ParameterError& e) {
      throw ConfigError("config", e.what());
    }
  }
  if (j.contains("tasks")) {
    const json& t = j.at("tasks");
    if (!t.is_array()) throw ConfigError("config", "tasks must be an array");
    c.tasks.clear();
    bool explicit_submersion = false;
    for (const auto& v : t) {
      const std::string s = v.get<std::string>();
      if (s == "analyze") c.tasks.insert(Task::Analyze);
      else if (s == "metric") c.tasks.insert(Task::Metric);
      else if (s == "reduce") c.tasks.insert(Task::Reduce);
      else if (s == "submersion") explicit_submersion = true;
      else if (s == "all") c.tasks = {Task::Analyze, Task::Metric, Task::Reduce, Task::Submersion};
      else throw ConfigError("config", "unknown task '" + s + "'");
    }
    c.tasks.insert(Task::Analyze);
    // "all" covers submersion only when a K subgroup is given.
    if (explicit_submersion) c.tasks.insert(Task::Submersion);
    else if (!c.k_subgroup) c.tasks.erase(Task::Submersion);
  }
  if (j.contains("metric") && j.at("metric").contains("params")) {
    c.metric_params = detail::parse_reals(j.at("metric").at("params"), "metric.params");
  }
  if (j.contains("submersion")) {
    const json& s = j.at("submersion");
    if (s.contains("a_params")) c.a_params = detail::parse_reals(s.at("a_params"), "submersion.a_params");
    if (s.contains("p_params")) c.p_params = detail::parse_reals(s.at("p_params"), "submersion.p_params");
    if (s.contains("parametrization")) {
      const std::string m = s.at("parametrization").get<std::string>();
      if (m == "blocks") c.submersion_mode = SubmersionParametrization::Blocks;
      else if (m == "full") c.submersion_mode = SubmersionParametrization::Full;
      else throw ConfigError("config", "submersion.parametrization must be 'blocks' or 'full'");
    }
  }
  if (c.has(Task::Submersion) && !c.k_subgroup) {
    throw ConfigError("config", "task 'submersion' needs a k_subgroup");
  }
  return c;
}

inline SpaceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
}

namespace detail {

// Seeded default metric: diagonal parameters in [1, 2], small off-diagonal
// coefficients on the identity components of equivalent pairs.
inline MetricOperator default_metric(const MetricSubspace& space, std::uint64_t seed, const Tolerance& tol) {
  SplitMix64 rng(seed ^ 0x6d657472696331ULL);
  Vector p = Vector::Zero(space.dim());
  const auto diag = static_cast<Eigen::Index>(space.diagonal_blocks.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const std::string& name = space.param_names[static_cast<std::size_t>(k)];
    if (k < diag) {
      p(k) = rng.uniform(1.0, 2.0);
    } else if (name.rfind("alpha", 0) == 0 && name.find("_u") == std::string::npos) {
      p(k) = rng.uniform(-0.4, 0.4);
    }
  }
  for (int attempt = 0; attempt < 60; ++attempt) {
    try {
      return assemble_metric(space, p, tol);
    } catch (const PositivityError&) {
      p.tail(p.size() - diag) *= 0.5;
    }
  }
  p.tail(p.size() - diag).setZero();
  return assemble_metric(space, p, tol);
}

inline Vector default_params(Eigen::Index n, std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 rng(seed ^ salt);
  Vector p(n);
  for (Eigen::Index k = 0; k < n; ++k) p(k) = rng.uniform(1.0, 2.0);
  return p;
}

inline json names_json(const MetricSubspace& s) {
  json arr = json::array();
  for (const auto& n : s.param_names) arr.push_back(n);
  return arr;
}

}  // namespace detail

/// Runs every requested task and returns the JSON report.
inline json run(const SpaceConfig& cfg) {
  const Tolerance& tol = cfg.tol;
  tol.validate();
  json rep;
  if (!cfg.name.empty()) rep["name"] = cfg.name;
  rep["group"] = {{"family", family_name(cfg.family)}, {"n", cfg.n}};
  rep["subgroup"] = detail::blocks_json(cfg.subgroup);
  rep["seed"] = cfg.seed;
  json warnings = json::array();

  auto g = std::make_shared<const LieAlgebra>(build_classical(cfg.family, cfg.n));
  const ReductiveSplit split = reductive_split(g, cfg.subgroup, tol);
  rep["dims"] = {{"g", split.dim_g()}, {"h", split.dim_h()}, {"m", split.dim_m()}};

  const IsotypicReport iso = decompose(split, cfg.seed, tol);
  const CommutantBasis comm = commutant(split, tol);
  for (const auto& w : iso.warnings) warnings.push_back(w);

  rep["trivial_dim"] = iso.trivial_dim();
  rep["summand_count"] = iso.summand_count();
  rep["commutant_dim"] = comm.dim();

  // Class ids: the trivial component (when present) is class 0.
  const int shift = iso.trivial_dim() > 0 ? 1 : 0;
  json summands = json::array();
  json classes = json::array();
  const auto t = static_cast<int>(iso.trivial_dim());
  if (t > 0) {
    summands.push_back({{"dim", t}, {"class", 0}, {"type", "orthogonal"}, {"trivial", true}});
    classes.push_back({{"id", 0},
                       {"dim", 1},
                       {"multiplicity", t},
                       {"type", "orthogonal"},
                       {"trivial", true},
                       {"offdiagonal_params", t * (t - 1) / 2}});
  }
  for (const auto& s : iso.summands) {
    summands.push_back({{"dim", s.dim()},
                        {"class", s.cls + shift},
                        {"type", schur_type_name(iso.classes[static_cast<std::size_t>(s.cls)].type)},
                        {"trivial", false}});
  }
  for (std::size_t c = 0; c < iso.classes.size(); ++c) {
    const auto& k = iso.classes[c];
    classes.push_back({{"id", static_cast<int>(c) + shift},
                       {"dim", k.dim},
                       {"multiplicity", k.multiplicity()},
                       {"type", schur_type_name(k.type)},
                       {"trivial", false},
                       {"offdiagonal_params", k.offdiagonal_params()}});
  }
  rep["summands"] = summands;
  rep["classes"] = classes;
  const auto counts = iso.metric_param_counts();
  json off = json::array();
  if (t > 0) off.push_back(counts.trivial_offdiagonal);
  for (int o : counts.offdiagonal) off.push_back(o);
  rep["metric_param_counts"] = {{"diagonal", counts.diagonal}, {"offdiagonal", off}, {"total", counts.total()}};

  const NormalizerAlgebra norm = normalizer_algebra(split, tol);
  rep["normalizer"] = {{"dim", norm.dim()}, {"complement_in_m", norm.complement_in_m.cols()}};

  std::optional<KSplit> ks;
  if (cfg.k_subgroup) {
    ks = k_subgroup_split(split, *cfg.k_subgroup, tol);
    rep["k_subgroup"] = detail::blocks_json(*cfg.k_subgroup);
    rep["k_split"] = {{"k", ks->dim_k()}, {"a", ks->dim_a()}, {"p", ks->dim_p()}};
  }

  const bool need_space = cfg.has(Task::Metric) || cfg.has(Task::Reduce);
  std::optional<MetricSubspace> phi_h;
  if (need_space) phi_h = metric_space_basis(iso, comm);

  if (cfg.has(Task::Metric)) {
    json ms;
    ms["phi_h"] = phi_h->dim();
    ms["phi_h_params"] = detail::names_json(*phi_h);
    if (ks) {
      const auto phi_k = fixed_set_under_K(*phi_h, split, ks->generators(), MetricLabel::PhiK, tol);
      ms["phi_k"] = phi_k.dim();
    }
    std::vector<AlgebraElement> ngens;
    for (Eigen::Index k = 0; k < norm.dim(); ++k) ngens.push_back(AlgebraElement{norm.basis.col(k)});
    const auto phi_full = fixed_set_under_K(*phi_h, split, ngens, MetricLabel::PhiFull, tol);
    ms["phi_full"] = phi_full.dim();
    ms["phi_full_label"] = metric_label_name(phi_full.label);
    ms["block_scalar"] = phi_h->dim() == counts.diagonal &&
                         std::all_of(phi_h->basis.begin(), phi_h->basis.end(),
                                     [&](const Matrix& b) { return is_block_scalar(*phi_h, b); });
    rep["metric_space"] = ms;
  }

  if (cfg.has(Task::Reduce)) {
    json red;
    const auto gens = complement_generators(split, norm, tol);
    MetricOperator a = cfg.metric_params ? assemble_metric(*phi_h, detail::to_vector(*cfg.metric_params), tol)
                                         : detail::default_metric(*phi_h, cfg.seed, tol);
    red["params"] = detail::to_json(a.params);
    red["offdiagonal_before"] = offdiagonal_norm(*phi_h, a.matrix);
    if (gens.empty()) {
      red["status"] = "skipped";
      warnings.push_back("reduce: n_g(h) meets m trivially, no normalizer generators");
    } else {
      const auto res = eliminate_offdiagonal(split, *phi_h, a, gens, tol);
      json ts = json::array();
      for (double x : res.t_star) ts.push_back(x);
      red["status"] = "done";
      red["generators"] = gens.size();
      red["t_star"] = ts;
      red["residual"] = res.residual;
      red["converged"] = res.converged;
      red["reduced_params"] = detail::to_json(res.reduced.params);
      if (!res.converged) warnings.push_back("reduce: off-diagonal residual did not reach the target");
    }
    rep["reduction"] = red;
  }

  if (cfg.has(Task::Submersion)) {
    const auto spaces = submersion_spaces(split, *ks, cfg.submersion_mode, cfg.seed, tol);
    const Vector ap = cfg.a_params ? detail::to_vector(*cfg.a_params)
                                   : detail::default_params(spaces.a_space.dim(), cfg.seed, 0x61ULL);
    const Vector pp = cfg.p_params ? detail::to_vector(*cfg.p_params)
                                   : detail::default_params(spaces.p_space.dim(), cfg.seed, 0x70ULL);
    const auto sm = submersion_metric(split, *ks, spaces, ap, pp, tol);
    json sj;
    sj["a_dim"] = ks->dim_a();
    sj["p_dim"] = ks->dim_p();
    sj["a_param_names"] = detail::names_json(spaces.a_space);
    sj["p_param_names"] = detail::names_json(spaces.p_space);
    sj["a_params"] = detail::to_json(ap);
    sj["p_params"] = detail::to_json(pp);
    sj["membership_residual"] = commutation_residual(sm.total.matrix, ks->ad_k_on_m);
    rep["submersion"] = sj;
  }

  rep["warnings"] = warnings;
  return rep;
}

struct Mismatch {
  std::string path;
  std::string detail;
};

/// Every key of `expected` must be present in `actual`; integers compare
/// exactly, reals to `real_tol`.
inline void compare_reports(const json& expected, const json& actual, const std::string& path,
                            std::vector<Mismatch>& out, double real_tol = 1e-8) {
  const std::string here = path.empty() ? "/" : path;
  if (expected.is_object()) {
    if (!actual.is_object()) {
      out.push_back({here, "expected an object"});
      return;
    }
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      if (!actual.contains(it.key())) {
        out.push_back({path + "/" + it.key(), "missing"});
        continue;
      }
      compare_reports(it.value(), actual.at(it.key()), path + "/" + it.key(), out, real_tol);
    }
    return;
  }
  if (expected.is_array()) {
    if (!actual.is_array() || actual.size() != expected.size()) {
      out.push_back({here, "expected array of length " + std::to_string(expected.size()) + ", got " + actual.dump()});
      return;
    }
    for (std::size_t k = 0; k < expected.size(); ++k)
      compare_reports(expected[k], actual[k], path + "/" + std::to_string(k), out, real_tol);
    return;
  }
  if (expected.is_number_integer() || expected.is_number_unsigned()) {
    if (!(actual.is_number_integer() || actual.is_number_unsigned()) ||
        actual.get<long long>() != expected.get<long long>()) {
      out.push_back({here, "expected " + expected.dump() + ", got " + actual.dump()});
    }
    return;
  }
  if (expected.is_number_float()) {
    if (!actual.is_number() || std::abs(actual.get<double>() - expected.get<double>()) > real_tol) {
      out.push_back({here, "expected " + expected.dump() + " (+-" + std::to_string(real_tol) + "), got " + actual.dump()});
    }
    return;
  }
  if (expected != actual) out.push_back({here, "expected " + expected.dump() + ", got " + actual.dump()});
}

struct CorpusCase {
  std::string name;
  bool passed = false;
  std::vector<Mismatch> mismatches;
  std::string error;
};

struct CorpusSummary {
  std::vector<CorpusCase> cases;
  int passed() const {
    return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const CorpusCase& c) { return c.passed; }));
  }
  bool ok() const { return passed() == static_cast<int>(cases.size()); }
};

/// Pairs NAME.config.json with NAME.expected.json in `dir`.
inline CorpusSummary run_corpus(const std::filesystem::path& dir, std::optional<std::uint64_t> seed = std::nullopt,
                                std::optional<double> tol = std::nullopt) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("corpus", dir.string() + " is not a directory");
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string f = e.path().filename().string();
    if (f.size() > 12 && f.ends_with(".config.json")) configs.push_back(e.path());
  }
  std::sort(configs.begin(), configs.end());
  CorpusSummary sum;
  for (const auto& cp : configs) {
    const std::string f = cp.filename().string();
    const std::string stem = f.substr(0, f.size() - std::string(".config.json").size());
    const fs::path ep = dir / (stem + ".expected.json");
    if (!fs::exists(ep)) throw ConfigError("corpus", "missing " + ep.string());
    json expected;
    {
      std::ifstream in(ep);
      try {
        in >> expected;
      } catch (const json::exception& e) {
        throw ConfigError("corpus", ep.string() + ": " + e.what());
      }
    }
    SpaceConfig cfg = load_config(cp);
    if (seed) cfg.seed = *seed;
    if (tol) cfg.tol = Tolerance{*tol, *tol};
    CorpusCase c;
    c.name = stem;
    try {
      const json actual = run(cfg);
      compare_reports(expected, actual, "", c.mismatches);
      c.passed = c.mismatches.empty();
    } catch (const Error& e) {
      c.error = e.what();
    }
    sum.cases.push_back(std::move(c));
  }
  return sum;
}

}  // namespace homspace
