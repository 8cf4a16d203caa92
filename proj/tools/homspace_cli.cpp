// homspace: analyze a homogeneous space G/H from a JSON config, or check a
// directory of golden reports.
//
//   homspace analyze configs/so4_so2.json --pretty
//   homspace corpus corpus/
//
// Exit codes: 0 ok, 1 computation error, 2 config error, 3 corpus mismatch.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "homspace/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kComputation = 1, kConfig = 2, kMismatch = 3 };

bool is_config_error(const homspace::Error& e) {
  return dynamic_cast<const homspace::ConfigError*>(&e) != nullptr ||
         dynamic_cast<const homspace::EmbeddingError*>(&e) != nullptr ||
         dynamic_cast<const homspace::ConstructionError*>(&e) != nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isotropy summands, invariant metrics and normalizer reduction for G/H"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  double tol = 1e-9;
  bool pretty = false;
  app.add_option("--seed", seed, "seed for the randomized decomposition (default 0)");
  app.add_option("--tol", tol, "relative and absolute tolerance (default 1e-9)")->check(CLI::PositiveNumber);
  app.add_flag("--json", "compact JSON output (default)");
  app.add_flag("--pretty", pretty, "indented JSON output");

  std::string config_path;
  auto* analyze = app.add_subcommand("analyze", "run the pipeline on one config");
  analyze->add_option("config", config_path, "config JSON file")->required();

  std::string corpus_dir;
  auto* corpus = app.add_subcommand("corpus", "compare every NAME.config.json against NAME.expected.json");
  corpus->add_option("dir", corpus_dir, "corpus directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  const bool seed_given = app.count("--seed") > 0;
  const bool tol_given = app.count("--tol") > 0;
  const int indent = pretty ? 2 : -1;

  try {
    if (*analyze) {
      homspace::SpaceConfig cfg = homspace::load_config(config_path);
      if (seed_given) cfg.seed = seed;
      if (tol_given) cfg.tol = homspace::Tolerance{tol, tol};
      std::cout << homspace::run(cfg).dump(indent) << "\n";
      return kOk;
    }
    const auto summary = homspace::run_corpus(corpus_dir, seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt,
                                              tol_given ? std::optional<double>(tol) : std::nullopt);
    for (const auto& c : summary.cases) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
      if (!c.error.empty()) std::cout << "  error: " << c.error << "\n";
      for (const auto& m : c.mismatches) std::cout << "  " << m.path << ": " << m.detail << "\n";
    }
    std::cout << summary.passed() << "/" << summary.cases.size() << " cases passed\n";
    return summary.ok() ? kOk : kMismatch;
  } catch (const homspace::Error& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
    return is_config_error(e) ? kConfig : kComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputation;
  }
}
