#pragma once

// Desk-scale experiment drivers. Each returns a report holding the echoed
// configuration, headline numbers, and one CSV table per plotted series.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dogs/io.hpp"
#include "dogs/model.hpp"

namespace dogs {

struct ExperimentReport {
  std::string id;
  json config;
  json summary;
  json environment;
  std::vector<std::pair<std::string, CsvTable>> series;

  const CsvTable& table(const std::string& name) const;
  json manifest() const;
  /// Writes <dir>/<id>_<series>.csv for every series plus <dir>/manifest.json.
  void save(const std::filesystem::path& dir) const;
};

json environment_metadata(std::size_t threads);

struct ScanEvalConfig {
  std::size_t rows = 10;
  std::size_t cols = 10;
  std::vector<std::size_t> grid;  // empty: 50, 100, ..., 800
  std::string weights = "ones";
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bool iterated = true;
};
ExperimentReport exp_scan_evaluation(const ScanEvalConfig& config);

struct WallClockConfig {
  std::size_t rows = 100;
  std::size_t cols = 100;
  bool symmetric = false;  // zero unary weights, so E[X_0] = 0
  std::size_t reference_length = 20000;
  std::size_t target = 0;
  std::size_t samples = 200;  // chains per sampler
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};
ExperimentReport exp_wall_clock(const WallClockConfig& config);

struct MleConfig {
  std::size_t rows = 3;
  std::size_t cols = 3;
  ParameterSource coupling = ParameterSource::uniform(0.0, 0.5);
  ParameterSource unary = ParameterSource::uniform(-0.5, 0.5);
  std::size_t training_samples = 1000;
  bool rademacher_data = false;
  std::size_t gradient_steps = 60;
  std::size_t gibbs_steps = 30;  // per chain per gradient
  std::size_t runs = 30;         // chains per gradient
  double step_size = 0.1;
  double epsilon = 0.01;
  double error_threshold = 0.25;
  std::vector<std::string> policies{"uniform", "dogs"};
  std::uint64_t model_seed = 1;
  std::uint64_t data_seed = 2;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t threads = 1;
};
ExperimentReport exp_mle(const MleConfig& config);

struct MarginalConfig {
  std::size_t rows = 40;
  std::size_t cols = 40;
  bool toroidal = false;
  double coupling = kMarginalCoupling;
  std::size_t target = 0;
  std::vector<std::size_t> grid;       // empty: 1000, 2000, ..., 16000
  std::vector<std::size_t> bias_grid;  // empty: 4000, 8000, 16000
  bool uniform = true;
  bool iterated = true;
  std::size_t replicates = 300;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};
ExperimentReport exp_marginal(const MarginalConfig& config);

struct LooseBoundConfig {
  std::size_t rows = 40;
  std::size_t cols = 40;
  bool toroidal = true;
  double coupling = 0.165;
  std::size_t target = 0;
  std::vector<double> factors{1.0, 1.1, 1.3, 1.5};
  std::vector<std::size_t> grid;       // empty: 500, 1000, ..., 8000
  std::vector<std::size_t> bias_grid;  // empty: 1000, 2000, 4000
  std::size_t replicates = 300;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};
ExperimentReport exp_loose_bound(const LooseBoundConfig& config);

}  // namespace dogs
