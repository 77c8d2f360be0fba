#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dogs/model.hpp"
#include "dogs/rng.hpp"
#include "dogs/scan.hpp"

namespace dogs {

/// P(X_i = +1 | x_{-i}) = 1 / (1 + exp(-2 (sum_k theta_ik x_k + theta_i))).
double conditional_binary(const BinaryPairwiseMrf& model, std::size_t i,
                          std::span<const int> state);
double conditional_binary(const HigherOrderBinaryMrf& model, std::size_t i,
                          std::span<const int> state);
/// Distribution of X_i over 0..|X_i|-1, ∝ exp(sum_j theta^{ij}_{a, x_j}).
std::vector<double> conditional_general(const GeneralPairwiseMrf& model,
                                        std::size_t i, std::span<const int> state);

struct StartSpec {
  enum class Kind {
    all_up,   // +1 everywhere (binary) or value 0 everywhere (general)
    uniform,  // independent uniform draws, consuming the chain's RNG first
    given,
  };

  Kind kind = Kind::all_up;
  std::vector<int> state;

  static StartSpec all_up() { return {}; }
  static StartSpec uniform() { return {Kind::uniform, {}}; }
  static StartSpec given(std::vector<int> state) {
    return {Kind::given, std::move(state)};
  }
  const char* name() const noexcept;
};

StartSpec::Kind parse_start_kind(const std::string& name);

struct GibbsOptions {
  bool keep_trajectory = false;
  std::size_t trajectory_budget_bytes = std::size_t{256} << 20;
};

struct GibbsRun {
  std::vector<int> state;                    // X^T
  std::vector<std::vector<int>> trajectory;  // X^0..X^T when kept
  std::uint64_t seed = 0;
};

/// Draw order per step: one uniform for the coordinate (stochastic steps
/// only), then one uniform against the conditional CDF.
GibbsRun run_gibbs(const BinaryPairwiseMrf& model, const Scan& scan,
                   const StartSpec& start, std::uint64_t seed,
                   const GibbsOptions& options = {});
GibbsRun run_gibbs(const GeneralPairwiseMrf& model, const Scan& scan,
                   const StartSpec& start, std::uint64_t seed,
                   const GibbsOptions& options = {});
GibbsRun run_gibbs(const HigherOrderBinaryMrf& model, const Scan& scan,
                   const StartSpec& start, std::uint64_t seed,
                   const GibbsOptions& options = {});

/// prod_{k in members} x_k; a single member is a coordinate feature.
struct Feature {
  std::vector<std::size_t> members;

  static Feature coordinate(std::size_t i) { return {{i}}; }
  double operator()(std::span<const int> state) const;
};

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replicates = 0;
  std::vector<double> values;        // terminal feature, by replicate
  std::vector<std::uint64_t> seeds;  // derive_seed(seed, r)
  double wall_time_ms = 0.0;
};

/// R independent chains with sub-seeds derive_seed(seed, r), run on up to
/// `threads` workers; results are merged by replicate index, so the output
/// does not depend on the thread count.
Estimate estimate_expectation(const BinaryPairwiseMrf& model, const Scan& scan,
                              const Feature& feature, std::size_t replicates,
                              std::uint64_t seed, const StartSpec& start = {},
                              std::size_t threads = 1);
Estimate estimate_expectation(const GeneralPairwiseMrf& model, const Scan& scan,
                              const Feature& feature, std::size_t replicates,
                              std::uint64_t seed, const StartSpec& start = {},
                              std::size_t threads = 1);
Estimate estimate_expectation(const HigherOrderBinaryMrf& model, const Scan& scan,
                              const Feature& feature, std::size_t replicates,
                              std::uint64_t seed, const StartSpec& start = {},
                              std::size_t threads = 1);

/// Runs `count` jobs on up to `threads` workers; job(r) must only touch slot r.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job);

}  // namespace dogs
