#pragma once

// Brute-force ground truth for small models. Everything here is computed
// from joint log-potentials by enumeration and shares no code with the
// bounds, the recursion or the sampler it is used to check.
//
// States are indexed lexicographically with variable 0 as the most
// significant digit; digit 0 is the lowest value (-1 for binary models).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dogs/influence.hpp"
#include "dogs/model.hpp"
#include "dogs/rng.hpp"
#include "dogs/scan.hpp"

namespace dogs {

inline constexpr std::size_t kMaxExactStates = std::size_t{1} << 20;

/// Product of the domain sizes; throws SizeGuardError above `limit`.
std::size_t state_count(std::span<const std::size_t> domains,
                        std::size_t limit = kMaxExactStates);

class ExactDistribution {
 public:
  ExactDistribution() = default;
  /// Checks nonnegativity and unit mass (1e-12). `spins` maps digits to ±1.
  ExactDistribution(std::vector<std::size_t> domains, std::vector<double> probs,
                    bool spins);

  static ExactDistribution point_mass(std::vector<std::size_t> domains,
                                      std::span<const int> values, bool spins);
  static ExactDistribution uniform(std::vector<std::size_t> domains, bool spins);

  std::size_t variables() const noexcept { return domains_.size(); }
  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<std::size_t>& domains() const noexcept { return domains_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double operator[](std::size_t s) const { return probs_[s]; }
  bool spins() const noexcept { return spins_; }

  std::vector<int> values_of(std::size_t s) const;
  std::size_t index_of(std::span<const int> values) const;

  /// E[prod_{k in members} X_k].
  double expectation(std::span<const std::size_t> members) const;
  /// One exact draw by inverse CDF.
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<std::size_t> domains_;
  std::vector<double> probs_;
  bool spins_ = true;
};

ExactDistribution enumerate_distribution(const BinaryPairwiseMrf& model);
ExactDistribution enumerate_distribution(const GeneralPairwiseMrf& model);
ExactDistribution enumerate_distribution(const HigherOrderBinaryMrf& model);

/// Distribution of X_i given the rest, from ratios of joint potentials.
std::vector<double> exact_conditional(const BinaryPairwiseMrf& model, std::size_t i,
                                      std::span<const int> values);
std::vector<double> exact_conditional(const GeneralPairwiseMrf& model, std::size_t i,
                                      std::span<const int> values);
std::vector<double> exact_conditional(const HigherOrderBinaryMrf& model,
                                      std::size_t i, std::span<const int> values);

/// Exact Dobrushin influence: for every ordered pair (i, j), the largest TV
/// between conditionals of X_i over neighboring states differing only at j.
InfluenceMatrix exact_influence(const BinaryPairwiseMrf& model);
InfluenceMatrix exact_influence(const GeneralPairwiseMrf& model);
InfluenceMatrix exact_influence(const HigherOrderBinaryMrf& model);

/// Row-major dense matrix P(x -> y) of one deterministic update of
/// coordinate i. Guarded at 2^12 states.
std::vector<double> single_site_transition(const BinaryPairwiseMrf& model,
                                           std::size_t i);
std::vector<double> single_site_transition(const GeneralPairwiseMrf& model,
                                           std::size_t i);
std::vector<double> single_site_transition(const HigherOrderBinaryMrf& model,
                                           std::size_t i);

/// Law of X^T when X^0 ~ start and step t resamples a q_t-distributed
/// coordinate.
ExactDistribution exact_step_distribution(const BinaryPairwiseMrf& model,
                                          const Scan& scan,
                                          const ExactDistribution& start);
ExactDistribution exact_step_distribution(const GeneralPairwiseMrf& model,
                                          const Scan& scan,
                                          const ExactDistribution& start);
ExactDistribution exact_step_distribution(const HigherOrderBinaryMrf& model,
                                          const Scan& scan,
                                          const ExactDistribution& start);

/// Half the L1 distance, with compensated summation.
double exact_tv(const ExactDistribution& mu, const ExactDistribution& nu);
/// TV between the marginals on `subset`.
double exact_marginal_tv(const ExactDistribution& mu, const ExactDistribution& nu,
                         std::span<const std::size_t> subset);

/// d^T B(q_T) ... B(q_1) 1 from explicit dense p x p products.
double dense_dobrushin_variation(const InfluenceMatrix& bound, const Scan& scan,
                                 std::span<const double> d);

struct ExhaustiveResult {
  Scan scan;
  double dv = 0.0;
};

/// Minimum-DV deterministic scan of length T by enumerating all p^T scans
/// in lexicographic order (first minimum kept). Guarded at p^T <= 2^20.
ExhaustiveResult exhaustive_best_scan(const InfluenceMatrix& bound,
                                      std::span<const double> d, std::size_t length);

}  // namespace dogs
