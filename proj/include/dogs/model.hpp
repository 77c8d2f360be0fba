#pragma once

// Discrete target distributions: binary pairwise (Ising), general pairwise
// over finite domains, and binary models with higher-order factors.
//
// Each unordered pair or factor contributes to the log-potential exactly
// once. Binary variables take values in {-1, +1}; general variables take
// values 0..|X_i|-1. Models are immutable after construction.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dogs/rng.hpp"

namespace dogs {

struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double theta = 0.0;
};

struct Neighbor {
  std::size_t index = 0;
  double weight = 0.0;
};

/// pi(x) ∝ exp( sum_{i<j} theta_ij x_i x_j + sum_i theta_i x_i ), x in {-1,1}^p.
class BinaryPairwiseMrf {
 public:
  BinaryPairwiseMrf() = default;

  /// p is taken from unary.size(). Rejects out-of-range indices, self-pairs
  /// and duplicate edges (in either orientation).
  static BinaryPairwiseMrf build(std::span<const Coupling> pairs,
                                 std::vector<double> unary);

  std::size_t size() const noexcept { return unary_.size(); }
  std::size_t domain_size(std::size_t) const noexcept { return 2; }
  static constexpr int value_of_digit(int digit) noexcept {
    return 2 * digit - 1;
  }

  /// Couplings in canonical (i < j) form, sorted, as supplied (zeros kept).
  const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
  std::span<const double> unary() const noexcept { return unary_; }
  std::size_t edge_count() const noexcept { return couplings_.size(); }

  /// Neighbors with nonzero coupling, sorted by index.
  std::span<const Neighbor> blanket(std::size_t i) const;
  std::size_t max_blanket_size() const noexcept { return max_blanket_; }

  /// sum_k theta_ik x_k + theta_i.
  double local_field(std::size_t i, std::span<const int> spins) const;
  double log_potential(std::span<const int> spins) const;

 private:
  std::vector<Coupling> couplings_;
  std::vector<double> unary_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::size_t max_blanket_ = 0;
};

/// Dense |X_i| x |X_j| table, row-major in the value of the first variable.
class PairTable {
 public:
  PairTable() = default;
  PairTable(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t a, std::size_t b) const {
    return values_[a * cols_ + b];
  }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct PairPotential {
  std::size_t i = 0;
  std::size_t j = 0;
  PairTable table;  // table(a, b) = theta^{ij}_{ab}, a over X_i, b over X_j
};

/// pi(x) ∝ exp( sum_{pairs (i,j)} theta^{ij}_{x_i x_j} ).
class GeneralPairwiseMrf {
 public:
  struct Link {
    std::size_t neighbor = 0;
    std::size_t potential = 0;
    bool transposed = false;  // true when this variable is the table's column
  };

  GeneralPairwiseMrf() = default;

  static GeneralPairwiseMrf build(std::vector<std::size_t> domains,
                                  std::vector<PairPotential> potentials);

  /// theta^{ij}_{ab} = strength * 1{a = b} on every listed edge.
  static GeneralPairwiseMrf potts(
      std::vector<std::size_t> domains,
      std::span<const std::pair<std::size_t, std::size_t>> edges,
      double strength);

  std::size_t size() const noexcept { return domains_.size(); }
  std::size_t domain_size(std::size_t i) const { return domains_.at(i); }
  const std::vector<std::size_t>& domains() const noexcept { return domains_; }
  static constexpr int value_of_digit(int digit) noexcept { return digit; }

  const std::vector<PairPotential>& potentials() const noexcept {
    return potentials_;
  }
  std::span<const Link> links(std::size_t i) const;
  std::size_t max_blanket_size() const noexcept { return max_blanket_; }

  /// theta^{i, neighbor}_{value_i, value_neighbor} as seen from the link's owner.
  double pair_value(const Link& link, std::size_t value_self,
                    std::size_t value_neighbor) const {
    const PairTable& t = potentials_[link.potential].table;
    return link.transposed ? t(value_neighbor, value_self)
                           : t(value_self, value_neighbor);
  }

  /// sum over links of theta^{ij}_{a, x_j}.
  double site_score(std::size_t i, std::size_t a,
                    std::span<const int> values) const;
  double log_potential(std::span<const int> values) const;

 private:
  std::vector<std::size_t> domains_;
  std::vector<PairPotential> potentials_;
  std::vector<std::size_t> offsets_;
  std::vector<Link> links_;
  std::size_t max_blanket_ = 0;
};

struct Factor {
  std::vector<std::size_t> members;
  double theta = 0.0;
};

/// pi(x) ∝ exp( sum_S theta_S prod_{k in S} x_k + sum_i theta_i x_i ).
class HigherOrderBinaryMrf {
 public:
  HigherOrderBinaryMrf() = default;

  /// Factors over the same subset are merged by summing weights.
  static HigherOrderBinaryMrf build(std::vector<Factor> factors,
                                    std::vector<double> unary);

  std::size_t size() const noexcept { return unary_.size(); }
  std::size_t domain_size(std::size_t) const noexcept { return 2; }
  static constexpr int value_of_digit(int digit) noexcept {
    return 2 * digit - 1;
  }

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::span<const double> unary() const noexcept { return unary_; }
  /// Indices into factors() of the factors containing i.
  std::span<const std::size_t> factors_of(std::size_t i) const;
  std::span<const std::size_t> blanket(std::size_t i) const;
  std::size_t max_blanket_size() const noexcept { return max_blanket_; }

  double local_field(std::size_t i, std::span<const int> spins) const;
  double log_potential(std::span<const int> spins) const;

 private:
  std::vector<Factor> factors_;
  std::vector<double> unary_;
  std::vector<std::size_t> incidence_offsets_;
  std::vector<std::size_t> incidence_;
  std::vector<std::size_t> blanket_offsets_;
  std::vector<std::size_t> blankets_;
  std::size_t max_blanket_ = 0;
};

std::vector<std::size_t> markov_blanket(const BinaryPairwiseMrf& model,
                                        std::size_t i);
std::vector<std::size_t> markov_blanket(const GeneralPairwiseMrf& model,
                                        std::size_t i);
std::vector<std::size_t> markov_blanket(const HigherOrderBinaryMrf& model,
                                        std::size_t i);

/// Where a lattice draws its couplings or unary weights from.
struct ParameterSource {
  enum class Kind { constant, uniform, choice };

  Kind kind = Kind::constant;
  double low = 0.0;   // constant value, or lower end of the interval
  double high = 0.0;  // upper end of the interval
  std::vector<double> choices;

  static ParameterSource fixed(double value);
  static ParameterSource uniform(double low, double high);
  static ParameterSource choice(std::vector<double> values);

  double draw(Rng& rng) const;
};

/// Coupling used by the marginal-mixing experiment: exactly 1/3.915.
inline constexpr double kMarginalCoupling = 1.0 / 3.915;

struct LatticeSpec {
  std::size_t rows = 1;
  std::size_t cols = 1;
  bool toroidal = false;
  ParameterSource coupling = ParameterSource::fixed(0.0);
  ParameterSource unary = ParameterSource::fixed(0.0);

  /// theta_ij ~ Uniform[0, 0.25], theta_i uniform on {0, 1}; non-toroidal.
  static LatticeSpec random_field(std::size_t rows, std::size_t cols);
  /// Constant coupling, zero unary.
  static LatticeSpec constant(std::size_t rows, std::size_t cols,
                              double coupling, bool toroidal);

  std::size_t sites() const noexcept { return rows * cols; }
  std::size_t expected_edges() const noexcept;
  /// Grid (wrap-around when toroidal) Manhattan distance between two sites.
  std::size_t manhattan(std::size_t a, std::size_t b) const;
};

/// Row-major grid Ising model. Unary weights are drawn first (site order),
/// then couplings in edge order (right neighbor, then down neighbor, per
/// site). Identical seeds give bit-identical models.
BinaryPairwiseMrf lattice_ising(const LatticeSpec& spec, std::uint64_t seed);

}  // namespace dogs
