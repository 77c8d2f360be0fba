#pragma once

// Random model, scan and bound generators shared by the unit and
// acceptance tests. Everything is driven by an explicit Rng so failures
// reproduce from the printed seed.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dogs/exact.hpp"
#include "dogs/influence.hpp"
#include "dogs/model.hpp"
#include "dogs/rng.hpp"
#include "dogs/scan.hpp"

namespace dogs::testing {

inline double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

/// Every pair is an edge with probability `density`; |theta_ij| <= max_pair,
/// |theta_i| <= max_unary.
inline BinaryPairwiseMrf random_binary(Rng& rng, std::size_t p, double max_pair, double max_unary,
                                       double density = 0.7) {
  std::vector<Coupling> pairs;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (rng.uniform() < density) pairs.push_back({i, j, uniform_in(rng, -max_pair, max_pair)});
    }
  }
  std::vector<double> unary(p);
  for (auto& u : unary) u = uniform_in(rng, -max_unary, max_unary);
  return BinaryPairwiseMrf::build(pairs, unary);
}

inline GeneralPairwiseMrf random_general(Rng& rng, std::size_t p, std::size_t max_domain,
                                         double scale) {
  std::vector<std::size_t> domains(p);
  for (auto& d : domains) d = 2 + rng.below(max_domain - 1);
  std::vector<PairPotential> pots;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (rng.uniform() < 0.3) continue;
      std::vector<double> values(domains[i] * domains[j]);
      for (auto& v : values) v = uniform_in(rng, -scale, scale);
      pots.push_back({i, j, PairTable(domains[i], domains[j], std::move(values))});
    }
  }
  return GeneralPairwiseMrf::build(domains, std::move(pots));
}

inline HigherOrderBinaryMrf random_higher_order(Rng& rng, std::size_t p, std::size_t max_order,
                                                double max_theta, double max_unary) {
  std::vector<Factor> factors;
  const std::size_t count = 1 + rng.below(2 * p);
  for (std::size_t f = 0; f < count; ++f) {
    const std::size_t size = 2 + rng.below(std::min(max_order, p) - 1);
    std::vector<std::size_t> members;
    while (members.size() < size) {
      const std::size_t k = rng.below(p);
      if (std::find(members.begin(), members.end(), k) == members.end()) members.push_back(k);
    }
    factors.push_back({members, uniform_in(rng, -max_theta, max_theta)});
  }
  std::vector<double> unary(p);
  for (auto& u : unary) u = uniform_in(rng, -max_unary, max_unary);
  return HigherOrderBinaryMrf::build(std::move(factors), std::move(unary));
}

inline std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) {
    x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    total += x;
  }
  if (total == 0.0) {
    v[rng.below(n)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= total;
  // Push rounding into the largest entry so the sum is 1 within 1e-15.
  double sum = 0.0;
  for (double x : v) sum += x;
  *std::max_element(v.begin(), v.end()) += 1.0 - sum;
  return v;
}

/// kind 0: deterministic, 1: uniform, 2: explicit random vectors,
/// 3: systematic.
inline Scan random_scan(Rng& rng, std::size_t p, std::size_t length, int kind) {
  switch (kind) {
    case 0: {
      std::vector<std::size_t> idx(length);
      for (auto& i : idx) i = rng.below(p);
      return Scan::deterministic(p, idx);
    }
    case 1:
      return Scan::uniform(p, length);
    case 2: {
      std::vector<std::vector<double>> vectors(length);
      for (auto& v : vectors) v = random_simplex(rng, p);
      return Scan::explicit_vectors(p, vectors);
    }
    default:
      return Scan::systematic(p, length);
  }
}

inline ExactDistribution random_distribution(Rng& rng, std::vector<std::size_t> domains,
                                             bool spins) {
  std::size_t n = 1;
  for (auto d : domains) n *= d;
  return ExactDistribution(std::move(domains), random_simplex(rng, n), spins);
}

/// Dense random bound with zero diagonal and entries in [0, max_entry).
inline InfluenceMatrix random_bound(Rng& rng, std::size_t p, double max_entry,
                                    double density = 1.0) {
  std::vector<InfluenceEntry> entries;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (i != j && rng.uniform() < density) entries.push_back({i, j, max_entry * rng.uniform()});
    }
  }
  return InfluenceMatrix::from_entries(p, entries, "random");
}

inline std::vector<std::vector<double>> dense(const InfluenceMatrix& c) {
  std::vector<std::vector<double>> m(c.size(), std::vector<double>(c.size(), 0.0));
  for (const auto& e : c.entries()) m[e.row][e.col] = e.value;
  return m;
}

}  // namespace dogs::testing
