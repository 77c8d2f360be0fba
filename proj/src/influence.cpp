#include "dogs/influence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dogs/error.hpp"

namespace dogs {

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log b* for the cutoff max(e^{-2s - 2u}, min(e^{2s - 2u}, 1)).
double log_cutoff(double blanket_strength, double unary) {
  const double lo = -2.0 * blanket_strength - 2.0 * unary;
  const double hi = 2.0 * blanket_strength - 2.0 * unary;
  return std::max(lo, std::min(hi, 0.0));
}

}  // namespace

InfluenceMatrix::InfluenceMatrix(std::size_t p, std::string provenance)
    : p_(p),
      provenance_(std::move(provenance)),
      row_offsets_(p + 1, 0),
      col_offsets_(p + 1, 0) {}

InfluenceMatrix InfluenceMatrix::from_entries(
    std::size_t p, std::span<const InfluenceEntry> entries,
    std::string provenance) {
  InfluenceMatrix m(p, std::move(provenance));
  std::vector<InfluenceEntry> kept;
  kept.reserve(entries.size());
  for (const InfluenceEntry& e : entries) {
    if (e.row >= p || e.col >= p) {
      throw ConfigError("influence entry (" + std::to_string(e.row) + "," +
                        std::to_string(e.col) + ") out of range");
    }
    if (!std::isfinite(e.value) || e.value < 0.0) {
      throw ConfigError("influence entries must be finite and nonnegative");
    }
    if (e.row == e.col) {
      if (e.value != 0.0) throw ConfigError("influence diagonal must be zero");
      continue;
    }
    if (e.value != 0.0) kept.push_back(e);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return std::pair(a.row, a.col) < std::pair(b.row, b.col);
  });
  for (std::size_t k = 1; k < kept.size(); ++k) {
    if (kept[k].row == kept[k - 1].row && kept[k].col == kept[k - 1].col) {
      throw ConfigError("duplicate influence entry");
    }
  }

  m.row_cells_.reserve(kept.size());
  m.col_cells_.resize(kept.size());
  for (const auto& e : kept) {
    ++m.row_offsets_[e.row + 1];
    ++m.col_offsets_[e.col + 1];
    m.row_cells_.push_back({e.col, e.value});
  }
  for (std::size_t i = 0; i < p; ++i) {
    m.row_offsets_[i + 1] += m.row_offsets_[i];
    m.col_offsets_[i + 1] += m.col_offsets_[i];
  }
  // Rows are visited in increasing order, so each column comes out sorted.
  std::vector<std::size_t> fill(m.col_offsets_.begin(), m.col_offsets_.end() - 1);
  for (const auto& e : kept) m.col_cells_[fill[e.col]++] = {e.row, e.value};
  return m;
}

double InfluenceMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= p_ || j >= p_) throw ConfigError("influence index out of range");
  const auto r = row(i);
  const auto it = std::lower_bound(
      r.begin(), r.end(), j, [](const Cell& c, std::size_t k) { return c.index < k; });
  return (it != r.end() && it->index == j) ? it->value : 0.0;
}

std::vector<InfluenceEntry> InfluenceMatrix::entries() const {
  std::vector<InfluenceEntry> out;
  out.reserve(row_cells_.size());
  for (std::size_t i = 0; i < p_; ++i) {
    for (const Cell& c : row(i)) out.push_back({i, c.index, c.value});
  }
  return out;
}

double InfluenceMatrix::max_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < p_; ++i) {
    double s = 0.0;
    for (const Cell& c : row(i)) s += c.value;
    best = std::max(best, s);
  }
  return best;
}

void InfluenceMatrix::multiply(std::span<const double> v,
                               std::span<double> out) const {
  for (std::size_t i = 0; i < p_; ++i) {
    double s = 0.0;
    for (const Cell& c : row(i)) s += c.value * v[c.index];
    out[i] = s;
  }
}

void InfluenceMatrix::multiply_transpose(std::span<const double> v,
                                         std::span<double> out) const {
  for (std::size_t j = 0; j < p_; ++j) {
    double s = 0.0;
    for (const Cell& c : column(j)) s += c.value * v[c.index];
    out[j] = s;
  }
}

// ---------------------------------------------------------------------------

InfluenceMatrix influence_bound(const BinaryPairwiseMrf& model) {
  std::vector<InfluenceEntry> entries;
  const std::size_t p = model.size();
  for (std::size_t i = 0; i < p; ++i) {
    const auto blanket = model.blanket(i);
    for (const Neighbor& target : blanket) {
      double others = 0.0;
      for (const Neighbor& n : blanket) {
        if (n.index != target.index) others += std::abs(n.weight);
      }
      const double beta = log_cutoff(others, model.unary()[i]);
      // b e^{±2θ} / (1 + b e^{±2θ}) differences, written with logistic terms.
      const double two_theta = 2.0 * target.weight;
      const double value =
          std::abs(logistic(two_theta - beta) - logistic(-two_theta - beta));
      entries.push_back({i, target.index, value});
    }
  }
  return InfluenceMatrix::from_entries(p, entries, "binary_pairwise");
}

InfluenceMatrix influence_bound(const GeneralPairwiseMrf& model) {
  std::vector<InfluenceEntry> entries;
  const std::size_t p = model.size();
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t di = model.domain_size(i);
    for (const auto& link : model.links(i)) {
      const std::size_t dj = model.domain_size(link.neighbor);
      double best = 0.0;
      for (std::size_t x = 0; x < dj; ++x) {
        for (std::size_t y = 0; y < dj; ++y) {
          if (x == y) continue;
          double hi = -std::numeric_limits<double>::infinity();
          double lo = std::numeric_limits<double>::infinity();
          for (std::size_t a = 0; a < di; ++a) {
            const double delta =
                model.pair_value(link, a, x) - model.pair_value(link, a, y);
            hi = std::max(hi, delta);
            lo = std::min(lo, delta);
          }
          // |2 sigma(r/2) - 1| = tanh(r/4)
          best = std::max(best, std::tanh((hi - lo) / 4.0));
        }
      }
      entries.push_back({i, link.neighbor, best});
    }
  }
  return InfluenceMatrix::from_entries(p, entries, "general_pairwise");
}

InfluenceMatrix influence_bound(const HigherOrderBinaryMrf& model) {
  std::vector<InfluenceEntry> entries;
  const std::size_t p = model.size();
  std::vector<double> shared(p, 0.0);
  std::vector<char> touched(p, 0);
  std::vector<std::size_t> touched_list;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t f : model.factors_of(i)) {
      const Factor& factor = model.factors()[f];
      const double w = std::abs(factor.theta);
      for (std::size_t j : factor.members) {
        if (j == i) continue;
        if (!touched[j]) {
          touched[j] = 1;
          touched_list.push_back(j);
        }
        shared[j] += w;
      }
    }
    std::sort(touched_list.begin(), touched_list.end());
    for (std::size_t j : touched_list) {
      const double a = shared[j];
      // Sum over factors holding i but not j, accumulated directly.
      double apart = 0.0;
      for (std::size_t f : model.factors_of(i)) {
        const Factor& factor = model.factors()[f];
        if (!std::binary_search(factor.members.begin(), factor.members.end(), j)) {
          apart += std::abs(factor.theta);
        }
      }
      const double beta = log_cutoff(apart, model.unary()[i]);
      double value = 1.0;
      if (2.0 * a < 700.0) {
        value = std::min(1.0, 2.0 * std::sinh(2.0 * a) * logistic(beta) *
                                  logistic(-beta));
      }
      entries.push_back({i, j, value});
      shared[j] = 0.0;
      touched[j] = 0;
    }
    touched_list.clear();
  }
  return InfluenceMatrix::from_entries(p, entries, "higher_order");
}

InfluenceMatrix scale_bound(const InfluenceMatrix& bound, double factor) {
  if (!(factor >= 1.0) || !std::isfinite(factor)) {
    throw ConfigError("scale factor must be finite and >= 1");
  }
  auto entries = bound.entries();
  for (auto& e : entries) e.value = std::min(1.0, e.value * factor);
  std::ostringstream tag;
  tag << "scaled(" << factor << ")*" << bound.provenance();
  return InfluenceMatrix::from_entries(bound.size(), entries, tag.str());
}

double total_influence_norm(const InfluenceMatrix& bound,
                            const NormOptions& options) {
  const std::size_t p = bound.size();
  if (p == 0 || bound.nonzeros() == 0) return 0.0;
  std::vector<double> v(p, 1.0 / std::sqrt(static_cast<double>(p)));
  std::vector<double> y(p), z(p);
  double previous = -1.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    bound.multiply(v, y);
    bound.multiply_transpose(y, z);
    double yy = 0.0, zz = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      yy += y[k] * y[k];
      zz += z[k] * z[k];
    }
    if (zz == 0.0) return 0.0;
    const double estimate = yy;  // v^T C^T C v with |v| = 1
    const double scale = 1.0 / std::sqrt(zz);
    for (std::size_t k = 0; k < p; ++k) v[k] = z[k] * scale;
    if (previous >= 0.0 &&
        std::abs(estimate - previous) <= options.relative_tolerance * estimate) {
      return std::sqrt(estimate);
    }
    previous = estimate;
  }
  throw ConvergenceError("power iteration did not converge",
                         std::sqrt(std::max(previous, 0.0)), std::move(v));
}

}  // namespace dogs
