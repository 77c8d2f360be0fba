#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dogs/model.hpp"

namespace dogs {

struct InfluenceEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Sparse nonnegative p x p matrix with zero diagonal: an entrywise upper
/// bound on the Dobrushin influence C_ij of variable j on variable i.
/// Stored twice (by row and by column) so both C v and C^T v touch only
/// the nonzeros of one row or column. Exact zeros are not stored.
class InfluenceMatrix {
 public:
  struct Cell {
    std::size_t index = 0;
    double value = 0.0;
  };

  InfluenceMatrix() = default;
  explicit InfluenceMatrix(std::size_t p, std::string provenance = "zero");

  /// Rejects negative or non-finite values, diagonal entries, duplicates.
  static InfluenceMatrix from_entries(std::size_t p,
                                      std::span<const InfluenceEntry> entries,
                                      std::string provenance);

  std::size_t size() const noexcept { return p_; }
  std::size_t nonzeros() const noexcept { return row_cells_.size(); }
  const std::string& provenance() const noexcept { return provenance_; }

  /// (j, C_ij) for the nonzeros of row i, sorted by j.
  std::span<const Cell> row(std::size_t i) const {
    return {row_cells_.data() + row_offsets_[i],
            row_offsets_[i + 1] - row_offsets_[i]};
  }
  /// (i, C_ij) for the nonzeros of column j, sorted by i.
  std::span<const Cell> column(std::size_t j) const {
    return {col_cells_.data() + col_offsets_[j],
            col_offsets_[j + 1] - col_offsets_[j]};
  }

  double at(std::size_t i, std::size_t j) const;
  std::vector<InfluenceEntry> entries() const;
  double max_row_sum() const;

  /// out = C v.
  void multiply(std::span<const double> v, std::span<double> out) const;
  /// out = C^T v.
  void multiply_transpose(std::span<const double> v, std::span<double> out) const;

 private:
  std::size_t p_ = 0;
  std::string provenance_;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<Cell> row_cells_;
  std::vector<std::size_t> col_offsets_{0};
  std::vector<Cell> col_cells_;
};

/// Binary pairwise bound. For an edge (i,j):
///   b* = clamp(1, e^{-2 s - 2 theta_i}, e^{2 s - 2 theta_i}),
///   s  = sum_{k != j} |theta_ik|,
///   C_ij <= |e^{2 theta_ij} - e^{-2 theta_ij}| b* /
///           ((1 + b* e^{2 theta_ij}) (1 + b* e^{-2 theta_ij})).
/// The value is exact whenever b* != 1.
InfluenceMatrix influence_bound(const BinaryPairwiseMrf& model);

/// General pairwise bound:
///   C_ij <= max_{x, y} |2 sigma(1/2 max_{a,b} [(t_{a x} - t_{a y}) - (t_{b x} - t_{b y})]) - 1|
/// with t = theta^{ij} and sigma the logistic function.
InfluenceMatrix influence_bound(const GeneralPairwiseMrf& model);

/// Binary higher-order bound with A = sum_{S : i,j in S} |theta_S|:
///   C_ij <= |e^{2A} - e^{-2A}| b* / (1 + b*)^2,
/// b* as in the pairwise case with s = sum_{S : i in S, j not in S} |theta_S|.
/// Values are capped at 1.
InfluenceMatrix influence_bound(const HigherOrderBinaryMrf& model);

/// Entrywise multiplication by factor >= 1, clipped at 1.
InfluenceMatrix scale_bound(const InfluenceMatrix& bound, double factor);

struct NormOptions {
  double relative_tolerance = 1e-10;
  std::size_t max_iterations = 1'000'000;
};

/// Spectral norm by power iteration on C^T C. Throws ConvergenceError
/// (carrying the last iterate) if the iteration cap is hit.
double total_influence_norm(const InfluenceMatrix& bound,
                            const NormOptions& options = {});

}  // namespace dogs
