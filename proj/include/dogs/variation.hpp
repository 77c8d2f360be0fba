#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dogs/influence.hpp"
#include "dogs/scan.hpp"

namespace dogs {

/// Forward recursion b_0 = 1, b_t = B(q_t) b_{t-1}, B(q) = I - diag(q)(I - C).
///
/// Only b_T is kept in full. Each step records what it overwrote: a single
/// (index, old value) pair for basis steps, the whole previous vector for
/// stochastic ones. Storing old values rather than differences makes the
/// backward replay bitwise exact.
class CouplingBoundTrace {
 public:
  std::size_t length() const noexcept { return changed_.size(); }
  std::size_t dimension() const noexcept { return final_.size(); }
  const std::vector<double>& final_bounds() const noexcept { return final_; }

  /// Coordinate rewritten by step t, or -1 when the step was dense.
  std::int64_t changed_index(std::size_t t) const { return changed_[t]; }

  /// b holds the vector after zero-based step t; on return it holds the
  /// vector from before that step.
  void undo(std::size_t t, std::span<double> b) const;

  /// Reconstruct b_t for 0 <= t <= T by replaying the log backwards.
  std::vector<double> bounds_at(std::size_t t) const;

  /// d^T b_t after each step (t = 1..T); only filled when the trace was
  /// built with a weight vector.
  const std::vector<double>& running_dv() const noexcept { return running_; }

 private:
  friend CouplingBoundTrace forward_coupling_bounds(const Scan&,
                                                    const InfluenceMatrix&,
                                                    const WeightVector*);
  std::vector<double> final_;
  std::vector<std::int64_t> changed_;
  std::vector<double> previous_;  // per step; old value for basis steps
  std::vector<std::size_t> dense_slot_;
  std::vector<std::vector<double>> dense_previous_;
  std::vector<double> running_;
};

CouplingBoundTrace forward_coupling_bounds(const Scan& scan,
                                           const InfluenceMatrix& bound,
                                           const WeightVector* d = nullptr);

/// d^T B(q_T) ... B(q_1) 1, evaluated without keeping a trace.
double dobrushin_variation(const Scan& scan, const WeightVector& d,
                           const InfluenceMatrix& bound);

/// DV of the first `lengths[k]` steps for each k, from one forward pass.
/// Lengths must be nondecreasing and at most scan.length().
std::vector<double> dv_at_lengths(const Scan& scan, const WeightVector& d,
                                  const InfluenceMatrix& bound,
                                  std::span<const std::size_t> lengths);

/// One application b <- B(q_t) b. `scratch` must have size p when the step
/// is not a basis vector.
void apply_step(const ScanStep& step, const InfluenceMatrix& bound,
                std::span<double> b, std::span<double> scratch);

struct ErgodicityVerdict {
  double norm = 0.0;
  bool in_regime = false;  // norm < 1
};

ErgodicityVerdict ergodicity_check(const InfluenceMatrix& bound,
                                   const NormOptions& options = {});

}  // namespace dogs
