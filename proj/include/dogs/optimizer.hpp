#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "dogs/influence.hpp"
#include "dogs/scan.hpp"

namespace dogs {

enum class TieBreak {
  keep_incumbent,  // keep q_t if it is a basis vector within 1e-12 of the minimum
  lowest_index,
};

/// Called at every optimized step with the zero-based step index, the
/// current derivative vector w (w_i = change in DV if q_t := e_i, up to a
/// constant), and the chosen coordinate.
using StepObserver =
    std::function<void(std::size_t t, std::span<const double> w, std::size_t chosen)>;

struct OptimizerConfig {
  std::optional<double> epsilon;  // early-stop target, DV units
  TieBreak tie_break = TieBreak::keep_incumbent;
  std::size_t max_iterations = 100;  // iterate_optimize only
  StepObserver observer;
};

struct OptimizedScan {
  Scan scan;
  double dv_before = 0.0;
  double dv_after = 0.0;
  std::size_t steps_optimized = 0;
  std::size_t tie_count = 0;  // steps where >1 coordinate was within 1e-12 of min w
  double wall_time_ms = 0.0;
  std::size_t iterations = 1;
  std::size_t accepted_length = 0;  // length_doubling_select only
  double reference_dv = 0.0;        // length_doubling_select only
};

/// One forward-backward coordinate-descent pass over the scan steps.
/// Throws ConsistencyError if the incremental DV disagrees with a
/// from-scratch recomputation by more than 1e-9 p.
OptimizedScan optimize_scan(const Scan& scan, const WeightVector& d,
                            const InfluenceMatrix& bound,
                            const OptimizerConfig& config = {});

/// Re-optimizes its own output until DV improves by less than 1e-12 or
/// config.max_iterations passes have run.
OptimizedScan iterate_optimize(const Scan& scan, const WeightVector& d,
                               const InfluenceMatrix& bound,
                               const OptimizerConfig& config = {});

/// Shortest power-of-two prefix length (starting at 2, capped at the
/// reference length) whose optimized scan matches the reference DV.
OptimizedScan length_doubling_select(const Scan& reference, const WeightVector& d,
                                     const InfluenceMatrix& bound);

const char* tie_break_name(TieBreak rule) noexcept;
TieBreak parse_tie_break(const std::string& name);

}  // namespace dogs
