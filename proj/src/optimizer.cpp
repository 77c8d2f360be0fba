#include "dogs/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "dogs/argmin_heap.hpp"
#include "dogs/error.hpp"
#include "dogs/variation.hpp"

namespace dogs {

namespace {

constexpr double kTieTolerance = 1e-12;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

// Derivative state for the backward pass: u = (I - C) b and w = -d .* u.
class Derivative {
 public:
  Derivative(const InfluenceMatrix& bound, std::span<const double> b,
             std::vector<double> d)
      : bound_(bound), d_(std::move(d)), u_(b.size()), w_(b.size()) {
    recompute_all(b);
  }

  std::span<const double> w() const noexcept { return w_; }
  double w(std::size_t i) const { return w_[i]; }
  ArgminHeap& heap() noexcept { return heap_; }

  void recompute_all(std::span<const double> b) {
    for (std::size_t i = 0; i < u_.size(); ++i) {
      u_[i] = residual(i, b);
      w_[i] = -d_[i] * u_[i];
    }
    heap_.reset(w_);
  }

  // b_l changed: u moves at l and at every i with C_il != 0.
  void on_bound_change(std::size_t l, std::span<const double> b) {
    refresh(l, b);
    for (const auto& c : bound_.column(l)) refresh(c.index, b);
  }

  // d <- d^T B(e_k): d_j += d_k C_kj, then d_k = 0.
  void absorb(std::size_t k) {
    const double dk = d_[k];
    if (dk == 0.0) return;
    for (const auto& c : bound_.row(k)) {
      d_[c.index] += dk * c.value;
      set_w(c.index, -d_[c.index] * u_[c.index]);
    }
    d_[k] = 0.0;
    set_w(k, 0.0);
  }

 private:
  double residual(std::size_t i, std::span<const double> b) const {
    double s = 0.0;
    for (const auto& c : bound_.row(i)) s += c.value * b[c.index];
    return b[i] - s;
  }

  void refresh(std::size_t i, std::span<const double> b) {
    u_[i] = residual(i, b);
    set_w(i, -d_[i] * u_[i]);
  }

  void set_w(std::size_t i, double value) {
    if (value == w_[i]) return;
    w_[i] = value;
    heap_.update(i, value);
  }

  const InfluenceMatrix& bound_;
  std::vector<double> d_;
  std::vector<double> u_;
  std::vector<double> w_;
  ArgminHeap heap_;
};

double incumbent_term(const ScanStep& step, std::span<const double> w) {
  switch (step.type) {
    case ScanStep::Type::basis:
      return w[step.index];
    case ScanStep::Type::uniform: {
      double s = 0.0;
      for (double v : w) s += v;
      return s / static_cast<double>(w.size());
    }
    case ScanStep::Type::distribution: {
      double s = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) s += step.probs[i] * w[i];
      return s;
    }
  }
  return 0.0;
}

}  // namespace

OptimizedScan optimize_scan(const Scan& scan, const WeightVector& d,
                            const InfluenceMatrix& bound,
                            const OptimizerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t p = bound.size();
  const std::size_t T = scan.length();
  if (T == 0) throw ConfigError("cannot optimize an empty scan");
  if (d.size() != p || scan.dimension() != p) {
    throw ConfigError("scan, weights and influence matrix disagree on dimension");
  }
  if (config.epsilon && !(*config.epsilon >= 0.0)) {
    throw ConfigError("epsilon must be nonnegative");
  }

  const CouplingBoundTrace trace = forward_coupling_bounds(scan, bound);
  std::vector<double> b = trace.final_bounds();

  double dv = 0.0;
  for (std::size_t i = 0; i < p; ++i) dv += d[i] * b[i];

  OptimizedScan out;
  out.dv_before = dv;

  Derivative deriv(bound, b, std::vector<double>(d.values().begin(), d.values().end()));
  Scan::Builder builder(scan, T);

  for (std::size_t t = T; t-- > 0;) {
    if (config.epsilon && dv <= *config.epsilon) {
      for (std::size_t s = 0; s <= t; ++s) builder.copy_step(s);
      break;
    }

    const std::int64_t changed = trace.changed_index(t);
    trace.undo(t, b);
    if (changed >= 0) {
      deriv.on_bound_change(static_cast<std::size_t>(changed), b);
    } else {
      deriv.recompute_all(b);
    }

    const ScanStep step = scan.step(t);
    const double current = incumbent_term(step, deriv.w());
    const ArgminHeap::Entry best = deriv.heap().top(deriv.w());
    std::size_t chosen = best.index;
    if (config.tie_break == TieBreak::keep_incumbent &&
        step.type == ScanStep::Type::basis && step.index != chosen &&
        deriv.w(step.index) <= best.key + kTieTolerance) {
      chosen = step.index;
    }
    if (const auto second = deriv.heap().runner_up();
        second && second->key <= best.key + kTieTolerance) {
      ++out.tie_count;
    }
    if (config.observer) config.observer(t, deriv.w(), chosen);

    dv += deriv.w(chosen) - current;
    builder.set_basis(t, chosen);
    ++out.steps_optimized;
    deriv.absorb(chosen);
  }

  out.scan = std::move(builder).finish();
  const double recomputed = dobrushin_variation(out.scan, d, bound);
  if (std::abs(recomputed - dv) > 1e-9 * static_cast<double>(std::max<std::size_t>(p, 1))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "incremental DV " << dv << " disagrees with recomputed " << recomputed;
    throw ConsistencyError(msg.str());
  }
  out.dv_after = recomputed;
  out.wall_time_ms = elapsed_ms(start);
  return out;
}

OptimizedScan iterate_optimize(const Scan& scan, const WeightVector& d,
                               const InfluenceMatrix& bound,
                               const OptimizerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  OptimizedScan best = optimize_scan(scan, d, bound, config);
  const double initial = best.dv_before;
  std::size_t iterations = 1;
  while (iterations < std::max<std::size_t>(config.max_iterations, 1)) {
    OptimizedScan next = optimize_scan(best.scan, d, bound, config);
    ++iterations;
    const bool improved = best.dv_after - next.dv_after >= 1e-12;
    if (next.dv_after <= best.dv_after) best = std::move(next);
    if (!improved) break;
  }
  best.dv_before = initial;
  best.iterations = iterations;
  best.wall_time_ms = elapsed_ms(start);
  return best;
}

OptimizedScan length_doubling_select(const Scan& reference, const WeightVector& d,
                                     const InfluenceMatrix& bound) {
  const auto start = std::chrono::steady_clock::now();
  if (reference.empty()) throw ConfigError("reference scan is empty");
  const double target = dobrushin_variation(reference, d, bound);
  const OptimizerConfig config;

  std::size_t length = std::min<std::size_t>(2, reference.length());
  for (;;) {
    OptimizedScan candidate = optimize_scan(reference.prefix(length), d, bound, config);
    if (candidate.dv_after <= target || length == reference.length()) {
      candidate.accepted_length = length;
      candidate.reference_dv = target;
      candidate.wall_time_ms = elapsed_ms(start);
      return candidate;
    }
    length = std::min(2 * length, reference.length());
  }
}

const char* tie_break_name(TieBreak rule) noexcept {
  return rule == TieBreak::keep_incumbent ? "keep_incumbent" : "lowest_index";
}

TieBreak parse_tie_break(const std::string& name) {
  if (name == "keep_incumbent") return TieBreak::keep_incumbent;
  if (name == "lowest_index") return TieBreak::lowest_index;
  throw ConfigError("unknown tie-break rule '" + name + "'");
}

}  // namespace dogs
