#include "dogs/variation.hpp"

#include <algorithm>
#include <string>

#include "dogs/error.hpp"

namespace dogs {

namespace {

void check_dimensions(const Scan& scan, const InfluenceMatrix& bound) {
  if (scan.dimension() != bound.size()) {
    throw ConfigError("scan over " + std::to_string(scan.dimension()) +
                      " variables, influence matrix is " +
                      std::to_string(bound.size()) + "x" +
                      std::to_string(bound.size()));
  }
}

void check_dimensions(const WeightVector& d, const InfluenceMatrix& bound) {
  if (d.size() != bound.size()) {
    throw ConfigError("weight vector has length " + std::to_string(d.size()) +
                      ", expected " + std::to_string(bound.size()));
  }
}

double row_product(const InfluenceMatrix& bound, std::size_t i,
                   std::span<const double> b) {
  double s = 0.0;
  for (const auto& c : bound.row(i)) s += c.value * b[c.index];
  return s;
}

double dot(std::span<const double> d, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] != 0.0) s += d[i] * b[i];
  }
  return s;
}

}  // namespace

void apply_step(const ScanStep& step, const InfluenceMatrix& bound,
                std::span<double> b, std::span<double> scratch) {
  switch (step.type) {
    case ScanStep::Type::basis:
      // b_k - (b_k - (C b)_k) with a zero diagonal.
      b[step.index] = row_product(bound, step.index, b);
      return;
    case ScanStep::Type::uniform: {
      bound.multiply(b, scratch);
      const double q = 1.0 / static_cast<double>(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) {
        b[i] -= q * (b[i] - scratch[i]);
      }
      return;
    }
    case ScanStep::Type::distribution:
      bound.multiply(b, scratch);
      for (std::size_t i = 0; i < b.size(); ++i) {
        const double q = step.probs[i];
        if (q != 0.0) b[i] -= q * (b[i] - scratch[i]);
      }
      return;
  }
}

CouplingBoundTrace forward_coupling_bounds(const Scan& scan,
                                           const InfluenceMatrix& bound,
                                           const WeightVector* d) {
  check_dimensions(scan, bound);
  if (d != nullptr) check_dimensions(*d, bound);
  const std::size_t p = bound.size();
  const std::size_t T = scan.length();

  CouplingBoundTrace trace;
  trace.final_.assign(p, 1.0);
  trace.changed_.resize(T);
  trace.previous_.resize(T, 0.0);
  trace.dense_slot_.resize(T, 0);
  std::vector<double> scratch(p);
  auto& b = trace.final_;

  double running = 0.0;
  if (d != nullptr) {
    running = d->sum();
    trace.running_.reserve(T);
  }

  for (std::size_t t = 0; t < T; ++t) {
    const ScanStep step = scan.step(t);
    if (step.type == ScanStep::Type::basis) {
      const std::size_t k = step.index;
      trace.changed_[t] = static_cast<std::int64_t>(k);
      trace.previous_[t] = b[k];
      const double old = b[k];
      apply_step(step, bound, b, scratch);
      if (d != nullptr) running += (*d)[k] * (b[k] - old);
    } else {
      trace.changed_[t] = -1;
      trace.dense_slot_[t] = trace.dense_previous_.size();
      trace.dense_previous_.push_back(b);
      apply_step(step, bound, b, scratch);
      if (d != nullptr) running = dot(d->values(), b);
    }
    if (d != nullptr) trace.running_.push_back(running);
  }
  return trace;
}

void CouplingBoundTrace::undo(std::size_t t, std::span<double> b) const {
  const std::int64_t k = changed_[t];
  if (k >= 0) {
    b[static_cast<std::size_t>(k)] = previous_[t];
  } else {
    const auto& old = dense_previous_[dense_slot_[t]];
    std::copy(old.begin(), old.end(), b.begin());
  }
}

std::vector<double> CouplingBoundTrace::bounds_at(std::size_t t) const {
  if (t > length()) throw ConfigError("trace index out of range");
  std::vector<double> b = final_;
  for (std::size_t s = length(); s > t; --s) undo(s - 1, b);
  return b;
}

double dobrushin_variation(const Scan& scan, const WeightVector& d,
                           const InfluenceMatrix& bound) {
  check_dimensions(scan, bound);
  check_dimensions(d, bound);
  const std::size_t p = bound.size();
  std::vector<double> b(p, 1.0);
  std::vector<double> scratch(p);
  for (std::size_t t = 0; t < scan.length(); ++t) {
    apply_step(scan.step(t), bound, b, scratch);
  }
  return dot(d.values(), b);
}

std::vector<double> dv_at_lengths(const Scan& scan, const WeightVector& d,
                                  const InfluenceMatrix& bound,
                                  std::span<const std::size_t> lengths) {
  check_dimensions(scan, bound);
  check_dimensions(d, bound);
  if (!std::is_sorted(lengths.begin(), lengths.end()) ||
      (!lengths.empty() && lengths.back() > scan.length())) {
    throw ConfigError("lengths must be sorted and within the scan");
  }
  const std::size_t p = bound.size();
  std::vector<double> b(p, 1.0);
  std::vector<double> scratch(p);
  std::vector<double> out;
  out.reserve(lengths.size());
  std::size_t t = 0;
  for (std::size_t target : lengths) {
    for (; t < target; ++t) apply_step(scan.step(t), bound, b, scratch);
    out.push_back(dot(d.values(), b));
  }
  return out;
}

ErgodicityVerdict ergodicity_check(const InfluenceMatrix& bound,
                                   const NormOptions& options) {
  ErgodicityVerdict v;
  v.norm = total_influence_norm(bound, options);
  v.in_regime = v.norm < 1.0;
  return v;
}

}  // namespace dogs
