#include "dogs/scan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dogs/error.hpp"

namespace dogs {

namespace {

void check_vector(std::span<const double> q, std::size_t p, std::size_t t) {
  if (q.size() != p) {
    throw ConfigError("scan step " + std::to_string(t) + " has length " +
                      std::to_string(q.size()) + ", expected " + std::to_string(p));
  }
  double total = 0.0;
  for (double v : q) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("scan step " + std::to_string(t) + " has a negative entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("scan step " + std::to_string(t) + " sums to " +
                      std::to_string(total));
  }
}

}  // namespace

Scan Scan::deterministic(std::size_t p, std::vector<std::size_t> indices) {
  Scan s;
  s.kind_ = Kind::deterministic;
  s.p_ = p;
  s.length_ = indices.size();
  s.codes_.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= p) {
      throw ConfigError("scan index " + std::to_string(i) + " out of range for p=" +
                        std::to_string(p));
    }
    s.codes_.push_back(static_cast<std::int64_t>(i));
  }
  return s;
}

Scan Scan::systematic(std::size_t p, std::size_t length) {
  if (p == 0 && length > 0) throw ConfigError("systematic scan needs p >= 1");
  Scan s;
  s.kind_ = Kind::systematic;
  s.p_ = p;
  s.length_ = length;
  return s;
}

Scan Scan::uniform(std::size_t p, std::size_t length) {
  if (p == 0 && length > 0) throw ConfigError("uniform scan needs p >= 1");
  Scan s;
  s.kind_ = Kind::uniform;
  s.p_ = p;
  s.length_ = length;
  return s;
}

Scan Scan::explicit_vectors(std::size_t p,
                            std::vector<std::vector<double>> vectors) {
  for (std::size_t t = 0; t < vectors.size(); ++t) check_vector(vectors[t], p, t);
  Scan s;
  s.kind_ = Kind::explicit_vectors;
  s.p_ = p;
  s.length_ = vectors.size();
  s.vectors_ = std::move(vectors);
  return s;
}

bool Scan::is_deterministic() const noexcept {
  switch (kind_) {
    case Kind::deterministic:
    case Kind::systematic:
      return true;
    case Kind::uniform:
      return p_ == 1 || length_ == 0;
    case Kind::explicit_vectors:
    case Kind::mixed:
      for (std::size_t t = 0; t < length_; ++t) {
        if (step(t).type != ScanStep::Type::basis) return false;
      }
      return true;
  }
  return false;
}

ScanStep Scan::step(std::size_t t) const {
  ScanStep s;
  switch (kind_) {
    case Kind::deterministic:
      s.index = static_cast<std::size_t>(codes_[t]);
      return s;
    case Kind::systematic:
      s.index = t % p_;
      return s;
    case Kind::uniform:
      s.type = p_ == 1 ? ScanStep::Type::basis : ScanStep::Type::uniform;
      return s;
    case Kind::explicit_vectors: {
      const auto& q = vectors_[t];
      const auto nz = std::count_if(q.begin(), q.end(), [](double v) { return v != 0.0; });
      if (nz == 1) {
        s.index = static_cast<std::size_t>(
            std::find_if(q.begin(), q.end(), [](double v) { return v != 0.0; }) -
            q.begin());
        return s;
      }
      s.type = ScanStep::Type::distribution;
      s.probs = q;
      return s;
    }
    case Kind::mixed: {
      const std::int64_t code = codes_[t];
      if (code >= 0) {
        s.index = static_cast<std::size_t>(code);
      } else if (code == -1) {
        s.type = p_ == 1 ? ScanStep::Type::basis : ScanStep::Type::uniform;
      } else {
        s.type = ScanStep::Type::distribution;
        s.probs = vectors_[static_cast<std::size_t>(-code - 2)];
      }
      return s;
    }
  }
  return s;
}

Scan Scan::prefix(std::size_t length) const {
  if (length > length_) throw ConfigError("prefix longer than scan");
  Scan s = *this;
  s.length_ = length;
  if (kind_ == Kind::deterministic || kind_ == Kind::mixed) s.codes_.resize(length);
  if (kind_ == Kind::explicit_vectors) s.vectors_.resize(length);
  return s;
}

std::vector<double> Scan::dense_step(std::size_t t) const {
  std::vector<double> q(p_, 0.0);
  const ScanStep s = step(t);
  switch (s.type) {
    case ScanStep::Type::basis:
      q[s.index] = 1.0;
      break;
    case ScanStep::Type::uniform:
      std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(p_));
      break;
    case ScanStep::Type::distribution:
      std::copy(s.probs.begin(), s.probs.end(), q.begin());
      break;
  }
  return q;
}

std::vector<std::size_t> Scan::indices() const {
  std::vector<std::size_t> out(length_);
  for (std::size_t t = 0; t < length_; ++t) {
    const ScanStep s = step(t);
    if (s.type != ScanStep::Type::basis) {
      throw ConfigError("scan step " + std::to_string(t) + " is not deterministic");
    }
    out[t] = s.index;
  }
  return out;
}

const char* Scan::kind_name(Kind kind) noexcept {
  switch (kind) {
    case Kind::deterministic:
      return "deterministic";
    case Kind::systematic:
      return "systematic";
    case Kind::uniform:
      return "uniform";
    case Kind::explicit_vectors:
      return "explicit";
    case Kind::mixed:
      return "mixed";
  }
  return "unknown";
}

Scan::Builder::Builder(const Scan& source, std::size_t length)
    : source_(source), codes_(length, 0) {
  if (length > source.length()) throw ConfigError("builder longer than source scan");
}

void Scan::Builder::set_basis(std::size_t t, std::size_t index) {
  codes_[t] = static_cast<std::int64_t>(index);
}

void Scan::Builder::copy_step(std::size_t t) {
  const ScanStep s = source_.step(t);
  switch (s.type) {
    case ScanStep::Type::basis:
      codes_[t] = static_cast<std::int64_t>(s.index);
      break;
    case ScanStep::Type::uniform:
      codes_[t] = -1;
      break;
    case ScanStep::Type::distribution:
      vectors_.emplace_back(s.probs.begin(), s.probs.end());
      codes_[t] = -static_cast<std::int64_t>(vectors_.size()) - 1;
      break;
  }
}

Scan Scan::Builder::finish() && {
  Scan s;
  s.p_ = source_.dimension();
  s.length_ = codes_.size();
  const bool all_basis =
      std::all_of(codes_.begin(), codes_.end(), [](std::int64_t c) { return c >= 0; });
  s.kind_ = all_basis ? Kind::deterministic : Kind::mixed;
  s.codes_ = std::move(codes_);
  s.vectors_ = std::move(vectors_);
  return s;
}

// ---------------------------------------------------------------------------

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("weights must be finite and nonnegative");
    }
  }
}

WeightVector WeightVector::ones(std::size_t p) {
  return WeightVector(std::vector<double>(p, 1.0));
}

WeightVector WeightVector::unit(std::size_t p, std::size_t index) {
  if (index >= p) throw ConfigError("unit weight index out of range");
  std::vector<double> v(p, 0.0);
  v[index] = 1.0;
  return WeightVector(std::move(v));
}

WeightVector WeightVector::indicator(std::size_t p,
                                     std::span<const std::size_t> set) {
  std::vector<double> v(p, 0.0);
  for (std::size_t i : set) {
    if (i >= p) throw ConfigError("indicator index out of range");
    v[i] = 1.0;
  }
  return WeightVector(std::move(v));
}

double WeightVector::sum() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool WeightVector::all_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

}  // namespace dogs
