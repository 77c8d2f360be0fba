#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dogs {

/// One selection distribution q_t.
struct ScanStep {
  enum class Type { basis, uniform, distribution };

  Type type = Type::basis;
  std::size_t index = 0;          // basis: q_t = e_index
  std::span<const double> probs;  // distribution: q_t itself
};

/// A length-T sequence of selection distributions over p variables.
///
/// Systematic and uniform scans are stored implicitly. Mixed scans hold a
/// per-step code (>= 0: basis index, -1: uniform, <= -2: explicit vector)
/// and arise when an optimizer keeps a stochastic prefix.
class Scan {
 public:
  enum class Kind { deterministic, systematic, uniform, explicit_vectors, mixed };

  Scan() = default;

  static Scan deterministic(std::size_t p, std::vector<std::size_t> indices);
  /// q_t = e_{t mod p} for t = 0..T-1 (row-major sweep).
  static Scan systematic(std::size_t p, std::size_t length);
  static Scan uniform(std::size_t p, std::size_t length);
  /// Each vector must be nonnegative and sum to 1 within 1e-12.
  static Scan explicit_vectors(std::size_t p,
                               std::vector<std::vector<double>> vectors);

  Kind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return p_; }
  std::size_t length() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }
  /// True when every step is a basis vector.
  bool is_deterministic() const noexcept;

  /// Step t, zero-based.
  ScanStep step(std::size_t t) const;
  /// First `length` steps.
  Scan prefix(std::size_t length) const;

  /// Dense q_t (allocates); mostly for oracles and serialization.
  std::vector<double> dense_step(std::size_t t) const;
  /// Indices of a deterministic scan; throws otherwise.
  std::vector<std::size_t> indices() const;

  static const char* kind_name(Kind kind) noexcept;

  /// Builder used by the optimizer: per-step codes over a source scan.
  class Builder {
   public:
    Builder(const Scan& source, std::size_t length);
    void set_basis(std::size_t t, std::size_t index);
    void copy_step(std::size_t t);
    Scan finish() &&;

   private:
    const Scan& source_;
    std::vector<std::int64_t> codes_;
    std::vector<std::vector<double>> vectors_;
  };

 private:
  Kind kind_ = Kind::deterministic;
  std::size_t p_ = 0;
  std::size_t length_ = 0;
  std::vector<std::int64_t> codes_;  // deterministic and mixed
  std::vector<std::vector<double>> vectors_;
};

/// Nonnegative per-variable weights d. Zero weights are allowed.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> values);

  static WeightVector ones(std::size_t p);
  static WeightVector unit(std::size_t p, std::size_t index);
  static WeightVector indicator(std::size_t p, std::span<const std::size_t> set);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double sum() const noexcept;
  bool all_zero() const noexcept;

 private:
  std::vector<double> values_;
};

}  // namespace dogs
