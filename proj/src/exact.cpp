#include "dogs/exact.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include "dogs/error.hpp"

namespace dogs {

namespace {

constexpr std::size_t kMaxTransitionStates = std::size_t{1} << 12;

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

template <class Model>
std::vector<std::size_t> domains_of(const Model& model) {
  std::vector<std::size_t> d(model.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = model.domain_size(i);
  return d;
}

template <class Model>
constexpr bool is_spin_model() {
  return !std::is_same_v<Model, GeneralPairwiseMrf>;
}

std::vector<std::size_t> strides_of(std::span<const std::size_t> domains) {
  std::vector<std::size_t> s(domains.size(), 1);
  for (std::size_t i = domains.size(); i-- > 1;) s[i - 1] = s[i] * domains[i];
  return s;
}

int value_of(std::size_t digit, bool spins) {
  return spins ? 2 * static_cast<int>(digit) - 1 : static_cast<int>(digit);
}

std::size_t digit_of(int value, bool spins) {
  return spins ? static_cast<std::size_t>((value + 1) / 2) : static_cast<std::size_t>(value);
}

// Joint log-potential of every state, in state order.
template <class Model>
std::vector<double> log_potentials(const Model& model, std::size_t limit) {
  const auto domains = domains_of(model);
  const std::size_t n = state_count(domains, limit);
  const bool spins = is_spin_model<Model>();
  std::vector<double> lp(n);
  std::vector<int> values(domains.size());
  std::vector<std::size_t> digits(domains.size(), 0);
  for (std::size_t k = 0; k < domains.size(); ++k) values[k] = value_of(0, spins);
  for (std::size_t s = 0; s < n; ++s) {
    lp[s] = model.log_potential(values);
    // Odometer increment, last variable fastest.
    for (std::size_t k = domains.size(); k-- > 0;) {
      if (++digits[k] < domains[k]) {
        values[k] = value_of(digits[k], spins);
        break;
      }
      digits[k] = 0;
      values[k] = value_of(0, spins);
    }
  }
  return lp;
}

// cond[s] = P(X_i = digit_i(s) | rest of s), from the fiber of s along i.
std::vector<double> fiber_conditionals(std::span<const double> lp,
                                       std::span<const std::size_t> domains,
                                       std::span<const std::size_t> strides, std::size_t i) {
  const std::size_t n = lp.size();
  const std::size_t di = domains[i];
  const std::size_t st = strides[i];
  std::vector<double> cond(n);
  for (std::size_t s = 0; s < n; ++s) {
    if ((s / st) % di != 0) continue;
    double top = -INFINITY;
    for (std::size_t a = 0; a < di; ++a) top = std::max(top, lp[s + a * st]);
    Kahan total;
    for (std::size_t a = 0; a < di; ++a) {
      cond[s + a * st] = std::exp(lp[s + a * st] - top);
      total.add(cond[s + a * st]);
    }
    for (std::size_t a = 0; a < di; ++a) cond[s + a * st] /= total.sum;
  }
  return cond;
}

template <class Model>
ExactDistribution enumerate_impl(const Model& model) {
  const std::vector<double> lp = log_potentials(model, kMaxExactStates);
  const double top = lp.empty() ? 0.0 : *std::max_element(lp.begin(), lp.end());
  std::vector<double> probs(lp.size());
  Kahan total;
  for (std::size_t s = 0; s < lp.size(); ++s) {
    probs[s] = std::exp(lp[s] - top);
    total.add(probs[s]);
  }
  for (double& v : probs) v /= total.sum;
  return ExactDistribution(domains_of(model), std::move(probs), is_spin_model<Model>());
}

template <class Model>
std::vector<double> conditional_impl(const Model& model, std::size_t i,
                                     std::span<const int> values) {
  if (i >= model.size()) throw ConfigError("variable index out of range");
  if (values.size() != model.size()) throw ConfigError("state has the wrong length");
  const bool spins = is_spin_model<Model>();
  const std::size_t di = model.domain_size(i);
  std::vector<int> x(values.begin(), values.end());
  std::vector<double> lp(di);
  for (std::size_t a = 0; a < di; ++a) {
    x[i] = value_of(a, spins);
    lp[a] = model.log_potential(x);
  }
  const double top = *std::max_element(lp.begin(), lp.end());
  Kahan total;
  for (double& v : lp) {
    v = std::exp(v - top);
    total.add(v);
  }
  for (double& v : lp) v /= total.sum;
  return lp;
}

template <class Model>
InfluenceMatrix influence_impl(const Model& model) {
  const auto domains = domains_of(model);
  const auto strides = strides_of(domains);
  const std::vector<double> lp = log_potentials(model, kMaxExactStates);
  const std::size_t p = domains.size();
  const std::size_t n = lp.size();
  std::vector<InfluenceEntry> entries;
  for (std::size_t i = 0; i < p; ++i) {
    const std::vector<double> cond = fiber_conditionals(lp, domains, strides, i);
    const std::size_t sti = strides[i];
    for (std::size_t j = 0; j < p; ++j) {
      if (j == i) continue;
      const std::size_t stj = strides[j];
      double best = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        if ((s / sti) % domains[i] != 0) continue;
        const std::size_t xj = (s / stj) % domains[j];
        for (std::size_t y = xj + 1; y < domains[j]; ++y) {
          const std::size_t t = s + (y - xj) * stj;
          Kahan l1;
          for (std::size_t a = 0; a < domains[i]; ++a) {
            l1.add(std::abs(cond[s + a * sti] - cond[t + a * sti]));
          }
          best = std::max(best, 0.5 * l1.sum);
        }
      }
      entries.push_back({i, j, best});
    }
  }
  return InfluenceMatrix::from_entries(p, entries, "exact");
}

template <class Model>
std::vector<double> transition_impl(const Model& model, std::size_t i) {
  if (i >= model.size()) throw ConfigError("variable index out of range");
  const auto domains = domains_of(model);
  const auto strides = strides_of(domains);
  const std::vector<double> lp = log_potentials(model, kMaxTransitionStates);
  const std::size_t n = lp.size();
  const std::vector<double> cond = fiber_conditionals(lp, domains, strides, i);
  const std::size_t st = strides[i];
  std::vector<double> P(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t base = x - ((x / st) % domains[i]) * st;
    for (std::size_t a = 0; a < domains[i]; ++a) {
      const std::size_t y = base + a * st;
      P[x * n + y] = cond[y];
    }
  }
  return P;
}

template <class Model>
ExactDistribution step_impl(const Model& model, const Scan& scan,
                            const ExactDistribution& start) {
  const auto domains = domains_of(model);
  if (start.domains() != domains) {
    throw ConfigError("start distribution has a different state space");
  }
  if (scan.dimension() != model.size()) {
    throw ConfigError("scan dimension does not match model size");
  }
  const auto strides = strides_of(domains);
  const std::vector<double> lp = log_potentials(model, kMaxExactStates);
  const std::size_t n = lp.size();
  const std::size_t p = domains.size();
  std::vector<std::vector<double>> cond(p);
  auto conditionals = [&](std::size_t i) -> const std::vector<double>& {
    if (cond[i].empty()) cond[i] = fiber_conditionals(lp, domains, strides, i);
    return cond[i];
  };

  std::vector<double> mu = start.probs();
  std::vector<double> next(n), part(n);
  auto resample = [&](std::size_t i, std::span<double> out) {
    const auto& c = conditionals(i);
    const std::size_t st = strides[i];
    for (std::size_t s = 0; s < n; ++s) {
      if ((s / st) % domains[i] != 0) continue;
      Kahan mass;
      for (std::size_t a = 0; a < domains[i]; ++a) mass.add(mu[s + a * st]);
      for (std::size_t a = 0; a < domains[i]; ++a) out[s + a * st] = mass.sum * c[s + a * st];
    }
  };

  for (std::size_t t = 0; t < scan.length(); ++t) {
    const std::vector<double> q = scan.dense_step(t);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < p; ++i) {
      if (q[i] == 0.0) continue;
      if (q[i] == 1.0) {
        resample(i, next);
        continue;
      }
      resample(i, part);
      for (std::size_t s = 0; s < n; ++s) next[s] += q[i] * part[s];
    }
    mu.swap(next);
  }
  // Renormalize away rounding so the result passes the unit-mass check.
  Kahan total;
  for (double v : mu) total.add(v);
  for (double& v : mu) v /= total.sum;
  return ExactDistribution(domains, std::move(mu), start.spins());
}

}  // namespace

std::size_t state_count(std::span<const std::size_t> domains, std::size_t limit) {
  std::size_t n = 1;
  for (std::size_t d : domains) {
    if (d == 0) throw ConfigError("empty domain");
    if (n > limit / d) {
      throw SizeGuardError("state space exceeds the limit of " + std::to_string(limit) +
                           " states");
    }
    n *= d;
  }
  return n;
}

ExactDistribution::ExactDistribution(std::vector<std::size_t> domains,
                                     std::vector<double> probs, bool spins)
    : domains_(std::move(domains)), probs_(std::move(probs)), spins_(spins) {
  if (probs_.size() != state_count(domains_)) {
    throw ConfigError("probability vector does not match the state space");
  }
  Kahan total;
  for (double v : probs_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("probabilities must be finite and nonnegative");
    }
    total.add(v);
  }
  if (std::abs(total.sum - 1.0) > 1e-12) {
    throw ConfigError("probabilities sum to " + std::to_string(total.sum));
  }
}

ExactDistribution ExactDistribution::point_mass(std::vector<std::size_t> domains,
                                                std::span<const int> values, bool spins) {
  const std::size_t n = state_count(domains);
  ExactDistribution probe;
  probe.domains_ = domains;
  probe.spins_ = spins;
  std::vector<double> probs(n, 0.0);
  probs[probe.index_of(values)] = 1.0;
  return ExactDistribution(std::move(domains), std::move(probs), spins);
}

ExactDistribution ExactDistribution::uniform(std::vector<std::size_t> domains,
                                             bool spins) {
  const std::size_t n = state_count(domains);
  return ExactDistribution(std::move(domains),
                           std::vector<double>(n, 1.0 / static_cast<double>(n)), spins);
}

std::vector<int> ExactDistribution::values_of(std::size_t s) const {
  std::vector<int> v(domains_.size());
  for (std::size_t k = domains_.size(); k-- > 0;) {
    v[k] = value_of(s % domains_[k], spins_);
    s /= domains_[k];
  }
  return v;
}

std::size_t ExactDistribution::index_of(std::span<const int> values) const {
  if (values.size() != domains_.size()) throw ConfigError("state has the wrong length");
  std::size_t s = 0;
  for (std::size_t k = 0; k < domains_.size(); ++k) {
    const bool ok = spins_ ? (values[k] == 1 || values[k] == -1)
                           : (values[k] >= 0 &&
                              static_cast<std::size_t>(values[k]) < domains_[k]);
    if (!ok) throw ConfigError("value outside the domain of variable " + std::to_string(k));
    s = s * domains_[k] + digit_of(values[k], spins_);
  }
  return s;
}

double ExactDistribution::expectation(std::span<const std::size_t> members) const {
  Kahan total;
  for (std::size_t s = 0; s < probs_.size(); ++s) {
    if (probs_[s] == 0.0) continue;
    const std::vector<int> v = values_of(s);
    double f = 1.0;
    for (std::size_t k : members) f *= v[k];
    total.add(probs_[s] * f);
  }
  return total.sum;
}

std::size_t ExactDistribution::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t s = 0; s < probs_.size(); ++s) {
    if (probs_[s] == 0.0) continue;
    last = s;
    acc += probs_[s];
    if (u < acc) return s;
  }
  return last;
}

ExactDistribution enumerate_distribution(const BinaryPairwiseMrf& model) {
  return enumerate_impl(model);
}
ExactDistribution enumerate_distribution(const GeneralPairwiseMrf& model) {
  return enumerate_impl(model);
}
ExactDistribution enumerate_distribution(const HigherOrderBinaryMrf& model) {
  return enumerate_impl(model);
}

std::vector<double> exact_conditional(const BinaryPairwiseMrf& model, std::size_t i,
                                      std::span<const int> values) {
  return conditional_impl(model, i, values);
}
std::vector<double> exact_conditional(const GeneralPairwiseMrf& model, std::size_t i,
                                      std::span<const int> values) {
  return conditional_impl(model, i, values);
}
std::vector<double> exact_conditional(const HigherOrderBinaryMrf& model,
                                      std::size_t i, std::span<const int> values) {
  return conditional_impl(model, i, values);
}

InfluenceMatrix exact_influence(const BinaryPairwiseMrf& model) {
  return influence_impl(model);
}
InfluenceMatrix exact_influence(const GeneralPairwiseMrf& model) {
  return influence_impl(model);
}
InfluenceMatrix exact_influence(const HigherOrderBinaryMrf& model) {
  return influence_impl(model);
}

std::vector<double> single_site_transition(const BinaryPairwiseMrf& model,
                                           std::size_t i) {
  return transition_impl(model, i);
}
std::vector<double> single_site_transition(const GeneralPairwiseMrf& model,
                                           std::size_t i) {
  return transition_impl(model, i);
}
std::vector<double> single_site_transition(const HigherOrderBinaryMrf& model,
                                           std::size_t i) {
  return transition_impl(model, i);
}

ExactDistribution exact_step_distribution(const BinaryPairwiseMrf& model,
                                          const Scan& scan,
                                          const ExactDistribution& start) {
  return step_impl(model, scan, start);
}
ExactDistribution exact_step_distribution(const GeneralPairwiseMrf& model,
                                          const Scan& scan,
                                          const ExactDistribution& start) {
  return step_impl(model, scan, start);
}
ExactDistribution exact_step_distribution(const HigherOrderBinaryMrf& model,
                                          const Scan& scan,
                                          const ExactDistribution& start) {
  return step_impl(model, scan, start);
}

double exact_tv(const ExactDistribution& mu, const ExactDistribution& nu) {
  if (mu.domains() != nu.domains()) throw ConfigError("state spaces differ");
  Kahan total;
  for (std::size_t s = 0; s < mu.size(); ++s) total.add(std::abs(mu[s] - nu[s]));
  return 0.5 * total.sum;
}

double exact_marginal_tv(const ExactDistribution& mu, const ExactDistribution& nu,
                         std::span<const std::size_t> subset) {
  if (mu.domains() != nu.domains()) throw ConfigError("state spaces differ");
  const auto& domains = mu.domains();
  const auto strides = strides_of(domains);
  std::vector<std::size_t> sub_domains;
  for (std::size_t k : subset) {
    if (k >= domains.size()) throw ConfigError("marginal index out of range");
    sub_domains.push_back(domains[k]);
  }
  const std::size_t m = state_count(sub_domains);
  std::vector<Kahan> a(m), b(m);
  for (std::size_t s = 0; s < mu.size(); ++s) {
    std::size_t key = 0;
    for (std::size_t r = 0; r < subset.size(); ++r) {
      key = key * sub_domains[r] + (s / strides[subset[r]]) % domains[subset[r]];
    }
    a[key].add(mu[s]);
    b[key].add(nu[s]);
  }
  Kahan total;
  for (std::size_t k = 0; k < m; ++k) total.add(std::abs(a[k].sum - b[k].sum));
  return 0.5 * total.sum;
}

double dense_dobrushin_variation(const InfluenceMatrix& bound, const Scan& scan,
                                 std::span<const double> d) {
  const std::size_t p = bound.size();
  if (scan.dimension() != p || d.size() != p) throw ConfigError("dimension mismatch");
  std::vector<double> C(p * p, 0.0);
  for (const auto& e : bound.entries()) C[e.row * p + e.col] = e.value;

  std::vector<double> b(p, 1.0), next(p), B(p * p);
  for (std::size_t t = 0; t < scan.length(); ++t) {
    const std::vector<double> q = scan.dense_step(t);
    // B = I - diag(q) (I - C)
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        const double identity = i == j ? 1.0 : 0.0;
        B[i * p + j] = identity - q[i] * (identity - C[i * p + j]);
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) s += B[i * p + j] * b[j];
      next[i] = s;
    }
    b.swap(next);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p; ++i) s += d[i] * b[i];
  return s;
}

ExhaustiveResult exhaustive_best_scan(const InfluenceMatrix& bound,
                                      std::span<const double> d, std::size_t length) {
  const std::size_t p = bound.size();
  if (d.size() != p) throw ConfigError("weight vector has the wrong length");
  if (p == 0) throw ConfigError("empty influence matrix");
  const std::vector<std::size_t> digits(length, p);
  const std::size_t total = state_count(digits);

  ExhaustiveResult best;
  best.dv = INFINITY;
  std::vector<std::size_t> indices(length, 0);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t t = length; t-- > 0;) {
      indices[t] = c % p;
      c /= p;
    }
    Scan scan = Scan::deterministic(p, indices);
    const double dv = dense_dobrushin_variation(bound, scan, d);
    if (dv < best.dv) {
      best.dv = dv;
      best.scan = std::move(scan);
    }
  }
  return best;
}

}  // namespace dogs
