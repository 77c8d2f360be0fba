#include "dogs/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "dogs/error.hpp"

namespace dogs {

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_index(std::size_t i, std::size_t p) {
  if (i >= p) {
    throw ConfigError("variable " + std::to_string(i) + " out of range for p=" +
                      std::to_string(p));
  }
}

void check_state(std::span<const int> state, std::size_t p) {
  if (state.size() != p) {
    throw ConfigError("state has length " + std::to_string(state.size()) +
                      ", expected " + std::to_string(p));
  }
}

// Per-family single-site resampling, one uniform per call.
struct BinarySite {
  template <class Model>
  static void resample(const Model& m, std::size_t i, std::vector<int>& x, Rng& rng) {
    const double up = logistic(2.0 * m.local_field(i, x));
    x[i] = rng.uniform() < up ? 1 : -1;
  }
  template <class Model>
  static int random_value(const Model&, std::size_t, Rng& rng) {
    return rng.uniform() < 0.5 ? -1 : 1;
  }
  template <class Model>
  static int up_value(const Model&, std::size_t) {
    return 1;
  }
  template <class Model>
  static bool valid(const Model&, std::size_t, int v) {
    return v == 1 || v == -1;
  }
};

struct GeneralSite {
  static void resample(const GeneralPairwiseMrf& m, std::size_t i, std::vector<int>& x,
                       Rng& rng) {
    const std::vector<double> q = conditional_general(m, i, x);
    const double u = rng.uniform();
    double acc = 0.0;
    int value = static_cast<int>(q.size()) - 1;
    for (std::size_t a = 0; a < q.size(); ++a) {
      acc += q[a];
      if (u < acc) {
        value = static_cast<int>(a);
        break;
      }
    }
    x[i] = value;
  }
  static int random_value(const GeneralPairwiseMrf& m, std::size_t i, Rng& rng) {
    return static_cast<int>(rng.below(m.domain_size(i)));
  }
  static int up_value(const GeneralPairwiseMrf&, std::size_t) { return 0; }
  static bool valid(const GeneralPairwiseMrf& m, std::size_t i, int v) {
    return v >= 0 && static_cast<std::size_t>(v) < m.domain_size(i);
  }
};

template <class Site, class Model>
std::vector<int> initial_state(const Model& model, const StartSpec& start, Rng& rng) {
  const std::size_t p = model.size();
  std::vector<int> x(p);
  switch (start.kind) {
    case StartSpec::Kind::all_up:
      for (std::size_t i = 0; i < p; ++i) x[i] = Site::up_value(model, i);
      break;
    case StartSpec::Kind::uniform:
      for (std::size_t i = 0; i < p; ++i) x[i] = Site::random_value(model, i, rng);
      break;
    case StartSpec::Kind::given:
      check_state(start.state, p);
      for (std::size_t i = 0; i < p; ++i) {
        if (!Site::valid(model, i, start.state[i])) {
          throw ConfigError("start value " + std::to_string(start.state[i]) +
                            " outside the domain of variable " + std::to_string(i));
        }
      }
      x = start.state;
      break;
  }
  return x;
}

std::size_t draw_index(const ScanStep& step, std::size_t p, Rng& rng) {
  switch (step.type) {
    case ScanStep::Type::basis:
      return step.index;
    case ScanStep::Type::uniform:
      return rng.below(p);
    case ScanStep::Type::distribution: {
      const double u = rng.uniform();
      double acc = 0.0;
      std::size_t last = 0;
      for (std::size_t i = 0; i < p; ++i) {
        if (step.probs[i] == 0.0) continue;
        last = i;
        acc += step.probs[i];
        if (u < acc) return i;
      }
      return last;
    }
  }
  return 0;
}

template <class Site, class Model>
GibbsRun run_chain(const Model& model, const Scan& scan, const StartSpec& start,
                   std::uint64_t seed, const GibbsOptions& options) {
  const std::size_t p = model.size();
  if (scan.dimension() != p) {
    throw ConfigError("scan dimension " + std::to_string(scan.dimension()) +
                      " does not match model size " + std::to_string(p));
  }
  const std::size_t T = scan.length();
  if (options.keep_trajectory) {
    const double bytes = static_cast<double>(T + 1) * static_cast<double>(p) * sizeof(int);
    if (bytes > static_cast<double>(options.trajectory_budget_bytes)) {
      throw SizeGuardError("trajectory would need " + std::to_string(bytes) +
                           " bytes, budget is " +
                           std::to_string(options.trajectory_budget_bytes));
    }
  }

  Rng rng(seed);
  GibbsRun run;
  run.seed = seed;
  run.state = initial_state<Site>(model, start, rng);
  if (options.keep_trajectory) {
    run.trajectory.reserve(T + 1);
    run.trajectory.push_back(run.state);
  }
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t i = draw_index(scan.step(t), p, rng);
    Site::resample(model, i, run.state, rng);
    if (options.keep_trajectory) run.trajectory.push_back(run.state);
  }
  return run;
}

template <class Site, class Model>
Estimate estimate(const Model& model, const Scan& scan, const Feature& feature,
                  std::size_t replicates, std::uint64_t seed, const StartSpec& start,
                  std::size_t threads) {
  if (replicates < 2) throw ConfigError("need at least 2 replicates");
  for (std::size_t k : feature.members) check_index(k, model.size());
  const auto t0 = std::chrono::steady_clock::now();
  Estimate out;
  out.replicates = replicates;
  out.values.resize(replicates);
  out.seeds.resize(replicates);
  for (std::size_t r = 0; r < replicates; ++r) out.seeds[r] = derive_seed(seed, r);
  // Validate once up front so workers never throw.
  {
    Rng probe(0);
    (void)initial_state<Site>(model, start, probe);
    if (scan.dimension() != model.size()) {
      throw ConfigError("scan dimension does not match model size");
    }
  }
  parallel_for(replicates, threads, [&](std::size_t r) {
    const GibbsRun run = run_chain<Site>(model, scan, start, out.seeds[r], {});
    out.values[r] = feature(run.state);
  });

  double sum = 0.0;
  for (double v : out.values) sum += v;
  out.mean = sum / static_cast<double>(replicates);
  double ss = 0.0;
  for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
  const double variance = ss / static_cast<double>(replicates - 1);
  out.standard_error = std::sqrt(variance / static_cast<double>(replicates));
  out.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace

double conditional_binary(const BinaryPairwiseMrf& model, std::size_t i,
                          std::span<const int> state) {
  check_index(i, model.size());
  check_state(state, model.size());
  return logistic(2.0 * model.local_field(i, state));
}

double conditional_binary(const HigherOrderBinaryMrf& model, std::size_t i,
                          std::span<const int> state) {
  check_index(i, model.size());
  check_state(state, model.size());
  return logistic(2.0 * model.local_field(i, state));
}

std::vector<double> conditional_general(const GeneralPairwiseMrf& model,
                                        std::size_t i, std::span<const int> state) {
  check_index(i, model.size());
  check_state(state, model.size());
  const std::size_t n = model.domain_size(i);
  std::vector<double> q(n);
  double top = -INFINITY;
  for (std::size_t a = 0; a < n; ++a) {
    q[a] = model.site_score(i, a, state);
    top = std::max(top, q[a]);
  }
  double total = 0.0;
  for (double& v : q) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : q) v /= total;
  return q;
}

const char* StartSpec::name() const noexcept {
  switch (kind) {
    case Kind::all_up:
      return "all_up";
    case Kind::uniform:
      return "uniform";
    case Kind::given:
      return "given";
  }
  return "unknown";
}

StartSpec::Kind parse_start_kind(const std::string& name) {
  if (name == "all_up") return StartSpec::Kind::all_up;
  if (name == "uniform") return StartSpec::Kind::uniform;
  if (name == "given") return StartSpec::Kind::given;
  throw ConfigError("unknown start kind '" + name + "'");
}

double Feature::operator()(std::span<const int> state) const {
  double v = 1.0;
  for (std::size_t k : members) v *= state[k];
  return v;
}

GibbsRun run_gibbs(const BinaryPairwiseMrf& model, const Scan& scan,
                   const StartSpec& start, std::uint64_t seed,
                   const GibbsOptions& options) {
  return run_chain<BinarySite>(model, scan, start, seed, options);
}

GibbsRun run_gibbs(const GeneralPairwiseMrf& model, const Scan& scan,
                   const StartSpec& start, std::uint64_t seed,
                   const GibbsOptions& options) {
  return run_chain<GeneralSite>(model, scan, start, seed, options);
}

GibbsRun run_gibbs(const HigherOrderBinaryMrf& model, const Scan& scan,
                   const StartSpec& start, std::uint64_t seed,
                   const GibbsOptions& options) {
  return run_chain<BinarySite>(model, scan, start, seed, options);
}

Estimate estimate_expectation(const BinaryPairwiseMrf& model, const Scan& scan,
                              const Feature& feature, std::size_t replicates,
                              std::uint64_t seed, const StartSpec& start,
                              std::size_t threads) {
  return estimate<BinarySite>(model, scan, feature, replicates, seed, start, threads);
}

Estimate estimate_expectation(const GeneralPairwiseMrf& model, const Scan& scan,
                              const Feature& feature, std::size_t replicates,
                              std::uint64_t seed, const StartSpec& start,
                              std::size_t threads) {
  return estimate<GeneralSite>(model, scan, feature, replicates, seed, start, threads);
}

Estimate estimate_expectation(const HigherOrderBinaryMrf& model, const Scan& scan,
                              const Feature& feature, std::size_t replicates,
                              std::uint64_t seed, const StartSpec& start,
                              std::size_t threads) {
  return estimate<BinarySite>(model, scan, feature, replicates, seed, start, threads);
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    for (std::size_t r = 0; r < count; ++r) job(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < count; r = next++) job(r);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dogs
