#include "dogs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dogs/error.hpp"
#include "dogs/exact.hpp"
#include "dogs/gibbs.hpp"
#include "dogs/influence.hpp"
#include "dogs/optimizer.hpp"
#include "dogs/variation.hpp"

namespace dogs {

namespace {

std::vector<std::size_t> arithmetic(std::size_t first, std::size_t last, std::size_t step) {
  std::vector<std::size_t> g;
  for (std::size_t t = first; t <= last; t += step) g.push_back(t);
  return g;
}

std::vector<std::size_t> checked_grid(std::vector<std::size_t> grid,
                                      std::vector<std::size_t> fallback) {
  if (grid.empty()) grid = std::move(fallback);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty() || grid.front() == 0) throw ConfigError("grid lengths must be >= 1");
  return grid;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json source_json(const ParameterSource& s) {
  switch (s.kind) {
    case ParameterSource::Kind::constant:
      return {{"kind", "constant"}, {"value", s.low}};
    case ParameterSource::Kind::uniform:
      return {{"kind", "uniform"}, {"low", s.low}, {"high", s.high}};
    case ParameterSource::Kind::choice:
      return {{"kind", "choice"}, {"values", s.choices}};
  }
  return nullptr;
}

json lattice_json(const LatticeSpec& spec) {
  return {{"rows", spec.rows},
          {"cols", spec.cols},
          {"toroidal", spec.toroidal},
          {"coupling", source_json(spec.coupling)},
          {"unary", source_json(spec.unary)}};
}

// Curves, histogram and bias for d = e_target under one influence bound.
struct MarginalRun {
  std::vector<double> systematic, uniform, dogs, iterated;
  Scan final_dogs;
  std::vector<std::size_t> bias_lengths;
  std::vector<Estimate> bias_systematic, bias_dogs;
};

struct MarginalOptions {
  std::vector<std::size_t> grid;
  std::vector<std::size_t> bias_grid;
  bool uniform = true;
  bool iterated = true;
  bool systematic_bias = true;
  std::size_t replicates = 300;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

MarginalRun marginal_run(const BinaryPairwiseMrf& model, const InfluenceMatrix& bound,
                         std::size_t target, const MarginalOptions& opt) {
  const std::size_t p = model.size();
  const WeightVector d = WeightVector::unit(p, target);
  const std::size_t tmax = opt.grid.back();
  MarginalRun out;
  out.systematic = dv_at_lengths(Scan::systematic(p, tmax), d, bound, opt.grid);
  if (opt.uniform) out.uniform = dv_at_lengths(Scan::uniform(p, tmax), d, bound, opt.grid);

  std::vector<std::pair<std::size_t, Scan>> kept;
  for (std::size_t T : opt.grid) {
    OptimizedScan r = optimize_scan(Scan::systematic(p, T), d, bound);
    out.dogs.push_back(r.dv_after);
    if (opt.iterated) out.iterated.push_back(iterate_optimize(r.scan, d, bound).dv_after);
    if (T == tmax) out.final_dogs = r.scan;
    if (std::find(opt.bias_grid.begin(), opt.bias_grid.end(), T) != opt.bias_grid.end()) {
      kept.emplace_back(T, std::move(r.scan));
    }
  }

  const Feature feature = Feature::coordinate(target);
  for (std::size_t k = 0; k < opt.bias_grid.size(); ++k) {
    const std::size_t T = opt.bias_grid[k];
    auto it = std::find_if(kept.begin(), kept.end(), [&](const auto& e) { return e.first == T; });
    const Scan dogs_scan =
        it != kept.end() ? it->second : optimize_scan(Scan::systematic(p, T), d, bound).scan;
    out.bias_lengths.push_back(T);
    if (opt.systematic_bias) {
      out.bias_systematic.push_back(estimate_expectation(model, Scan::systematic(p, T), feature,
                                                         opt.replicates,
                                                         derive_seed(opt.seed, 2 * k),
                                                         StartSpec::all_up(), opt.threads));
    }
    out.bias_dogs.push_back(estimate_expectation(model, dogs_scan, feature, opt.replicates,
                                                 derive_seed(opt.seed, 2 * k + 1),
                                                 StartSpec::all_up(), opt.threads));
  }
  return out;
}

struct Histogram {
  std::vector<std::vector<std::size_t>> counts;  // [segment][distance]; segment 0 = all
  std::vector<double> mean_distance;             // per segment
};

Histogram distance_histogram(const Scan& scan, const LatticeSpec& spec, std::size_t target) {
  const std::size_t T = scan.length();
  std::size_t max_distance = 0;
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    max_distance = std::max(max_distance, spec.manhattan(i, target));
  }
  Histogram h;
  h.counts.assign(5, std::vector<std::size_t>(max_distance + 1, 0));
  std::vector<double> total(5, 0.0);
  std::vector<std::size_t> n(5, 0);
  for (std::size_t t = 0; t < T; ++t) {
    const ScanStep s = scan.step(t);
    if (s.type != ScanStep::Type::basis) continue;
    const std::size_t dist = spec.manhattan(s.index, target);
    const std::size_t quarter = 1 + std::min<std::size_t>(3, (4 * t) / std::max<std::size_t>(T, 1));
    for (std::size_t seg : {std::size_t{0}, quarter}) {
      ++h.counts[seg][dist];
      total[seg] += static_cast<double>(dist);
      ++n[seg];
    }
  }
  for (std::size_t seg = 0; seg < 5; ++seg) {
    h.mean_distance.push_back(n[seg] ? total[seg] / static_cast<double>(n[seg])
                                     : std::numeric_limits<double>::quiet_NaN());
  }
  return h;
}

const char* segment_name(std::size_t seg) {
  static const char* names[] = {"all", "q1", "q2", "q3", "q4"};
  return names[seg];
}

double pooled(const Estimate& a, const Estimate& b) {
  return std::sqrt(a.standard_error * a.standard_error + b.standard_error * b.standard_error);
}

}  // namespace

// ---------------------------------------------------------------------------

const CsvTable& ExperimentReport::table(const std::string& name) const {
  for (const auto& [n, t] : series) {
    if (n == name) return t;
  }
  throw ConfigError("report " + id + " has no series '" + name + "'");
}

json ExperimentReport::manifest() const {
  json files = json::array();
  for (const auto& [name, t] : series) {
    files.push_back({{"name", name},
                     {"file", id + "_" + name + ".csv"},
                     {"columns", t.columns()},
                     {"rows", t.rows()}});
  }
  return {{"id", id},
          {"config", config},
          {"summary", summary},
          {"environment", environment},
          {"series", std::move(files)}};
}

void ExperimentReport::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, t] : series) t.save(dir / (id + "_" + name + ".csv"));
  write_json(dir / "manifest.json", manifest());
}

json environment_metadata(std::size_t threads) {
  return {{"rng", Rng::kAlgorithm},
          {"threads", threads},
          {"hardware_concurrency", std::thread::hardware_concurrency()},
          {"compiler", __VERSION__}};
}

// ---------------------------------------------------------------------------

ExperimentReport exp_scan_evaluation(const ScanEvalConfig& config) {
  const auto grid = checked_grid(config.grid, arithmetic(50, 800, 50));
  if (config.seeds.empty()) throw ConfigError("need at least one seed");
  const LatticeSpec spec = LatticeSpec::random_field(config.rows, config.cols);

  ExperimentReport report;
  report.id = "scan_eval";
  report.config = {{"lattice", lattice_json(spec)}, {"grid", grid},
                   {"weights", config.weights}, {"seeds", config.seeds},
                   {"iterated", config.iterated}, {"init", "systematic"}};
  report.environment = environment_metadata(1);

  CsvTable curves({"seed", "T", "systematic", "uniform", "dogs", "iterated_dogs"});
  json per_seed = json::array();
  std::vector<double> improvements;
  bool all_below = true;
  bool all_ordered = true;
  for (std::uint64_t seed : config.seeds) {
    const BinaryPairwiseMrf model = lattice_ising(spec, seed);
    const InfluenceMatrix bound = influence_bound(model);
    const std::size_t p = model.size();
    const WeightVector d = parse_weights(config.weights, p);
    const auto verdict = ergodicity_check(bound);
    const std::size_t tmax = grid.back();
    const auto sys = dv_at_lengths(Scan::systematic(p, tmax), d, bound, grid);
    const auto uni = dv_at_lengths(Scan::uniform(p, tmax), d, bound, grid);
    std::vector<double> dogs, iter;
    bool below = true;
    bool ordered = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const OptimizedScan r = optimize_scan(Scan::systematic(p, grid[k]), d, bound);
      dogs.push_back(r.dv_after);
      iter.push_back(config.iterated ? iterate_optimize(r.scan, d, bound).dv_after : r.dv_after);
      below = below && sys[k] < uni[k];
      ordered = ordered && iter[k] <= dogs[k] + 1e-12 && dogs[k] <= sys[k] + 1e-12;
      curves.row().add(std::to_string(seed)).add(grid[k]).add(sys[k]).add(uni[k]).add(dogs[k]).add(iter[k]);
    }
    const double improvement = sys.back() / dogs.back();
    improvements.push_back(improvement);
    all_below = all_below && below;
    all_ordered = all_ordered && ordered;
    per_seed.push_back({{"seed", seed},
                        {"norm", verdict.norm},
                        {"systematic_final", sys.back()},
                        {"uniform_final", uni.back()},
                        {"dogs_final", dogs.back()},
                        {"iterated_final", iter.back()},
                        {"best_systematic", *std::min_element(sys.begin(), sys.end())},
                        {"best_uniform", *std::min_element(uni.begin(), uni.end())},
                        {"best_dogs", *std::min_element(dogs.begin(), dogs.end())},
                        {"best_iterated", *std::min_element(iter.begin(), iter.end())},
                        {"improvement", number_or_null(improvement)},
                        {"systematic_below_uniform", below},
                        {"ordered", ordered}});
  }
  report.summary = {{"per_seed", per_seed},
                    {"median_improvement", number_or_null(median(improvements))},
                    {"min_improvement",
                     number_or_null(*std::min_element(improvements.begin(), improvements.end()))},
                    {"systematic_below_uniform", all_below},
                    {"iterated_le_dogs_le_systematic", all_ordered}};
  report.series.emplace_back("dv_curves", std::move(curves));
  return report;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_wall_clock(const WallClockConfig& config) {
  LatticeSpec spec = LatticeSpec::random_field(config.rows, config.cols);
  if (config.symmetric) spec.unary = ParameterSource::fixed(0.0);
  if (config.samples < 2) throw ConfigError("need at least 2 samples");
  const BinaryPairwiseMrf model = lattice_ising(spec, config.seed);
  const std::size_t p = model.size();
  if (config.target >= p) throw ConfigError("target out of range");
  const InfluenceMatrix bound = influence_bound(model);
  const WeightVector d = WeightVector::unit(p, config.target);
  const Scan reference = Scan::systematic(p, config.reference_length);

  const OptimizedScan selected = length_doubling_select(reference, d, bound);
  const double setup_ms = selected.wall_time_ms;

  const Feature feature = Feature::coordinate(config.target);
  const Estimate sys = estimate_expectation(model, reference, feature, config.samples,
                                            derive_seed(config.seed, 0), StartSpec::all_up(), 1);
  const Estimate dogs = estimate_expectation(model, selected.scan, feature, config.samples,
                                             derive_seed(config.seed, 1), StartSpec::all_up(), 1);
  const double step_ms =
      sys.wall_time_ms / (static_cast<double>(config.samples) * static_cast<double>(reference.length()));

  ExperimentReport report;
  report.id = "wall_clock";
  report.config = {{"lattice", lattice_json(spec)},
                   {"model_seed", config.seed},
                   {"reference", "systematic"},
                   {"reference_length", config.reference_length},
                   {"target", config.target},
                   {"samples", config.samples},
                   {"start", "all_up"}};
  report.environment = environment_metadata(1);

  CsvTable estimates({"sampler", "n", "wall_clock_ms", "estimate"});
  auto add_series = [&](const char* name, const Estimate& e, double setup, std::size_t length) {
    double sum = 0.0;
    for (std::size_t n = 1; n <= e.values.size(); ++n) {
      sum += e.values[n - 1];
      const double clock = setup + static_cast<double>(n * length) * step_ms;
      estimates.row().add(std::string(name)).add(n).add(clock).add(sum / static_cast<double>(n));
    }
  };
  add_series("systematic", sys, 0.0, reference.length());
  add_series("dogs", dogs, setup_ms, selected.scan.length());

  CsvTable speedup({"n", "speedup"});
  std::vector<double> speedups;
  for (std::size_t n = 1; n <= config.samples; ++n) {
    const double base = static_cast<double>(n * reference.length()) * step_ms;
    const double fast = setup_ms + static_cast<double>(n * selected.scan.length()) * step_ms;
    speedups.push_back(base / fast);
    speedup.row().add(n).add(base / fast);
  }
  const bool monotone = std::is_sorted(speedups.begin(), speedups.end());

  const double truth = config.symmetric ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  report.summary = {{"accepted_length", selected.accepted_length},
                    {"reference_dv", selected.reference_dv},
                    {"dogs_dv", selected.dv_after},
                    {"setup_ms", setup_ms},
                    {"step_us", 1000.0 * step_ms},
                    {"speedup_limit", static_cast<double>(reference.length()) /
                                          static_cast<double>(selected.scan.length())},
                    {"speedup_final", speedups.back()},
                    {"speedup_monotone", monotone},
                    {"systematic_estimate", sys.mean},
                    {"systematic_stderr", sys.standard_error},
                    {"dogs_estimate", dogs.mean},
                    {"dogs_stderr", dogs.standard_error},
                    {"exact_target", number_or_null(truth)}};
  report.series.emplace_back("estimates", std::move(estimates));
  report.series.emplace_back("speedup", std::move(speedup));
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// Sufficient statistics of a binary pairwise model: one feature per edge
// (x_i x_j) and one per site (x_i).
struct MleProblem {
  std::vector<Coupling> edges;
  std::size_t p = 0;

  std::size_t dim() const { return edges.size() + p; }

  BinaryPairwiseMrf model(std::span<const double> theta) const {
    std::vector<Coupling> c = edges;
    for (std::size_t e = 0; e < c.size(); ++e) c[e].theta = theta[e];
    return BinaryPairwiseMrf::build(
        c, std::vector<double>(theta.begin() + static_cast<std::ptrdiff_t>(edges.size()), theta.end()));
  }

  void accumulate(std::span<const int> x, std::span<double> out, double weight) const {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      out[e] += weight * x[edges[e].i] * x[edges[e].j];
    }
    for (std::size_t i = 0; i < p; ++i) out[edges.size() + i] += weight * x[i];
  }
};

// Exact maximum-likelihood fit to the given moments by damped Newton steps
// on the enumerated log-partition function.
std::vector<double> exact_mle(const MleProblem& prob, std::span<const double> moments) {
  const std::size_t K = prob.dim();
  const std::vector<std::size_t> domains(prob.p, 2);
  const std::size_t n = state_count(domains);
  std::vector<std::vector<int>> states(n);
  {
    const ExactDistribution probe = ExactDistribution::uniform(domains, true);
    for (std::size_t s = 0; s < n; ++s) states[s] = probe.values_of(s);
  }
  std::vector<double> features(n * K, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    prob.accumulate(states[s], std::span<double>(features.data() + s * K, K), 1.0);
  }

  auto evaluate = [&](std::span<const double> theta, std::vector<double>* mean,
                      std::vector<double>* cov) {
    std::vector<double> lp(n);
    double top = -INFINITY;
    for (std::size_t s = 0; s < n; ++s) {
      double v = 0.0;
      for (std::size_t k = 0; k < K; ++k) v += theta[k] * features[s * K + k];
      lp[s] = v;
      top = std::max(top, v);
    }
    double z = 0.0;
    for (double& v : lp) {
      v = std::exp(v - top);
      z += v;
    }
    if (mean) {
      mean->assign(K, 0.0);
      for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t k = 0; k < K; ++k) (*mean)[k] += lp[s] / z * features[s * K + k];
      }
    }
    if (cov) {
      cov->assign(K * K, 0.0);
      for (std::size_t s = 0; s < n; ++s) {
        const double w = lp[s] / z;
        for (std::size_t a = 0; a < K; ++a) {
          const double fa = features[s * K + a] - (*mean)[a];
          for (std::size_t b = 0; b < K; ++b) {
            (*cov)[a * K + b] += w * fa * (features[s * K + b] - (*mean)[b]);
          }
        }
      }
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < K; ++k) dot += theta[k] * moments[k];
    return dot - (top + std::log(z));  // average log-likelihood
  };

  std::vector<double> theta(K, 0.0), mean, cov;
  double ll = evaluate(theta, &mean, &cov);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> g(K);
    double gmax = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      g[k] = moments[k] - mean[k];
      gmax = std::max(gmax, std::abs(g[k]));
    }
    if (gmax < 1e-12) break;
    // Solve (cov + tiny I) step = g by Gaussian elimination with pivoting.
    std::vector<double> A = cov, x = g;
    for (std::size_t k = 0; k < K; ++k) A[k * K + k] += 1e-12;
    for (std::size_t c = 0; c < K; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < K; ++r) {
        if (std::abs(A[r * K + c]) > std::abs(A[piv * K + c])) piv = r;
      }
      if (piv != c) {
        for (std::size_t k = 0; k < K; ++k) std::swap(A[c * K + k], A[piv * K + k]);
        std::swap(x[c], x[piv]);
      }
      for (std::size_t r = c + 1; r < K; ++r) {
        const double f = A[r * K + c] / A[c * K + c];
        for (std::size_t k = c; k < K; ++k) A[r * K + k] -= f * A[c * K + k];
        x[r] -= f * x[c];
      }
    }
    for (std::size_t c = K; c-- > 0;) {
      for (std::size_t k = c + 1; k < K; ++k) x[c] -= A[c * K + k] * x[k];
      x[c] /= A[c * K + c];
    }
    double step = 1.0;
    for (;;) {
      std::vector<double> trial(K);
      for (std::size_t k = 0; k < K; ++k) trial[k] = theta[k] + step * x[k];
      std::vector<double> m2, c2;
      const double ll2 = evaluate(trial, &m2, &c2);
      if (ll2 >= ll - 1e-15 || step < 1e-8) {
        theta = std::move(trial);
        mean = std::move(m2);
        cov = std::move(c2);
        ll = ll2;
        break;
      }
      step *= 0.5;
    }
  }
  return theta;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace

ExperimentReport exp_mle(const MleConfig& config) {
  if (config.training_samples < 1 || config.gradient_steps < 1 || config.gibbs_steps < 1 ||
      config.runs < 1) {
    throw ConfigError("MLE counts must be >= 1");
  }
  if (!(config.epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  if (!(config.step_size > 0.0) || !std::isfinite(config.step_size)) {
    throw ConfigError("step size must be positive and finite");
  }
  for (const auto& policy : config.policies) {
    if (policy != "uniform" && policy != "dogs" && policy != "exact") {
      throw ConfigError("unknown scan policy '" + policy + "'");
    }
  }
  LatticeSpec spec;
  spec.rows = config.rows;
  spec.cols = config.cols;
  spec.coupling = config.coupling;
  spec.unary = config.unary;
  const BinaryPairwiseMrf truth = lattice_ising(spec, config.model_seed);
  const std::size_t p = truth.size();

  MleProblem prob;
  prob.edges = truth.couplings();
  prob.p = p;
  const std::size_t K = prob.dim();

  // Training data.
  std::vector<double> moments(K, 0.0);
  {
    Rng rng(config.data_seed);
    const double w = 1.0 / static_cast<double>(config.training_samples);
    if (config.rademacher_data) {
      std::vector<int> x(p);
      for (std::size_t s = 0; s < config.training_samples; ++s) {
        for (auto& v : x) v = rng.uniform() < 0.5 ? -1 : 1;
        prob.accumulate(x, moments, w);
      }
    } else {
      const ExactDistribution pi = enumerate_distribution(truth);
      for (std::size_t s = 0; s < config.training_samples; ++s) {
        prob.accumulate(pi.values_of(pi.sample(rng)), moments, w);
      }
    }
  }
  const std::vector<double> optimum = exact_mle(prob, moments);

  struct RunResult {
    std::vector<double> errors;
    bool diverged = false;
  };
  const std::size_t runs_per_policy = config.seeds.size();
  std::vector<RunResult> results(config.policies.size() * runs_per_policy);

  parallel_for(results.size(), config.threads, [&](std::size_t job) {
    const std::string& policy = config.policies[job / runs_per_policy];
    const std::uint64_t run_seed = config.seeds[job % runs_per_policy];
    RunResult& out = results[job];
    std::vector<double> theta(K, 0.0);
    const Scan uniform = Scan::uniform(p, config.gibbs_steps);
    const WeightVector ones = WeightVector::ones(p);
    OptimizerConfig oc;
    oc.epsilon = config.epsilon;
    for (std::size_t g = 0; g < config.gradient_steps; ++g) {
      const BinaryPairwiseMrf current = prob.model(theta);
      Scan scan = uniform;
      if (policy == "exact") scan = Scan::systematic(p, 0);
      else if (policy == "dogs") scan = optimize_scan(uniform, ones, influence_bound(current), oc).scan;
      std::vector<double> model_moments(K, 0.0);
      const double w = 1.0 / static_cast<double>(config.runs);
      if (policy == "exact") {
        const ExactDistribution pi = enumerate_distribution(current);
        for (std::size_t s = 0; s < pi.size(); ++s) {
          prob.accumulate(pi.values_of(s), model_moments, pi[s]);
        }
      }
      for (std::size_t r = 0; policy != "exact" && r < config.runs; ++r) {
        const GibbsRun chain = run_gibbs(current, scan, StartSpec::uniform(),
                                         derive_seed(run_seed, g * config.runs + r));
        prob.accumulate(chain.state, model_moments, w);
      }
      bool finite = true;
      for (std::size_t k = 0; k < K; ++k) {
        theta[k] += config.step_size * (moments[k] - model_moments[k]);
        finite = finite && std::isfinite(theta[k]);
      }
      // An error that overflows is as unusable as a non-finite parameter.
      const double error = finite ? distance(theta, optimum) : 0.0;
      if (!finite || !std::isfinite(error)) {
        out.diverged = true;
        break;
      }
      out.errors.push_back(error);
    }
  });

  ExperimentReport report;
  report.id = "mle";
  report.config = {{"lattice", lattice_json(spec)},
                   {"model_seed", config.model_seed},
                   {"data_seed", config.data_seed},
                   {"training_samples", config.training_samples},
                   {"data", config.rademacher_data ? "rademacher" : "true_model"},
                   {"gradient_steps", config.gradient_steps},
                   {"gibbs_steps", config.gibbs_steps},
                   {"runs", config.runs},
                   {"step_size", config.step_size},
                   {"epsilon", config.epsilon},
                   {"error_threshold", config.error_threshold},
                   {"policies", config.policies},
                   {"seeds", config.seeds},
                   {"start", "uniform"},
                   {"optimum", "exact MLE of the training moments"}};
  report.environment = environment_metadata(config.threads);

  CsvTable trajectory({"policy", "run", "gradient_step", "gibbs_steps", "error"});
  json per_policy = json::object();
  const double per_step = static_cast<double>(config.gibbs_steps * config.runs);
  std::vector<double> medians;
  for (std::size_t pi = 0; pi < config.policies.size(); ++pi) {
    std::vector<double> reach;
    json runs = json::array();
    for (std::size_t r = 0; r < runs_per_policy; ++r) {
      const RunResult& res = results[pi * runs_per_policy + r];
      double hit = INFINITY;
      for (std::size_t g = 0; g < res.errors.size(); ++g) {
        const double steps = static_cast<double>(g + 1) * per_step;
        trajectory.row()
            .add(config.policies[pi])
            .add(r)
            .add(g + 1)
            .add(steps)
            .add(res.errors[g]);
        if (!std::isfinite(hit) && res.errors[g] <= config.error_threshold) hit = steps;
      }
      reach.push_back(hit);
      runs.push_back({{"seed", config.seeds[r]},
                      {"steps_to_threshold", number_or_null(hit)},
                      {"final_error", res.errors.empty() ? json(nullptr) : json(res.errors.back())},
                      {"diverged", res.diverged}});
    }
    medians.push_back(median(reach));
    per_policy[config.policies[pi]] = {{"runs", runs},
                                       {"median_steps_to_threshold", number_or_null(medians.back())}};
  }
  report.summary = {{"policies", per_policy},
                    {"optimum_norm", distance(optimum, std::vector<double>(K, 0.0))},
                    {"parameters", K}};
  if (config.policies.size() == 2 && config.policies[0] == "uniform" &&
      config.policies[1] == "dogs") {
    report.summary["dogs_faster"] = std::isfinite(medians[1]) && medians[1] < medians[0];
  }
  report.series.emplace_back("trajectory", std::move(trajectory));
  return report;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_marginal(const MarginalConfig& config) {
  const LatticeSpec spec =
      LatticeSpec::constant(config.rows, config.cols, config.coupling, config.toroidal);
  const BinaryPairwiseMrf model = lattice_ising(spec, config.seed);
  if (config.target >= model.size()) throw ConfigError("target out of range");
  const InfluenceMatrix bound = influence_bound(model);

  MarginalOptions opt;
  opt.grid = checked_grid(config.grid, arithmetic(1000, 16000, 1000));
  opt.bias_grid = checked_grid(config.bias_grid, {4000, 8000, 16000});
  opt.uniform = config.uniform;
  opt.iterated = config.iterated;
  opt.replicates = config.replicates;
  opt.seed = config.seed;
  opt.threads = config.threads;
  const MarginalRun run = marginal_run(model, bound, config.target, opt);
  const Histogram hist = distance_histogram(run.final_dogs, spec, config.target);

  ExperimentReport report;
  report.id = "marginal";
  report.config = {{"lattice", lattice_json(spec)},
                   {"target", config.target},
                   {"grid", opt.grid},
                   {"bias_grid", opt.bias_grid},
                   {"replicates", config.replicates},
                   {"seed", config.seed},
                   {"start", "all_up"},
                   {"init", "systematic"},
                   {"exact_target", 0.0}};
  report.environment = environment_metadata(config.threads);

  CsvTable curves({"T", "systematic", "uniform", "dogs", "iterated_dogs"});
  for (std::size_t k = 0; k < opt.grid.size(); ++k) {
    curves.row().add(opt.grid[k]).add(run.systematic[k]);
    curves.add(config.uniform ? format_number(run.uniform[k]) : std::string());
    curves.add(run.dogs[k]);
    curves.add(config.iterated ? format_number(run.iterated[k]) : std::string());
  }
  CsvTable histogram({"segment", "distance", "count"});
  for (std::size_t seg = 0; seg < hist.counts.size(); ++seg) {
    for (std::size_t dist = 0; dist < hist.counts[seg].size(); ++dist) {
      histogram.row().add(std::string(segment_name(seg))).add(dist).add(hist.counts[seg][dist]);
    }
  }
  CsvTable bias({"method", "T", "mean", "stderr"});
  json bias_points = json::array();
  bool bias_ok = true;
  for (std::size_t k = 0; k < run.bias_lengths.size(); ++k) {
    const Estimate& s = run.bias_systematic[k];
    const Estimate& g = run.bias_dogs[k];
    bias.row().add(std::string("systematic")).add(run.bias_lengths[k]).add(s.mean).add(s.standard_error);
    bias.row().add(std::string("dogs")).add(run.bias_lengths[k]).add(g.mean).add(g.standard_error);
    const bool ok = std::abs(g.mean) <= std::abs(s.mean) + 2.0 * pooled(s, g);
    bias_ok = bias_ok && ok;
    bias_points.push_back({{"T", run.bias_lengths[k]},
                           {"systematic_bias", std::abs(s.mean)},
                           {"dogs_bias", std::abs(g.mean)},
                           {"pooled_stderr", pooled(s, g)},
                           {"dogs_within", ok}});
  }
  const double ratio = run.dogs.back() / run.systematic.back();
  report.summary = {{"norm", ergodicity_check(bound).norm},
                    {"systematic_final", run.systematic.back()},
                    {"uniform_final", config.uniform ? json(run.uniform.back()) : json(nullptr)},
                    {"dogs_final", run.dogs.back()},
                    {"iterated_final", config.iterated ? json(run.iterated.back()) : json(nullptr)},
                    {"dogs_to_systematic", ratio},
                    {"distance0_count", hist.counts[0][0]},
                    {"quarter_mean_distance",
                     {number_or_null(hist.mean_distance[1]), number_or_null(hist.mean_distance[2]),
                      number_or_null(hist.mean_distance[3]), number_or_null(hist.mean_distance[4])}},
                    {"bias", bias_points},
                    {"dogs_bias_within", bias_ok}};
  report.series.emplace_back("dv_curves", std::move(curves));
  report.series.emplace_back("histogram", std::move(histogram));
  report.series.emplace_back("bias", std::move(bias));
  return report;
}

ExperimentReport exp_loose_bound(const LooseBoundConfig& config) {
  if (config.factors.empty()) throw ConfigError("need at least one factor");
  const LatticeSpec spec =
      LatticeSpec::constant(config.rows, config.cols, config.coupling, config.toroidal);
  const BinaryPairwiseMrf model = lattice_ising(spec, config.seed);
  if (config.target >= model.size()) throw ConfigError("target out of range");
  const InfluenceMatrix base = influence_bound(model);

  MarginalOptions opt;
  opt.grid = checked_grid(config.grid, arithmetic(500, 8000, 500));
  opt.bias_grid = checked_grid(config.bias_grid, {1000, 2000, 4000});
  opt.uniform = false;
  opt.iterated = false;
  opt.replicates = config.replicates;
  opt.threads = config.threads;

  std::vector<MarginalRun> runs;
  for (std::size_t f = 0; f < config.factors.size(); ++f) {
    opt.seed = derive_seed(config.seed, f);
    opt.systematic_bias = f == 0;
    runs.push_back(marginal_run(model, scale_bound(base, config.factors[f]), config.target, opt));
  }

  ExperimentReport report;
  report.id = "loose_bound";
  report.config = {{"lattice", lattice_json(spec)},
                   {"target", config.target},
                   {"factors", config.factors},
                   {"grid", opt.grid},
                   {"bias_grid", opt.bias_grid},
                   {"replicates", config.replicates},
                   {"seed", config.seed},
                   {"start", "all_up"},
                   {"init", "systematic"},
                   {"exact_target", 0.0}};
  report.environment = environment_metadata(config.threads);

  CsvTable curves({"factor", "T", "systematic", "dogs"});
  CsvTable bias({"factor", "method", "T", "mean", "stderr"});
  for (std::size_t f = 0; f < runs.size(); ++f) {
    for (std::size_t k = 0; k < opt.grid.size(); ++k) {
      curves.row().add(config.factors[f]).add(opt.grid[k]).add(runs[f].systematic[k]).add(runs[f].dogs[k]);
    }
    for (std::size_t k = 0; k < runs[f].bias_lengths.size(); ++k) {
      if (f == 0) {
        const Estimate& s = runs[0].bias_systematic[k];
        bias.row().add(config.factors[f]).add(std::string("systematic")).add(runs[f].bias_lengths[k])
            .add(s.mean).add(s.standard_error);
      }
      const Estimate& g = runs[f].bias_dogs[k];
      bias.row().add(config.factors[f]).add(std::string("dogs")).add(runs[f].bias_lengths[k])
          .add(g.mean).add(g.standard_error);
    }
  }

  // Curves must not decrease as the factor grows (factors sorted ascending).
  std::vector<std::size_t> order(runs.size());
  for (std::size_t f = 0; f < order.size(); ++f) order[f] = f;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return config.factors[a] < config.factors[b]; });
  bool dogs_monotone = true, systematic_monotone = true;
  for (std::size_t r = 1; r < order.size(); ++r) {
    const auto& lo = runs[order[r - 1]];
    const auto& hi = runs[order[r]];
    for (std::size_t k = 0; k < opt.grid.size(); ++k) {
      dogs_monotone = dogs_monotone && lo.dogs[k] <= hi.dogs[k];
      systematic_monotone = systematic_monotone && lo.systematic[k] <= hi.systematic[k];
    }
  }

  json comparisons = json::array();
  bool bias_ok = true;
  const std::size_t base_index = order.front();
  for (std::size_t f = 0; f < runs.size(); ++f) {
    if (f == base_index) continue;
    for (std::size_t k = 0; k < opt.bias_grid.size(); ++k) {
      const Estimate& a = runs[base_index].bias_dogs[k];
      const Estimate& b = runs[f].bias_dogs[k];
      const double gap = std::abs(std::abs(b.mean) - std::abs(a.mean));
      const bool ok = gap <= 2.0 * pooled(a, b);
      if (f == order.back()) bias_ok = bias_ok && ok;
      comparisons.push_back({{"factor", config.factors[f]},
                             {"T", opt.bias_grid[k]},
                             {"bias", std::abs(b.mean)},
                             {"base_bias", std::abs(a.mean)},
                             {"pooled_stderr", pooled(a, b)},
                             {"within", ok}});
    }
  }
  json finals = json::array();
  for (std::size_t f = 0; f < runs.size(); ++f) {
    finals.push_back({{"factor", config.factors[f]},
                      {"systematic_final", runs[f].systematic.back()},
                      {"dogs_final", runs[f].dogs.back()}});
  }
  report.summary = {{"norm", ergodicity_check(base).norm},
                    {"finals", finals},
                    {"dogs_monotone_in_factor", dogs_monotone},
                    {"systematic_monotone_in_factor", systematic_monotone},
                    {"bias_comparisons", comparisons},
                    {"largest_factor_bias_within", bias_ok}};
  report.series.emplace_back("dv_curves", std::move(curves));
  report.series.emplace_back("bias", std::move(bias));
  return report;
}

}  // namespace dogs
