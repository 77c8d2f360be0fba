// dogs: command-line front end for influence bounds, Dobrushin variation,
// scan optimization, Gibbs sampling, exact oracles and the experiments.
//
// Exit codes: 0 success, 2 bad input, 3 size guard, 4 consistency failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dogs/error.hpp"
#include "dogs/exact.hpp"
#include "dogs/experiments.hpp"
#include "dogs/gibbs.hpp"
#include "dogs/influence.hpp"
#include "dogs/io.hpp"
#include "dogs/model.hpp"
#include "dogs/optimizer.hpp"
#include "dogs/scan.hpp"
#include "dogs/variation.hpp"

namespace fs = std::filesystem;
using namespace dogs;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::size_t threads = 1;
};

// Writes `name`.json (or .csv when --format csv and a table exists) under
// --out, or to stdout when no directory was given.
void emit(const Globals& g, const std::string& name, const json& j,
          const CsvTable* table = nullptr) {
  const bool csv = g.format == "csv" && table != nullptr;
  if (g.out.empty()) {
    if (csv) {
      table->write(std::cout);
    } else {
      std::cout << j.dump(2) << "\n";
    }
    return;
  }
  fs::create_directories(g.out);
  if (csv) {
    table->save(fs::path(g.out) / (name + ".csv"));
  } else {
    write_json(fs::path(g.out) / (name + ".json"), j);
  }
}

AnyModel load_model(const std::string& path) { return model_from_json(read_json(path)); }

// "systematic:T", "uniform:T", or a scan JSON file.
Scan parse_scan(const std::string& text, std::size_t p) {
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string kind = text.substr(0, colon);
    std::size_t length = 0;
    try {
      length = std::stoul(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad scan length in '" + text + "'");
    }
    if (kind == "systematic") return Scan::systematic(p, length);
    if (kind == "uniform") return Scan::uniform(p, length);
    throw ConfigError("unknown scan kind '" + kind + "'");
  }
  // Optimizer output files wrap the scan next to their report.
  const json j = read_json(text);
  Scan scan = scan_from_json(j.contains("scan") ? j.at("scan") : j);
  if (scan.dimension() != p) throw ConfigError("scan dimension does not match");
  return scan;
}

StartSpec parse_start(const std::string& text) {
  StartSpec s;
  s.kind = parse_start_kind(text);
  if (s.kind == StartSpec::Kind::given) {
    throw ConfigError("a given start state is only available through the library");
  }
  return s;
}

ExactDistribution start_distribution(const AnyModel& model, const StartSpec& start) {
  return std::visit(
      [&](const auto& m) {
        std::vector<std::size_t> domains(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) domains[i] = m.domain_size(i);
        const bool spins = !std::is_same_v<std::decay_t<decltype(m)>, GeneralPairwiseMrf>;
        if (start.kind == StartSpec::Kind::uniform) {
          return ExactDistribution::uniform(domains, spins);
        }
        std::vector<int> values(m.size(), spins ? 1 : 0);
        return ExactDistribution::point_mass(domains, values, spins);
      },
      model);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) v.push_back(std::stod(item));
  }
  return v;
}

void report_out(const Globals& g, const ExperimentReport& r) {
  if (g.out.empty()) {
    if (g.format == "csv" && !r.series.empty()) {
      for (const auto& [name, table] : r.series) {
        std::cout << "# " << r.id << "_" << name << "\n";
        table.write(std::cout);
      }
    } else {
      std::cout << r.manifest().dump(2) << "\n";
    }
    return;
  }
  r.save(g.out);
  std::cout << r.summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dobrushin-optimized Gibbs sampling toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory (default: stdout)");
  app.add_option("--format", g.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  // model ---------------------------------------------------------------
  auto* model_cmd = app.add_subcommand("model", "Generate or validate models");
  model_cmd->require_subcommand(1);
  auto* gen = model_cmd->add_subcommand("gen", "Generate a grid Ising model");
  std::string preset = "random-field";
  std::size_t rows = 10, cols = 10;
  double coupling = 0.25;
  bool toroidal = false;
  gen->add_option("--preset", preset, "random-field or constant")
      ->check(CLI::IsMember({"random-field", "constant"}))
      ->capture_default_str();
  gen->add_option("--rows", rows)->capture_default_str();
  gen->add_option("--cols", cols)->capture_default_str();
  gen->add_option("--coupling", coupling, "Constant preset coupling")->capture_default_str();
  gen->add_flag("--toroidal", toroidal, "Constant preset wraps around");
  gen->callback([&] {
    const LatticeSpec spec = preset == "constant"
                                 ? LatticeSpec::constant(rows, cols, coupling, toroidal)
                                 : LatticeSpec::random_field(rows, cols);
    emit(g, "model", model_to_json(AnyModel{lattice_ising(spec, g.seed)}));
  });

  auto* validate = model_cmd->add_subcommand("validate", "Check a model file");
  std::string model_path;
  validate->add_option("model", model_path)->required();
  validate->callback([&] {
    const AnyModel m = load_model(model_path);
    const std::size_t blanket =
        std::visit([](const auto& x) { return x.max_blanket_size(); }, m);
    emit(g, "validate",
         {{"valid", true}, {"kind", model_kind(m)}, {"p", model_size(m)},
          {"max_blanket", blanket}});
  });

  // influence -----------------------------------------------------------
  auto* infl = app.add_subcommand("influence", "Influence bounds");
  infl->require_subcommand(1);
  auto* compute = infl->add_subcommand("compute", "Closed-form bound for a model");
  bool with_norm = false;
  compute->add_option("model", model_path)->required();
  compute->add_flag("--norm", with_norm, "Also report the spectral norm");
  compute->callback([&] {
    const AnyModel m = load_model(model_path);
    const InfluenceMatrix c = std::visit([](const auto& x) { return influence_bound(x); }, m);
    json j = influence_to_json(c);
    if (with_norm) {
      const auto v = ergodicity_check(c);
      j["norm"] = v.norm;
      j["in_regime"] = v.in_regime;
    }
    CsvTable t({"row", "col", "value"});
    for (const auto& e : c.entries()) t.row().add(e.row).add(e.col).add(e.value);
    emit(g, "influence", j, &t);
  });

  auto* scale = infl->add_subcommand("scale", "Multiply a bound by a factor");
  std::string bound_path;
  double factor = 1.0;
  scale->add_option("bound", bound_path)->required();
  scale->add_option("--factor", factor)->required();
  scale->callback([&] {
    emit(g, "influence", influence_to_json(scale_bound(influence_from_json(read_json(bound_path)), factor)));
  });

  // dv ------------------------------------------------------------------
  auto* dv_cmd = app.add_subcommand("dv", "Dobrushin variation");
  dv_cmd->require_subcommand(1);
  auto* eval = dv_cmd->add_subcommand("eval", "Evaluate the DV of a scan");
  std::string scan_text, weights_text = "ones", trace_path;
  eval->add_option("--bound", bound_path)->required();
  eval->add_option("--scan", scan_text, "systematic:T, uniform:T or a scan file")->required();
  eval->add_option("--weights", weights_text, "ones, unit:k, [..] or a file")->capture_default_str();
  eval->add_option("--trace", trace_path, "Write the per-step trace CSV here");
  eval->callback([&] {
    const InfluenceMatrix c = influence_from_json(read_json(bound_path));
    const Scan scan = parse_scan(scan_text, c.size());
    const WeightVector d = parse_weights(weights_text, c.size());
    const CouplingBoundTrace trace = forward_coupling_bounds(scan, c, &d);
    const double dv = dobrushin_variation(scan, d, c);
    if (!trace_path.empty()) trace_table(trace).save(trace_path);
    const CsvTable t = trace_table(trace);
    emit(g, "dv", {{"dv", dv}, {"T", scan.length()}, {"p", c.size()},
                   {"scan_kind", Scan::kind_name(scan.kind())}},
         &t);
  });

  // dogs ----------------------------------------------------------------
  auto* dogs_cmd = app.add_subcommand("dogs", "Scan optimization");
  dogs_cmd->require_subcommand(1);
  auto* opt = dogs_cmd->add_subcommand("optimize", "Coordinate descent on a scan");
  std::optional<double> epsilon;
  std::string tie = "keep_incumbent";
  bool iterate = false;
  opt->add_option("--bound", bound_path)->required();
  opt->add_option("--init", scan_text, "systematic:T, uniform:T or a scan file")->required();
  opt->add_option("--weights", weights_text)->capture_default_str();
  opt->add_option("--epsilon", epsilon, "Stop once DV <= epsilon");
  opt->add_option("--tie-break", tie, "keep_incumbent or lowest_index")->capture_default_str();
  opt->add_flag("--iterate", iterate, "Repeat until no further improvement");
  opt->callback([&] {
    const InfluenceMatrix c = influence_from_json(read_json(bound_path));
    const Scan init = parse_scan(scan_text, c.size());
    const WeightVector d = parse_weights(weights_text, c.size());
    OptimizerConfig config;
    config.epsilon = epsilon;
    config.tie_break = parse_tie_break(tie);
    const OptimizedScan r =
        iterate ? iterate_optimize(init, d, c, config) : optimize_scan(init, d, c, config);
    emit(g, "optimize", {{"report", optimizer_report(r, config)}, {"scan", scan_to_json(r.scan)}});
  });

  auto* dbl = dogs_cmd->add_subcommand("doubling", "Length-doubling selection");
  dbl->add_option("--bound", bound_path)->required();
  dbl->add_option("--reference", scan_text, "Reference scan")->required();
  dbl->add_option("--weights", weights_text)->capture_default_str();
  dbl->callback([&] {
    const InfluenceMatrix c = influence_from_json(read_json(bound_path));
    const Scan reference = parse_scan(scan_text, c.size());
    const WeightVector d = parse_weights(weights_text, c.size());
    const OptimizedScan r = length_doubling_select(reference, d, c);
    emit(g, "doubling", {{"report", optimizer_report(r, OptimizerConfig{})}, {"scan", scan_to_json(r.scan)}});
  });

  // gibbs ---------------------------------------------------------------
  auto* gibbs_cmd = app.add_subcommand("gibbs", "Run Gibbs samplers");
  gibbs_cmd->require_subcommand(1);
  auto* run = gibbs_cmd->add_subcommand("run", "One chain");
  std::string start_text = "all_up";
  bool trajectory = false;
  run->add_option("--model", model_path)->required();
  run->add_option("--scan", scan_text)->required();
  run->add_option("--start", start_text, "all_up or uniform")->capture_default_str();
  run->add_flag("--trajectory", trajectory, "Keep every state");
  run->callback([&] {
    const AnyModel m = load_model(model_path);
    const Scan scan = parse_scan(scan_text, model_size(m));
    const StartSpec start = parse_start(start_text);
    GibbsOptions options;
    options.keep_trajectory = trajectory;
    const GibbsRun r = std::visit(
        [&](const auto& x) { return run_gibbs(x, scan, start, g.seed, options); }, m);
    std::vector<std::string> columns{"t"};
    for (std::size_t i = 0; i < model_size(m); ++i) columns.push_back("x" + std::to_string(i));
    CsvTable t(columns);
    for (std::size_t s = 0; s < r.trajectory.size(); ++s) {
      t.row().add(s);
      for (int v : r.trajectory[s]) t.add(static_cast<std::int64_t>(v));
    }
    json j = {{"state", r.state}, {"seed", r.seed}, {"T", scan.length()}, {"start", start.name()}};
    if (trajectory) j["trajectory"] = r.trajectory;
    emit(g, "run", j, trajectory ? &t : nullptr);
  });

  auto* est = gibbs_cmd->add_subcommand("estimate", "Replicated expectation estimate");
  std::vector<std::size_t> members{0};
  std::size_t replicates = 100;
  est->add_option("--model", model_path)->required();
  est->add_option("--scan", scan_text)->required();
  est->add_option("--feature", members, "Product of these coordinates")->delimiter(',');
  est->add_option("--replicates", replicates)->capture_default_str();
  est->add_option("--start", start_text)->capture_default_str();
  est->callback([&] {
    const AnyModel m = load_model(model_path);
    const Scan scan = parse_scan(scan_text, model_size(m));
    const StartSpec start = parse_start(start_text);
    const Feature feature{members};
    for (std::size_t k : members) {
      if (k >= model_size(m)) throw ConfigError("feature index out of range");
    }
    const Estimate e = std::visit(
        [&](const auto& x) {
          return estimate_expectation(x, scan, feature, replicates, g.seed, start, g.threads);
        },
        m);
    const CsvTable t = sample_table(e);
    emit(g, "estimate", estimate_report(e, scan, start), &t);
  });

  // oracle --------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "Exact enumeration oracles (small models)");
  oracle->require_subcommand(1);
  auto* enumerate = oracle->add_subcommand("enumerate", "Exact joint distribution");
  enumerate->add_option("model", model_path)->required();
  enumerate->callback([&] {
    const AnyModel m = load_model(model_path);
    const ExactDistribution pi =
        std::visit([](const auto& x) { return enumerate_distribution(x); }, m);
    emit(g, "distribution", distribution_to_json(pi));
  });

  auto* exact_infl = oracle->add_subcommand("influence", "Exact Dobrushin influence");
  exact_infl->add_option("model", model_path)->required();
  exact_infl->callback([&] {
    const AnyModel m = load_model(model_path);
    emit(g, "influence",
         influence_to_json(std::visit([](const auto& x) { return exact_influence(x); }, m)));
  });

  auto* tv = oracle->add_subcommand("tv", "Exact TV of a chain to its target");
  tv->add_option("--model", model_path)->required();
  tv->add_option("--scan", scan_text)->required();
  tv->add_option("--start", start_text)->capture_default_str();
  tv->callback([&] {
    const AnyModel m = load_model(model_path);
    const Scan scan = parse_scan(scan_text, model_size(m));
    const ExactDistribution mu0 = start_distribution(m, parse_start(start_text));
    const auto [pi, mu] = std::visit(
        [&](const auto& x) {
          return std::pair{enumerate_distribution(x), exact_step_distribution(x, scan, mu0)};
        },
        m);
    std::vector<double> marginal;
    for (std::size_t i = 0; i < model_size(m); ++i) {
      const std::size_t s[] = {i};
      marginal.push_back(exact_marginal_tv(mu, pi, s));
    }
    emit(g, "tv", {{"tv", exact_tv(mu, pi)}, {"marginal_tv", marginal}, {"T", scan.length()}});
  });

  auto* best = oracle->add_subcommand("best-scan", "Exhaustive minimum-DV scan");
  std::size_t length = 1;
  best->add_option("--bound", bound_path)->required();
  best->add_option("--weights", weights_text)->capture_default_str();
  best->add_option("--length", length)->required();
  best->callback([&] {
    const InfluenceMatrix c = influence_from_json(read_json(bound_path));
    const WeightVector d = parse_weights(weights_text, c.size());
    const ExhaustiveResult r = exhaustive_best_scan(c, d.values(), length);
    emit(g, "best_scan", {{"dv", r.dv}, {"scan", scan_to_json(r.scan)}});
  });

  // exp -----------------------------------------------------------------
  auto* exp = app.add_subcommand("exp", "Desk-scale experiments");
  exp->require_subcommand(1);

  ScanEvalConfig se;
  std::vector<std::uint64_t> seeds;
  auto* se_cmd = exp->add_subcommand("scan-eval", "DV curves of standard and optimized scans");
  se_cmd->add_option("--rows", se.rows)->capture_default_str();
  se_cmd->add_option("--cols", se.cols)->capture_default_str();
  se_cmd->add_option("--grid", se.grid, "Comma-separated lengths")->delimiter(',');
  se_cmd->add_option("--weights", se.weights)->capture_default_str();
  se_cmd->add_option("--seeds", seeds, "Comma-separated model seeds")->delimiter(',');
  se_cmd->add_flag("!--no-iterated", se.iterated, "Skip iterated DoGS");
  se_cmd->callback([&] {
    if (!seeds.empty()) se.seeds = seeds;
    report_out(g, exp_scan_evaluation(se));
  });

  WallClockConfig wc;
  auto* wc_cmd = exp->add_subcommand("wall-clock", "Length doubling and sampling speedup");
  wc_cmd->add_option("--rows", wc.rows)->capture_default_str();
  wc_cmd->add_option("--cols", wc.cols)->capture_default_str();
  wc_cmd->add_flag("--symmetric", wc.symmetric, "Zero unary weights");
  wc_cmd->add_option("--reference-length", wc.reference_length)->capture_default_str();
  wc_cmd->add_option("--target", wc.target)->capture_default_str();
  wc_cmd->add_option("--samples", wc.samples)->capture_default_str();
  wc_cmd->callback([&] {
    wc.seed = g.seed;
    report_out(g, exp_wall_clock(wc));
  });

  MleConfig mle;
  std::string policies;
  auto* mle_cmd = exp->add_subcommand("mle", "MCMC maximum likelihood with two scan policies");
  mle_cmd->add_option("--rows", mle.rows)->capture_default_str();
  mle_cmd->add_option("--cols", mle.cols)->capture_default_str();
  mle_cmd->add_option("--training-samples", mle.training_samples)->capture_default_str();
  mle_cmd->add_flag("--rademacher", mle.rademacher_data, "Independent ±1 training data");
  mle_cmd->add_option("--gradient-steps", mle.gradient_steps)->capture_default_str();
  mle_cmd->add_option("--gibbs-steps", mle.gibbs_steps)->capture_default_str();
  mle_cmd->add_option("--runs", mle.runs)->capture_default_str();
  mle_cmd->add_option("--step-size", mle.step_size)->capture_default_str();
  mle_cmd->add_option("--epsilon", mle.epsilon)->capture_default_str();
  mle_cmd->add_option("--threshold", mle.error_threshold)->capture_default_str();
  mle_cmd->add_option("--policies", policies, "Comma-separated: uniform, dogs, exact");
  mle_cmd->add_option("--model-seed", mle.model_seed)->capture_default_str();
  mle_cmd->add_option("--data-seed", mle.data_seed)->capture_default_str();
  mle_cmd->add_option("--seeds", seeds, "Comma-separated run seeds")->delimiter(',');
  mle_cmd->callback([&] {
    if (!seeds.empty()) mle.seeds = seeds;
    if (!policies.empty()) {
      mle.policies.clear();
      std::stringstream ss(policies);
      for (std::string s; std::getline(ss, s, ',');) mle.policies.push_back(s);
    }
    mle.threads = g.threads;
    report_out(g, exp_mle(mle));
  });

  MarginalConfig mc;
  auto* mc_cmd = exp->add_subcommand("marginal", "Marginal mixing of one variable");
  mc_cmd->add_option("--rows", mc.rows)->capture_default_str();
  mc_cmd->add_option("--cols", mc.cols)->capture_default_str();
  mc_cmd->add_flag("--toroidal", mc.toroidal);
  mc_cmd->add_option("--coupling", mc.coupling)->capture_default_str();
  mc_cmd->add_option("--target", mc.target)->capture_default_str();
  mc_cmd->add_option("--grid", mc.grid)->delimiter(',');
  mc_cmd->add_option("--bias-grid", mc.bias_grid)->delimiter(',');
  mc_cmd->add_option("--replicates", mc.replicates)->capture_default_str();
  mc_cmd->add_flag("!--no-uniform", mc.uniform);
  mc_cmd->add_flag("!--no-iterated", mc.iterated);
  mc_cmd->callback([&] {
    mc.seed = g.seed;
    mc.threads = g.threads;
    report_out(g, exp_marginal(mc));
  });

  LooseBoundConfig lb;
  std::string factors;
  auto* lb_cmd = exp->add_subcommand("loose-bound", "Optimization under inflated bounds");
  lb_cmd->add_option("--rows", lb.rows)->capture_default_str();
  lb_cmd->add_option("--cols", lb.cols)->capture_default_str();
  lb_cmd->add_option("--coupling", lb.coupling)->capture_default_str();
  lb_cmd->add_option("--target", lb.target)->capture_default_str();
  lb_cmd->add_option("--factors", factors, "Comma-separated factors");
  lb_cmd->add_option("--grid", lb.grid)->delimiter(',');
  lb_cmd->add_option("--bias-grid", lb.bias_grid)->delimiter(',');
  lb_cmd->add_option("--replicates", lb.replicates)->capture_default_str();
  lb_cmd->callback([&] {
    if (!factors.empty()) lb.factors = parse_list(factors);
    lb.seed = g.seed;
    lb.threads = g.threads;
    report_out(g, exp_loose_bound(lb));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SizeGuardError& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return 3;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
