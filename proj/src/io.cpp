#include "dogs/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "dogs/error.hpp"

namespace dogs {

namespace {

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::vector<double> unary_or_zero(const json& j, std::size_t p) {
  if (!j.contains("unary")) return std::vector<double>(p, 0.0);
  auto unary = get<std::vector<double>>(j, "unary");
  if (unary.size() != p) throw ConfigError("unary has the wrong length");
  return unary;
}

std::pair<std::size_t, std::size_t> parse_pair_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw ConfigError("table key '" + key + "' is not 'i,j'");
  std::size_t i = 0, j = 0;
  const auto r1 = std::from_chars(key.data(), key.data() + comma, i);
  const auto r2 = std::from_chars(key.data() + comma + 1, key.data() + key.size(), j);
  if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != key.data() + key.size()) {
    throw ConfigError("table key '" + key + "' is not 'i,j'");
  }
  return {i, j};
}

}  // namespace

const char* model_kind(const AnyModel& model) noexcept {
  switch (model.index()) {
    case 0:
      return "binary_pairwise";
    case 1:
      return "general_pairwise";
    default:
      return "higher_order";
  }
}

std::size_t model_size(const AnyModel& model) noexcept {
  return std::visit([](const auto& m) { return m.size(); }, model);
}

json model_to_json(const AnyModel& model) {
  json j;
  j["kind"] = model_kind(model);
  j["p"] = model_size(model);
  if (const auto* m = std::get_if<BinaryPairwiseMrf>(&model)) {
    json edges = json::array();
    for (const Coupling& c : m->couplings()) edges.push_back({c.i, c.j, c.theta});
    j["edges"] = std::move(edges);
    j["unary"] = std::vector<double>(m->unary().begin(), m->unary().end());
  } else if (const auto* g = std::get_if<GeneralPairwiseMrf>(&model)) {
    j["domains"] = g->domains();
    json tables = json::object();
    for (const PairPotential& pp : g->potentials()) {
      json rows = json::array();
      for (std::size_t a = 0; a < pp.table.rows(); ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < pp.table.cols(); ++b) row.push_back(pp.table(a, b));
        rows.push_back(std::move(row));
      }
      tables[std::to_string(pp.i) + "," + std::to_string(pp.j)] = std::move(rows);
    }
    j["tables"] = std::move(tables);
  } else {
    const auto& h = std::get<HigherOrderBinaryMrf>(model);
    json factors = json::array();
    for (const Factor& f : h.factors()) {
      factors.push_back({{"members", f.members}, {"theta", f.theta}});
    }
    j["factors"] = std::move(factors);
    j["unary"] = std::vector<double>(h.unary().begin(), h.unary().end());
  }
  return j;
}

AnyModel model_from_json(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  const auto p = get<std::size_t>(j, "p");
  if (kind == "binary_pairwise") {
    std::vector<Coupling> pairs;
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw ConfigError("edge must be [i, j, theta]");
        pairs.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
      }
    }
    return BinaryPairwiseMrf::build(pairs, unary_or_zero(j, p));
  }
  if (kind == "general_pairwise") {
    auto domains = get<std::vector<std::size_t>>(j, "domains");
    if (domains.size() != p) throw ConfigError("domains has the wrong length");
    std::vector<PairPotential> potentials;
    if (j.contains("tables")) {
      for (const auto& [key, rows] : j.at("tables").items()) {
        const auto [a, b] = parse_pair_key(key);
        const auto grid = rows.get<std::vector<std::vector<double>>>();
        std::vector<double> flat;
        const std::size_t cols = grid.empty() ? 0 : grid.front().size();
        for (const auto& row : grid) {
          if (row.size() != cols) throw ConfigError("ragged table for " + key);
          flat.insert(flat.end(), row.begin(), row.end());
        }
        potentials.push_back({a, b, PairTable(grid.size(), cols, std::move(flat))});
      }
    }
    return GeneralPairwiseMrf::build(std::move(domains), std::move(potentials));
  }
  if (kind == "higher_order") {
    std::vector<Factor> factors;
    if (j.contains("factors")) {
      for (const auto& f : j.at("factors")) {
        factors.push_back({get<std::vector<std::size_t>>(f, "members"), get<double>(f, "theta")});
      }
    }
    return HigherOrderBinaryMrf::build(std::move(factors), unary_or_zero(j, p));
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

json influence_to_json(const InfluenceMatrix& bound) {
  json entries = json::array();
  for (const auto& e : bound.entries()) entries.push_back({e.row, e.col, e.value});
  return {{"p", bound.size()}, {"entries", std::move(entries)},
          {"provenance", bound.provenance()}};
}

InfluenceMatrix influence_from_json(const json& j) {
  const auto p = get<std::size_t>(j, "p");
  std::vector<InfluenceEntry> entries;
  if (j.contains("entries")) {
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 3) throw ConfigError("entry must be [i, j, value]");
      entries.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
    }
  }
  const std::string provenance = j.value("provenance", std::string("file"));
  return InfluenceMatrix::from_entries(p, entries, provenance);
}

json scan_to_json(const Scan& scan) {
  json j;
  j["p"] = scan.dimension();
  j["T"] = scan.length();
  switch (scan.kind()) {
    case Scan::Kind::systematic:
      j["kind"] = "systematic";
      return j;
    case Scan::Kind::uniform:
      j["kind"] = "uniform";
      return j;
    case Scan::Kind::deterministic:
      j["kind"] = "deterministic";
      j["indices"] = scan.indices();
      return j;
    case Scan::Kind::explicit_vectors:
    case Scan::Kind::mixed: {
      if (scan.is_deterministic()) {
        j["kind"] = "deterministic";
        j["indices"] = scan.indices();
        return j;
      }
      j["kind"] = "explicit";
      json vectors = json::array();
      for (std::size_t t = 0; t < scan.length(); ++t) vectors.push_back(scan.dense_step(t));
      j["vectors"] = std::move(vectors);
      return j;
    }
  }
  return j;
}

Scan scan_from_json(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  const auto p = get<std::size_t>(j, "p");
  if (kind == "systematic") return Scan::systematic(p, get<std::size_t>(j, "T"));
  if (kind == "uniform") return Scan::uniform(p, get<std::size_t>(j, "T"));
  if (kind == "deterministic") {
    auto indices = get<std::vector<std::size_t>>(j, "indices");
    if (j.contains("T") && j.at("T").get<std::size_t>() != indices.size()) {
      throw ConfigError("T does not match the number of indices");
    }
    return Scan::deterministic(p, std::move(indices));
  }
  if (kind == "explicit") {
    auto vectors = get<std::vector<std::vector<double>>>(j, "vectors");
    if (j.contains("T") && j.at("T").get<std::size_t>() != vectors.size()) {
      throw ConfigError("T does not match the number of vectors");
    }
    return Scan::explicit_vectors(p, std::move(vectors));
  }
  throw ConfigError("unknown scan kind '" + kind + "'");
}

json weights_to_json(const WeightVector& d) {
  return std::vector<double>(d.values().begin(), d.values().end());
}

WeightVector weights_from_json(const json& j, std::size_t p) {
  if (j.is_string()) return parse_weights(j.get<std::string>(), p);
  if (!j.is_array()) throw ConfigError("weights must be an array or a string");
  auto values = j.get<std::vector<double>>();
  if (values.size() != p) throw ConfigError("weights have the wrong length");
  return WeightVector(std::move(values));
}

WeightVector parse_weights(const std::string& text, std::size_t p) {
  if (text == "ones") return WeightVector::ones(p);
  if (text.rfind("unit:", 0) == 0) {
    std::size_t k = 0;
    const char* first = text.data() + 5;
    const char* last = text.data() + text.size();
    const auto r = std::from_chars(first, last, k);
    if (r.ec != std::errc() || r.ptr != last) throw ConfigError("bad weight spec '" + text + "'");
    return WeightVector::unit(p, k);
  }
  if (!text.empty() && text.front() == '[') {
    try {
      return weights_from_json(json::parse(text), p);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad weight list: ") + e.what());
    }
  }
  return weights_from_json(read_json(text), p);
}

json distribution_to_json(const ExactDistribution& dist) {
  return {{"domains", dist.domains()},
          {"spins", dist.spins()},
          {"order", "lexicographic, variable 0 most significant"},
          {"probs", dist.probs()}};
}

json optimizer_report(const OptimizedScan& result, const OptimizerConfig& config) {
  json j;
  j["dv_before"] = result.dv_before;
  j["dv_after"] = result.dv_after;
  j["steps_optimized"] = result.steps_optimized;
  j["wall_time_ms"] = result.wall_time_ms;
  j["tie_count"] = result.tie_count;
  j["iterations"] = result.iterations;
  j["tie_break"] = tie_break_name(config.tie_break);
  j["epsilon"] = config.epsilon ? json(*config.epsilon) : json(nullptr);
  j["T"] = result.scan.length();
  if (result.accepted_length > 0) {
    j["accepted_length"] = result.accepted_length;
    j["reference_dv"] = result.reference_dv;
  }
  return j;
}

json estimate_report(const Estimate& estimate, const Scan& scan, const StartSpec& start) {
  return {{"mean", estimate.mean},
          {"stderr", estimate.standard_error},
          {"R", estimate.replicates},
          {"T", scan.length()},
          {"scan_kind", Scan::kind_name(scan.kind())},
          {"start_kind", start.name()},
          {"rng", Rng::kAlgorithm},
          {"wall_time_ms", estimate.wall_time_ms}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  rows_.back().reserve(columns_.size());
  return *this;
}

CsvTable& CsvTable::add(double value) { return add(format_number(value)); }
CsvTable& CsvTable::add(std::size_t value) { return add(std::to_string(value)); }
CsvTable& CsvTable::add(std::int64_t value) { return add(std::to_string(value)); }

CsvTable& CsvTable::add(const std::string& value) {
  if (rows_.empty()) row();
  rows_.back().push_back(value);
  return *this;
}

void CsvTable::write(std::ostream& out) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
  out << '\n';
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
    out << '\n';
  }
}

void CsvTable::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write(out);
}

CsvTable trace_table(const CouplingBoundTrace& trace) {
  CsvTable table({"t", "changed_index", "dv_running"});
  const auto& running = trace.running_dv();
  for (std::size_t t = 0; t < trace.length(); ++t) {
    table.row().add(t + 1).add(trace.changed_index(t));
    if (t < running.size()) {
      table.add(running[t]);
    } else {
      table.add(std::string());
    }
  }
  return table;
}

CsvTable sample_table(const Estimate& estimate) {
  CsvTable table({"replicate", "seed", "terminal_feature"});
  for (std::size_t r = 0; r < estimate.values.size(); ++r) {
    table.row().add(r).add(std::to_string(estimate.seeds[r])).add(estimate.values[r]);
  }
  return table;
}

}  // namespace dogs
