#include "dogs/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "dogs/error.hpp"

namespace dogs {

namespace {

std::string pair_name(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void check_index(std::size_t i, std::size_t p, const char* what) {
  if (i >= p) {
    throw ConfigError(std::string(what) + " index " + std::to_string(i) +
                      " out of range for p=" + std::to_string(p));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// BinaryPairwiseMrf

BinaryPairwiseMrf BinaryPairwiseMrf::build(std::span<const Coupling> pairs,
                                           std::vector<double> unary) {
  BinaryPairwiseMrf m;
  const std::size_t p = unary.size();
  m.unary_ = std::move(unary);

  std::set<std::pair<std::size_t, std::size_t>> seen;
  m.couplings_.reserve(pairs.size());
  for (const Coupling& c : pairs) {
    check_index(c.i, p, "edge");
    check_index(c.j, p, "edge");
    if (c.i == c.j) throw ConfigError("self-pair " + pair_name(c.i, c.j));
    const auto lo = std::min(c.i, c.j);
    const auto hi = std::max(c.i, c.j);
    if (!seen.emplace(lo, hi).second) {
      throw ConfigError("duplicate edge " + pair_name(lo, hi));
    }
    m.couplings_.push_back({lo, hi, c.theta});
  }
  std::sort(m.couplings_.begin(), m.couplings_.end(),
            [](const Coupling& a, const Coupling& b) {
              return std::pair(a.i, a.j) < std::pair(b.i, b.j);
            });

  std::vector<std::size_t> degree(p, 0);
  for (const Coupling& c : m.couplings_) {
    if (c.theta == 0.0) continue;
    ++degree[c.i];
    ++degree[c.j];
  }
  m.offsets_.assign(p + 1, 0);
  for (std::size_t i = 0; i < p; ++i) m.offsets_[i + 1] = m.offsets_[i] + degree[i];
  m.adjacency_.resize(m.offsets_[p]);
  std::vector<std::size_t> fill(m.offsets_.begin(), m.offsets_.end() - 1);
  for (const Coupling& c : m.couplings_) {
    if (c.theta == 0.0) continue;
    m.adjacency_[fill[c.i]++] = {c.j, c.theta};
    m.adjacency_[fill[c.j]++] = {c.i, c.theta};
  }
  for (std::size_t i = 0; i < p; ++i) {
    std::sort(m.adjacency_.begin() + static_cast<std::ptrdiff_t>(m.offsets_[i]),
              m.adjacency_.begin() + static_cast<std::ptrdiff_t>(m.offsets_[i + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    m.max_blanket_ = std::max(m.max_blanket_, degree[i]);
  }
  return m;
}

std::span<const Neighbor> BinaryPairwiseMrf::blanket(std::size_t i) const {
  check_index(i, size(), "variable");
  return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

double BinaryPairwiseMrf::local_field(std::size_t i,
                                      std::span<const int> spins) const {
  double h = unary_[i];
  for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
    h += adjacency_[e].weight * spins[adjacency_[e].index];
  }
  return h;
}

double BinaryPairwiseMrf::log_potential(std::span<const int> spins) const {
  double s = 0.0;
  for (const Coupling& c : couplings_) s += c.theta * spins[c.i] * spins[c.j];
  for (std::size_t i = 0; i < unary_.size(); ++i) s += unary_[i] * spins[i];
  return s;
}

// ---------------------------------------------------------------------------
// GeneralPairwiseMrf

PairTable::PairTable(std::size_t rows, std::size_t cols,
                     std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ConfigError("pair table has " + std::to_string(values_.size()) +
                      " values, expected " + std::to_string(rows_ * cols_));
  }
}

GeneralPairwiseMrf GeneralPairwiseMrf::build(
    std::vector<std::size_t> domains, std::vector<PairPotential> potentials) {
  GeneralPairwiseMrf m;
  const std::size_t p = domains.size();
  for (std::size_t i = 0; i < p; ++i) {
    if (domains[i] == 0) {
      throw ConfigError("variable " + std::to_string(i) + " has empty domain");
    }
  }
  m.domains_ = std::move(domains);

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const PairPotential& pp : potentials) {
    check_index(pp.i, p, "table");
    check_index(pp.j, p, "table");
    if (pp.i == pp.j) throw ConfigError("self-pair table " + pair_name(pp.i, pp.j));
    if (pp.table.rows() != m.domains_[pp.i] || pp.table.cols() != m.domains_[pp.j]) {
      throw ConfigError("table " + pair_name(pp.i, pp.j) + " has shape " +
                        std::to_string(pp.table.rows()) + "x" +
                        std::to_string(pp.table.cols()) + ", expected " +
                        std::to_string(m.domains_[pp.i]) + "x" +
                        std::to_string(m.domains_[pp.j]));
    }
    if (!seen.emplace(std::min(pp.i, pp.j), std::max(pp.i, pp.j)).second) {
      throw ConfigError("duplicate table " + pair_name(pp.i, pp.j));
    }
  }
  m.potentials_ = std::move(potentials);

  std::vector<std::size_t> degree(p, 0);
  for (const PairPotential& pp : m.potentials_) {
    ++degree[pp.i];
    ++degree[pp.j];
  }
  m.offsets_.assign(p + 1, 0);
  for (std::size_t i = 0; i < p; ++i) m.offsets_[i + 1] = m.offsets_[i] + degree[i];
  m.links_.resize(m.offsets_[p]);
  std::vector<std::size_t> fill(m.offsets_.begin(), m.offsets_.end() - 1);
  for (std::size_t k = 0; k < m.potentials_.size(); ++k) {
    const PairPotential& pp = m.potentials_[k];
    m.links_[fill[pp.i]++] = {pp.j, k, false};
    m.links_[fill[pp.j]++] = {pp.i, k, true};
  }
  for (std::size_t i = 0; i < p; ++i) {
    std::sort(m.links_.begin() + static_cast<std::ptrdiff_t>(m.offsets_[i]),
              m.links_.begin() + static_cast<std::ptrdiff_t>(m.offsets_[i + 1]),
              [](const Link& a, const Link& b) { return a.neighbor < b.neighbor; });
    m.max_blanket_ = std::max(m.max_blanket_, degree[i]);
  }
  return m;
}

GeneralPairwiseMrf GeneralPairwiseMrf::potts(
    std::vector<std::size_t> domains,
    std::span<const std::pair<std::size_t, std::size_t>> edges,
    double strength) {
  std::vector<PairPotential> potentials;
  potentials.reserve(edges.size());
  for (const auto& [i, j] : edges) {
    check_index(i, domains.size(), "edge");
    check_index(j, domains.size(), "edge");
    const std::size_t r = domains[i];
    const std::size_t c = domains[j];
    std::vector<double> values(r * c, 0.0);
    for (std::size_t a = 0; a < std::min(r, c); ++a) values[a * c + a] = strength;
    potentials.push_back({i, j, PairTable(r, c, std::move(values))});
  }
  return build(std::move(domains), std::move(potentials));
}

std::span<const GeneralPairwiseMrf::Link> GeneralPairwiseMrf::links(
    std::size_t i) const {
  check_index(i, size(), "variable");
  return {links_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

double GeneralPairwiseMrf::site_score(std::size_t i, std::size_t a,
                                      std::span<const int> values) const {
  double s = 0.0;
  for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
    const Link& l = links_[e];
    s += pair_value(l, a, static_cast<std::size_t>(values[l.neighbor]));
  }
  return s;
}

double GeneralPairwiseMrf::log_potential(std::span<const int> values) const {
  double s = 0.0;
  for (const PairPotential& pp : potentials_) {
    s += pp.table(static_cast<std::size_t>(values[pp.i]),
                  static_cast<std::size_t>(values[pp.j]));
  }
  return s;
}

// ---------------------------------------------------------------------------
// HigherOrderBinaryMrf

HigherOrderBinaryMrf HigherOrderBinaryMrf::build(std::vector<Factor> factors,
                                                 std::vector<double> unary) {
  HigherOrderBinaryMrf m;
  const std::size_t p = unary.size();
  m.unary_ = std::move(unary);

  std::map<std::vector<std::size_t>, double> merged;
  for (Factor& f : factors) {
    if (f.members.size() < 2) {
      throw ConfigError("factor with " + std::to_string(f.members.size()) +
                        " member(s); singletons belong in the unary weights");
    }
    for (std::size_t k : f.members) check_index(k, p, "factor member");
    std::sort(f.members.begin(), f.members.end());
    if (std::adjacent_find(f.members.begin(), f.members.end()) != f.members.end()) {
      throw ConfigError("factor has repeated members");
    }
    merged[f.members] += f.theta;
  }
  for (auto& [members, theta] : merged) m.factors_.push_back({members, theta});

  std::vector<std::vector<std::size_t>> incidence(p);
  std::vector<std::set<std::size_t>> blankets(p);
  for (std::size_t f = 0; f < m.factors_.size(); ++f) {
    const auto& members = m.factors_[f].members;
    for (std::size_t k : members) {
      incidence[k].push_back(f);
      if (m.factors_[f].theta == 0.0) continue;
      for (std::size_t l : members) {
        if (l != k) blankets[k].insert(l);
      }
    }
  }
  m.incidence_offsets_.assign(p + 1, 0);
  m.blanket_offsets_.assign(p + 1, 0);
  for (std::size_t i = 0; i < p; ++i) {
    m.incidence_.insert(m.incidence_.end(), incidence[i].begin(), incidence[i].end());
    m.blankets_.insert(m.blankets_.end(), blankets[i].begin(), blankets[i].end());
    m.incidence_offsets_[i + 1] = m.incidence_.size();
    m.blanket_offsets_[i + 1] = m.blankets_.size();
    m.max_blanket_ = std::max(m.max_blanket_, blankets[i].size());
  }
  return m;
}

std::span<const std::size_t> HigherOrderBinaryMrf::factors_of(std::size_t i) const {
  check_index(i, size(), "variable");
  return {incidence_.data() + incidence_offsets_[i],
          incidence_offsets_[i + 1] - incidence_offsets_[i]};
}

std::span<const std::size_t> HigherOrderBinaryMrf::blanket(std::size_t i) const {
  check_index(i, size(), "variable");
  return {blankets_.data() + blanket_offsets_[i],
          blanket_offsets_[i + 1] - blanket_offsets_[i]};
}

double HigherOrderBinaryMrf::local_field(std::size_t i,
                                         std::span<const int> spins) const {
  double h = unary_[i];
  for (std::size_t e = incidence_offsets_[i]; e < incidence_offsets_[i + 1]; ++e) {
    const Factor& f = factors_[incidence_[e]];
    int prod = 1;
    for (std::size_t k : f.members) {
      if (k != i) prod *= spins[k];
    }
    h += f.theta * prod;
  }
  return h;
}

double HigherOrderBinaryMrf::log_potential(std::span<const int> spins) const {
  double s = 0.0;
  for (const Factor& f : factors_) {
    int prod = 1;
    for (std::size_t k : f.members) prod *= spins[k];
    s += f.theta * prod;
  }
  for (std::size_t i = 0; i < unary_.size(); ++i) s += unary_[i] * spins[i];
  return s;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> markov_blanket(const BinaryPairwiseMrf& model,
                                        std::size_t i) {
  std::vector<std::size_t> out;
  for (const Neighbor& n : model.blanket(i)) out.push_back(n.index);
  return out;
}

std::vector<std::size_t> markov_blanket(const GeneralPairwiseMrf& model,
                                        std::size_t i) {
  std::vector<std::size_t> out;
  for (const auto& l : model.links(i)) out.push_back(l.neighbor);
  return out;
}

std::vector<std::size_t> markov_blanket(const HigherOrderBinaryMrf& model,
                                        std::size_t i) {
  auto b = model.blanket(i);
  return {b.begin(), b.end()};
}

// ---------------------------------------------------------------------------
// Lattices

ParameterSource ParameterSource::fixed(double value) {
  ParameterSource s;
  s.kind = Kind::constant;
  s.low = s.high = value;
  return s;
}

ParameterSource ParameterSource::uniform(double low, double high) {
  if (!(low <= high)) throw ConfigError("uniform source needs low <= high");
  ParameterSource s;
  s.kind = Kind::uniform;
  s.low = low;
  s.high = high;
  return s;
}

ParameterSource ParameterSource::choice(std::vector<double> values) {
  if (values.empty()) throw ConfigError("choice source needs at least one value");
  ParameterSource s;
  s.kind = Kind::choice;
  s.choices = std::move(values);
  return s;
}

double ParameterSource::draw(Rng& rng) const {
  switch (kind) {
    case Kind::constant:
      return low;
    case Kind::uniform:
      return low + (high - low) * rng.uniform();
    case Kind::choice:
      return choices[rng.below(choices.size())];
  }
  return low;
}

LatticeSpec LatticeSpec::random_field(std::size_t rows, std::size_t cols) {
  LatticeSpec s;
  s.rows = rows;
  s.cols = cols;
  s.coupling = ParameterSource::uniform(0.0, 0.25);
  s.unary = ParameterSource::choice({0.0, 1.0});
  return s;
}

LatticeSpec LatticeSpec::constant(std::size_t rows, std::size_t cols,
                                  double coupling, bool toroidal) {
  LatticeSpec s;
  s.rows = rows;
  s.cols = cols;
  s.toroidal = toroidal;
  s.coupling = ParameterSource::fixed(coupling);
  s.unary = ParameterSource::fixed(0.0);
  return s;
}

std::size_t LatticeSpec::expected_edges() const noexcept {
  return toroidal ? 2 * rows * cols : 2 * rows * cols - rows - cols;
}

std::size_t LatticeSpec::manhattan(std::size_t a, std::size_t b) const {
  auto axis = [this](std::size_t x, std::size_t y, std::size_t n) {
    const std::size_t d = x > y ? x - y : y - x;
    return toroidal ? std::min(d, n - d) : d;
  };
  return axis(a / cols, b / cols, rows) + axis(a % cols, b % cols, cols);
}

BinaryPairwiseMrf lattice_ising(const LatticeSpec& spec, std::uint64_t seed) {
  if (spec.rows == 0 || spec.cols == 0) {
    throw ConfigError("lattice needs rows, cols >= 1");
  }
  if (spec.toroidal && (spec.rows < 3 || spec.cols < 3)) {
    throw ConfigError("toroidal lattice needs rows, cols >= 3");
  }
  Rng rng(seed);
  const std::size_t p = spec.sites();
  std::vector<double> unary(p);
  for (double& u : unary) u = spec.unary.draw(rng);

  std::vector<Coupling> pairs;
  pairs.reserve(spec.expected_edges());
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      const std::size_t s = r * spec.cols + c;
      if (c + 1 < spec.cols) {
        pairs.push_back({s, s + 1, spec.coupling.draw(rng)});
      } else if (spec.toroidal) {
        pairs.push_back({s, r * spec.cols, spec.coupling.draw(rng)});
      }
      if (r + 1 < spec.rows) {
        pairs.push_back({s, s + spec.cols, spec.coupling.draw(rng)});
      } else if (spec.toroidal) {
        pairs.push_back({s, c, spec.coupling.draw(rng)});
      }
    }
  }
  return BinaryPairwiseMrf::build(pairs, std::move(unary));
}

}  // namespace dogs
