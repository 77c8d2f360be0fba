#include <gtest/gtest.h>

#include <cmath>

#include "dogs/error.hpp"
#include "dogs/model.hpp"

namespace dogs {
namespace {

TEST(BinaryModel, EmptyInteractionIsIndependentCoins) {
  const auto m = BinaryPairwiseMrf::build({}, {0.0, 0.0});
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.edge_count(), 0u);
  EXPECT_TRUE(m.blanket(0).empty());
  const int up[] = {1, 1};
  const int mixed[] = {1, -1};
  EXPECT_EQ(m.log_potential(up), m.log_potential(mixed));
}

TEST(BinaryModel, SingleEdgeBlanket) {
  const Coupling c[] = {{0, 1, 0.25}};
  const auto m = BinaryPairwiseMrf::build(c, {0.0, 0.0});
  EXPECT_EQ(markov_blanket(m, 0), std::vector<std::size_t>{1});
  EXPECT_EQ(markov_blanket(m, 1), std::vector<std::size_t>{0});
  const int s[] = {1, -1};
  EXPECT_DOUBLE_EQ(m.local_field(0, s), -0.25);
  EXPECT_DOUBLE_EQ(m.log_potential(s), -0.25);
}

TEST(BinaryModel, PairCountedOnceInPotential) {
  const Coupling c[] = {{1, 0, 0.4}};
  const auto m = BinaryPairwiseMrf::build(c, {0.1, -0.2});
  const int s[] = {1, 1};
  EXPECT_DOUBLE_EQ(m.log_potential(s), 0.4 + 0.1 - 0.2);
  EXPECT_EQ(m.couplings()[0].i, 0u);
  EXPECT_EQ(m.couplings()[0].j, 1u);
}

TEST(BinaryModel, RejectsDuplicateEdgeInEitherOrientation) {
  const Coupling c[] = {{0, 1, 0.1}, {1, 0, 0.1}};
  EXPECT_THROW(BinaryPairwiseMrf::build(c, {0.0, 0.0}), ConfigError);
}

TEST(BinaryModel, RejectsSelfPairAndOutOfRange) {
  const Coupling self[] = {{1, 1, 0.1}};
  EXPECT_THROW(BinaryPairwiseMrf::build(self, {0.0, 0.0}), ConfigError);
  const Coupling far[] = {{0, 2, 0.1}};
  EXPECT_THROW(BinaryPairwiseMrf::build(far, {0.0, 0.0}), ConfigError);
}

TEST(BinaryModel, ZeroWeightEdgeLeavesBlanket) {
  const Coupling c[] = {{0, 1, 0.0}, {0, 2, 0.3}};
  const auto m = BinaryPairwiseMrf::build(c, {0.0, 0.0, 0.0});
  EXPECT_EQ(markov_blanket(m, 0), std::vector<std::size_t>{2});
  EXPECT_EQ(m.edge_count(), 2u);
}

TEST(Lattice, RandomFieldTenByTen) {
  const auto spec = LatticeSpec::random_field(10, 10);
  const auto m = lattice_ising(spec, 7);
  EXPECT_EQ(m.size(), 100u);
  EXPECT_EQ(m.edge_count(), 180u);
  for (const auto& c : m.couplings()) {
    EXPECT_GE(c.theta, 0.0);
    EXPECT_LE(c.theta, 0.25);
  }
  for (double u : m.unary()) EXPECT_TRUE(u == 0.0 || u == 1.0);
}

TEST(Lattice, MarginalPresetFortyByForty) {
  const auto m = lattice_ising(LatticeSpec::constant(40, 40, kMarginalCoupling, false), 1);
  EXPECT_EQ(m.size(), 1600u);
  EXPECT_EQ(m.edge_count(), 3120u);
  for (const auto& c : m.couplings()) EXPECT_EQ(c.theta, 1.0 / 3.915);
  for (double u : m.unary()) EXPECT_EQ(u, 0.0);
}

TEST(Lattice, DegenerateAndToroidal) {
  const auto one = lattice_ising(LatticeSpec::constant(1, 1, 0.2, false), 1);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(one.edge_count(), 0u);
  const auto torus = lattice_ising(LatticeSpec::constant(4, 5, 0.2, true), 1);
  EXPECT_EQ(torus.edge_count(), 40u);
  for (std::size_t i = 0; i < torus.size(); ++i) EXPECT_EQ(torus.blanket(i).size(), 4u);
  EXPECT_THROW(lattice_ising(LatticeSpec::constant(2, 5, 0.2, true), 1), ConfigError);
  EXPECT_THROW(lattice_ising(LatticeSpec::constant(0, 5, 0.2, false), 1), ConfigError);
}

TEST(Lattice, BlanketSizesByPosition) {
  const auto m = lattice_ising(LatticeSpec::constant(5, 5, 0.2, false), 1);
  EXPECT_EQ(m.blanket(0).size(), 2u);        // corner
  EXPECT_EQ(m.blanket(2).size(), 3u);        // edge
  EXPECT_EQ(m.blanket(2 * 5 + 2).size(), 4u);  // interior
  EXPECT_EQ(m.max_blanket_size(), 4u);
}

TEST(Lattice, SameSeedSameModel) {
  const auto spec = LatticeSpec::random_field(6, 6);
  const auto a = lattice_ising(spec, 11);
  const auto b = lattice_ising(spec, 11);
  const auto c = lattice_ising(spec, 12);
  ASSERT_EQ(a.edge_count(), b.edge_count());
  bool differs = false;
  for (std::size_t e = 0; e < a.edge_count(); ++e) {
    EXPECT_EQ(a.couplings()[e].theta, b.couplings()[e].theta);
    differs = differs || a.couplings()[e].theta != c.couplings()[e].theta;
  }
  EXPECT_TRUE(differs);
}

TEST(Lattice, ManhattanDistance) {
  LatticeSpec flat = LatticeSpec::constant(4, 4, 0.1, false);
  EXPECT_EQ(flat.manhattan(0, 15), 6u);
  EXPECT_EQ(flat.manhattan(5, 5), 0u);
  LatticeSpec torus = LatticeSpec::constant(4, 4, 0.1, true);
  EXPECT_EQ(torus.manhattan(0, 15), 2u);
  EXPECT_EQ(torus.manhattan(0, 3), 1u);
}

TEST(ParameterSources, DrawWithinSupport) {
  Rng rng(3);
  const auto u = ParameterSource::uniform(-0.5, 0.5);
  const auto ch = ParameterSource::choice({2.0, 3.0});
  for (int k = 0; k < 200; ++k) {
    const double x = u.draw(rng);
    EXPECT_GE(x, -0.5);
    EXPECT_LT(x, 0.5);
    const double y = ch.draw(rng);
    EXPECT_TRUE(y == 2.0 || y == 3.0);
  }
  EXPECT_EQ(ParameterSource::fixed(0.7).draw(rng), 0.7);
  EXPECT_THROW(ParameterSource::uniform(1.0, 0.0), ConfigError);
  EXPECT_THROW(ParameterSource::choice({}), ConfigError);
}

TEST(GeneralModel, PottsEdge) {
  const std::pair<std::size_t, std::size_t> edges[] = {{0, 1}};
  const auto m = GeneralPairwiseMrf::potts({3, 3}, edges, 0.48);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.domain_size(0), 3u);
  const int same[] = {2, 2};
  const int differ[] = {2, 1};
  EXPECT_DOUBLE_EQ(m.log_potential(same), 0.48);
  EXPECT_DOUBLE_EQ(m.log_potential(differ), 0.0);
  EXPECT_EQ(markov_blanket(m, 1), std::vector<std::size_t>{0});
}

TEST(GeneralModel, ConstantTableIsFlat) {
  std::vector<PairPotential> pots{{0, 1, PairTable(2, 3, std::vector<double>(6, 0.7))}};
  const auto m = GeneralPairwiseMrf::build({2, 3}, pots);
  const int a[] = {0, 0};
  const int b[] = {1, 2};
  EXPECT_DOUBLE_EQ(m.log_potential(a), m.log_potential(b));
}

TEST(GeneralModel, TransposedLinkReadsTheRightEntry) {
  // table(a, b) with a over X_0 (2 values) and b over X_1 (3 values).
  std::vector<PairPotential> pots{{0, 1, PairTable(2, 3, {0, 1, 2, 3, 4, 5})}};
  const auto m = GeneralPairwiseMrf::build({2, 3}, pots);
  const int x[] = {1, 2};
  EXPECT_DOUBLE_EQ(m.site_score(0, 1, x), 5.0);
  EXPECT_DOUBLE_EQ(m.site_score(1, 0, x), 3.0);
}

TEST(GeneralModel, Validation) {
  std::vector<PairPotential> wrong{{0, 1, PairTable(3, 2, std::vector<double>(6, 0.0))}};
  EXPECT_THROW(GeneralPairwiseMrf::build({2, 3}, wrong), ConfigError);
  EXPECT_THROW(PairTable(2, 2, std::vector<double>(3, 0.0)), ConfigError);
  std::vector<PairPotential> dup{{0, 1, PairTable(2, 2, std::vector<double>(4, 0.0))},
                                 {1, 0, PairTable(2, 2, std::vector<double>(4, 0.0))}};
  EXPECT_THROW(GeneralPairwiseMrf::build({2, 2}, dup), ConfigError);
  EXPECT_THROW(GeneralPairwiseMrf::build({2, 0}, {}), ConfigError);
}

TEST(HigherOrderModel, ThreeWayFactor) {
  const auto m = HigherOrderBinaryMrf::build({{{0, 1, 2}, 0.1}}, {0.0, 0.0, 0.0});
  EXPECT_EQ(m.factors().size(), 1u);
  EXPECT_EQ(markov_blanket(m, 0), (std::vector<std::size_t>{1, 2}));
  const int s[] = {1, -1, -1};
  EXPECT_DOUBLE_EQ(m.log_potential(s), 0.1);
  EXPECT_DOUBLE_EQ(m.local_field(0, s), 0.1);
}

TEST(HigherOrderModel, Validation) {
  EXPECT_THROW(HigherOrderBinaryMrf::build({{{0}, 0.1}}, {0.0}), ConfigError);
  EXPECT_THROW(HigherOrderBinaryMrf::build({{{0, 0}, 0.1}}, {0.0}), ConfigError);
  EXPECT_THROW(HigherOrderBinaryMrf::build({{{0, 3}, 0.1}}, {0.0, 0.0}), ConfigError);
  const auto empty = HigherOrderBinaryMrf::build({}, {0.0, 0.5});
  EXPECT_TRUE(empty.blanket(0).empty());
}

TEST(HigherOrderModel, SameSubsetMerges) {
  const auto m = HigherOrderBinaryMrf::build({{{0, 1}, 0.1}, {{1, 0}, 0.2}}, {0.0, 0.0});
  ASSERT_EQ(m.factors().size(), 1u);
  EXPECT_DOUBLE_EQ(m.factors()[0].theta, 0.1 + 0.2);
}

}  // namespace
}  // namespace dogs
