#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "../support/fixtures.hpp"
#include "dogs/error.hpp"
#include "dogs/exact.hpp"
#include "dogs/influence.hpp"
#include "dogs/variation.hpp"

namespace dogs {
namespace {

double sigma(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dense_norm(const InfluenceMatrix& c) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(c.size(), c.size());
  for (const auto& e : c.entries()) m(e.row, e.col) = e.value;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

TEST(InfluenceMatrix, StoresRowsAndColumns) {
  const InfluenceEntry e[] = {{0, 1, 0.3}, {1, 0, 0.2}, {2, 0, 0.5}};
  const auto c = InfluenceMatrix::from_entries(3, e, "hand");
  EXPECT_EQ(c.nonzeros(), 3u);
  EXPECT_EQ(c.at(0, 1), 0.3);
  EXPECT_EQ(c.at(0, 2), 0.0);
  EXPECT_EQ(c.column(0).size(), 2u);
  EXPECT_EQ(c.row(2)[0].index, 0u);
  EXPECT_DOUBLE_EQ(c.max_row_sum(), 0.5);
  std::vector<double> v{1, 2, 3}, out(3);
  c.multiply(v, out);
  EXPECT_DOUBLE_EQ(out[0], 0.6);
  EXPECT_DOUBLE_EQ(out[2], 0.5);
  c.multiply_transpose(v, out);
  EXPECT_DOUBLE_EQ(out[0], 0.2 * 2 + 0.5 * 3);
  EXPECT_DOUBLE_EQ(out[1], 0.3);
}

TEST(InfluenceMatrix, Validation) {
  const InfluenceEntry diag[] = {{1, 1, 0.3}};
  EXPECT_THROW(InfluenceMatrix::from_entries(2, diag, "x"), ConfigError);
  const InfluenceEntry neg[] = {{0, 1, -0.1}};
  EXPECT_THROW(InfluenceMatrix::from_entries(2, neg, "x"), ConfigError);
  const InfluenceEntry nan[] = {{0, 1, NAN}};
  EXPECT_THROW(InfluenceMatrix::from_entries(2, nan, "x"), ConfigError);
  const InfluenceEntry dup[] = {{0, 1, 0.1}, {0, 1, 0.2}};
  EXPECT_THROW(InfluenceMatrix::from_entries(2, dup, "x"), ConfigError);
  const InfluenceEntry far[] = {{0, 2, 0.1}};
  EXPECT_THROW(InfluenceMatrix::from_entries(2, far, "x"), ConfigError);
}

TEST(BinaryBound, DecoupledPairIsZero) {
  const Coupling c[] = {{0, 1, 0.0}};
  const auto b = influence_bound(BinaryPairwiseMrf::build(c, {0.7, -1.2}));
  EXPECT_EQ(b.at(0, 1), 0.0);
  EXPECT_EQ(b.at(1, 0), 0.0);
}

TEST(BinaryBound, IsolatedEdge) {
  const Coupling c[] = {{0, 1, 0.25}};
  const auto b = influence_bound(BinaryPairwiseMrf::build(c, {0.0, 0.0}));
  EXPECT_NEAR(b.at(0, 1), sigma(0.5) - sigma(-0.5), 1e-15);
  EXPECT_NEAR(b.at(0, 1), 0.24491866240370913, 1e-15);
  EXPECT_NEAR(b.at(1, 0), 0.24491866240370913, 1e-15);
  EXPECT_EQ(b.provenance(), "binary_pairwise");
}

TEST(BinaryBound, ThreeVariableEntryDominatesEnumeration) {
  const Coupling c[] = {{0, 1, 0.25}, {0, 2, 0.5}};
  const auto m = BinaryPairwiseMrf::build(c, {0.0, 0.0, 0.0});
  const auto b = influence_bound(m);
  // Brute force: TV between the conditionals of X_0 under X_1 = ±1, maximized
  // over X_2.
  double worst = 0.0;
  for (int x2 : {-1, 1}) {
    const double up = sigma(2 * (0.25 + 0.5 * x2));
    const double down = sigma(2 * (-0.25 + 0.5 * x2));
    worst = std::max(worst, std::abs(up - down));
  }
  EXPECT_LE(worst, b.at(0, 1) + 1e-15);
  EXPECT_GE(b.at(0, 1), exact_influence(m).at(0, 1) - 1e-12);
}

TEST(BinaryBound, ExactWhenCenterIsNotOne) {
  Rng rng(5);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = testing::random_binary(rng, 4, 0.3, 1.0);
    const auto bound = influence_bound(m);
    const auto exact = exact_influence(m);
    for (std::size_t i = 0; i < 4; ++i) {
      double s = 0.0;
      for (const auto& n : m.blanket(i)) s += std::abs(n.weight);
      for (const auto& n : m.blanket(i)) {
        const double rest = s - std::abs(n.weight);
        const double ti = m.unary()[i];
        const bool center_one = -2 * rest - 2 * ti <= 0.0 && 0.0 <= 2 * rest - 2 * ti;
        EXPECT_GE(bound.at(i, n.index), exact.at(i, n.index) - 1e-12);
        if (!center_one) {
          EXPECT_NEAR(bound.at(i, n.index), exact.at(i, n.index), 1e-10);
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(BinaryBound, ExtremeWeightsStayInUnitInterval) {
  const Coupling c[] = {{0, 1, 40.0}, {0, 2, -35.0}};
  const auto b = influence_bound(BinaryPairwiseMrf::build(c, {50.0, 0.0, -60.0}));
  for (const auto& e : b.entries()) {
    EXPECT_TRUE(std::isfinite(e.value));
    EXPECT_GE(e.value, 0.0);
    EXPECT_LE(e.value, 1.0);
  }
}

TEST(GeneralBound, ConstantTableHasNoInfluence) {
  std::vector<PairPotential> pots{{0, 1, PairTable(3, 2, std::vector<double>(6, 1.3))}};
  const auto b = influence_bound(GeneralPairwiseMrf::build({3, 2}, pots));
  EXPECT_EQ(b.at(0, 1), 0.0);
  EXPECT_EQ(b.at(1, 0), 0.0);
}

TEST(GeneralBound, PottsEdge) {
  const std::pair<std::size_t, std::size_t> edges[] = {{0, 1}};
  const auto m = GeneralPairwiseMrf::potts({3, 3}, edges, 0.48);
  const auto b = influence_bound(m);
  EXPECT_NEAR(b.at(0, 1), 2 * sigma(0.48) - 1, 1e-15);
  EXPECT_NEAR(b.at(0, 1), 0.235496, 5e-7);
  EXPECT_GE(b.at(0, 1), exact_influence(m).at(0, 1) - 1e-12);
}

TEST(GeneralBound, IsingTableAtLeastBinaryBound) {
  std::vector<PairPotential> pots{{0, 1, PairTable(2, 2, {0.25, -0.25, -0.25, 0.25})}};
  const auto general = influence_bound(GeneralPairwiseMrf::build({2, 2}, pots));
  const Coupling c[] = {{0, 1, 0.25}};
  const auto binary = influence_bound(BinaryPairwiseMrf::build(c, {0.0, 0.0}));
  EXPECT_GE(general.at(0, 1), binary.at(0, 1) - 1e-15);
  EXPECT_NEAR(general.at(0, 1), std::tanh(0.25), 1e-15);
}

TEST(GeneralBound, DominatesExactOnRandomModels) {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = testing::random_general(rng, 3, 4, 1.0);
    const auto b = influence_bound(m);
    const auto e = exact_influence(m);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) EXPECT_GE(b.at(i, j), e.at(i, j) - 1e-10);
    }
  }
}

TEST(HigherOrderBound, NoSharedFactorIsZero) {
  const auto m = HigherOrderBinaryMrf::build({{{0, 1}, 0.3}}, {0.0, 0.0, 0.0});
  const auto b = influence_bound(m);
  EXPECT_EQ(b.at(0, 2), 0.0);
  EXPECT_EQ(b.at(2, 1), 0.0);
}

TEST(HigherOrderBound, ThreeWayFactorValue) {
  const auto m = HigherOrderBinaryMrf::build({{{0, 1, 2}, 0.1}}, {0.0, 0.0, 0.0});
  const auto b = influence_bound(m);
  EXPECT_NEAR(b.at(0, 1), (std::exp(0.2) - std::exp(-0.2)) / 4, 1e-15);
  EXPECT_NEAR(b.at(0, 1), 0.100668, 5e-7);
  EXPECT_GE(b.at(0, 1), exact_influence(m).at(0, 1) - 1e-12);
}

TEST(HigherOrderBound, PairFactorNotTighterThanPairwiseBound) {
  const auto ho = influence_bound(HigherOrderBinaryMrf::build({{{0, 1}, 0.25}}, {0.0, 0.0}));
  const Coupling c[] = {{0, 1, 0.25}};
  const auto pw = influence_bound(BinaryPairwiseMrf::build(c, {0.0, 0.0}));
  EXPECT_GE(ho.at(0, 1), pw.at(0, 1));
  EXPECT_NEAR(ho.at(0, 1), std::sinh(0.5) / 2, 1e-15);
}

TEST(HigherOrderBound, ClippedAtOne) {
  const auto b = influence_bound(HigherOrderBinaryMrf::build({{{0, 1, 2}, 3.0}}, {0.0, 0.0, 0.0}));
  EXPECT_EQ(b.at(0, 1), 1.0);
}

TEST(ScaleBound, IdentityClipAndProvenance) {
  const InfluenceEntry e[] = {{0, 1, 0.8}, {1, 0, 0.2}};
  const auto c = InfluenceMatrix::from_entries(2, e, "hand");
  const auto same = scale_bound(c, 1.0);
  EXPECT_EQ(same.at(0, 1), 0.8);
  EXPECT_EQ(same.at(1, 0), 0.2);
  const auto big = scale_bound(c, 1.5);
  EXPECT_EQ(big.at(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(big.at(1, 0), 0.3);
  EXPECT_NE(big.provenance().find("hand"), std::string::npos);
  EXPECT_THROW(scale_bound(c, 0.9), ConfigError);
}

TEST(ScaleBound, LooseBoundPresetScalesEveryEntry) {
  const auto m = lattice_ising(LatticeSpec::constant(40, 40, 0.165, true), 1);
  const auto c = influence_bound(m);
  const auto s = scale_bound(c, 1.3);
  for (const auto& e : c.entries()) EXPECT_DOUBLE_EQ(s.at(e.row, e.col), 1.3 * e.value);
}

TEST(Norm, ZeroAndAntidiagonal) {
  EXPECT_EQ(total_influence_norm(InfluenceMatrix(3)), 0.0);
  const auto v = ergodicity_check(InfluenceMatrix(3));
  EXPECT_EQ(v.norm, 0.0);
  EXPECT_TRUE(v.in_regime);
  const InfluenceEntry e[] = {{0, 1, 0.3}, {1, 0, 0.2}};
  EXPECT_NEAR(total_influence_norm(InfluenceMatrix::from_entries(2, e, "hand")), 0.3, 1e-9);
}

TEST(Norm, LatticeMatchesDenseSolver) {
  const auto m = lattice_ising(LatticeSpec::constant(12, 12, 0.25, false), 1);
  const auto c = influence_bound(m);
  const double power = total_influence_norm(c);
  EXPECT_NEAR(power, dense_norm(c), 1e-7);
  EXPECT_LT(power, 1.0);
}

TEST(Norm, FortyByFortyInRegime) {
  const auto c = influence_bound(lattice_ising(LatticeSpec::constant(40, 40, 0.25, false), 1));
  const auto v = ergodicity_check(c);
  EXPECT_TRUE(v.in_regime);
  // Row sums of interior sites are 4 tanh(0.25) < 1 as well; both views agree here.
  EXPECT_LE(v.norm, c.max_row_sum() + 1e-12);
}

TEST(Norm, VerdictFromSpectrumNotRowSums) {
  // Directed 4-cycle pattern: every row sums to 1.2 but the matrix is a
  // scaled permutation plus a small symmetric part.
  std::vector<InfluenceEntry> e;
  for (std::size_t i = 0; i < 4; ++i) {
    e.push_back({i, (i + 1) % 4, 0.9});
    e.push_back({i, (i + 2) % 4, 0.3});
  }
  const auto c = InfluenceMatrix::from_entries(4, e, "hand");
  EXPECT_NEAR(total_influence_norm(c), dense_norm(c), 1e-8);
  EXPECT_GT(c.max_row_sum(), 1.0);
  EXPECT_EQ(ergodicity_check(c).in_regime, dense_norm(c) < 1.0);

  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = testing::random_bound(rng, 6, 0.6, 0.5);
    EXPECT_NEAR(total_influence_norm(r), dense_norm(r), 1e-7);
  }
}

}  // namespace
}  // namespace dogs
