#include <gtest/gtest.h>

#include <random>

#include "dfpower/dfpower.hpp"
#include "oracles.hpp"

using namespace dfpower;
namespace oracle = dfpower::testing;

namespace {

const std::vector<double> kFig7Row{0, 0.15, 0.15, 0.2, 0.05, 0.15, 0.3, 0};
const std::vector<double> kDissentRow{0, 0.1, 0.1, 0.2, 0.05, 0.05, 0.2, 0.3};

// Rows 2..n of a star all point back at node 1.
Matrix hand_star(const std::vector<double>& row) {
  const auto n = static_cast<Eigen::Index>(row.size());
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) c(0, j) = row[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < n; ++i) c(i, 0) = 1.0;
  return c;
}

}  // namespace

TEST(Star, BuildsValidatedStar) {
  const std::vector<double> w{0.1, 0.2, 0.15, 0.25, 0.2, 0.1};
  const InteractionMatrix c = star(w);
  EXPECT_EQ(c.size(), 7u);
  EXPECT_EQ(detect_star(c), 0u);
  for (std::size_t j = 1; j < 7; ++j) EXPECT_EQ(c(0, j), w[j - 1]);
  for (std::size_t i = 1; i < 7; ++i) EXPECT_EQ(c(i, 0), 1.0);
}

TEST(Star, ThreeNodeGamma) {
  const Vector g = gamma_closed_form(VariationSpec::star({0, 0.5, 0.5})).gamma;
  EXPECT_NEAR(g(0), 0.5, 1e-15);
  EXPECT_NEAR(g(1), 0.25, 1e-15);
  EXPECT_NEAR(g(2), 0.25, 1e-15);
  const Vector numeric = dominant_left_eigenvector(star(std::vector<double>{0.5, 0.5})).gamma;
  EXPECT_LE((numeric - g).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Star, RejectsBadWeights) {
  EXPECT_THROW(star(std::vector<double>{1.2, -0.2}), ConstraintError);
  EXPECT_THROW(star(std::vector<double>{0.5, 0.4}), ConstraintError);
  EXPECT_THROW(star(std::vector<double>{1.0, 0.0}), ConstraintError);
  EXPECT_THROW(star(std::vector<double>{1.0}), DimensionError);
}

TEST(SingleAttack, MatchesHandBuiltMatrix) {
  const InteractionMatrix c = single_attack(VariationSpec::single_attack(kFig7Row, 0.5));
  Matrix expected = hand_star(kFig7Row);
  expected.row(6).setZero();
  expected(6, 0) = 0.5;
  expected(6, 7) = 0.5;
  expected.row(7).setZero();
  expected(7, 6) = 1.0;
  EXPECT_EQ(c.matrix(), expected);
  EXPECT_FALSE(detect_star(c));
}

TEST(SingleAttack, BetaMustBeInsideOpenInterval) {
  for (double beta : {0.0, 1.0, -0.1, 1.5}) {
    EXPECT_THROW(single_attack(VariationSpec::single_attack(kFig7Row, beta)), ConstraintError)
        << beta;
  }
  EXPECT_THROW(single_attack(VariationSpec::single_attack(kFig7Row, std::nan(""))),
               NumericInputError);
}

TEST(SingleAttack, AttackerColumnMustBeEmpty) {
  std::vector<double> row = kFig7Row;
  row[6] = 0.2;
  row[7] = 0.1;
  EXPECT_THROW(single_attack(VariationSpec::single_attack(row, 0.5)), ConstraintError);
}

TEST(Build, WrongKindIsRejected) {
  const auto s = VariationSpec::single_attack(kFig7Row, 0.5);
  EXPECT_THROW(coordinated_double(s), PreconditionError);
  EXPECT_THROW(dissenting_subjects(s), PreconditionError);
}

TEST(CoordinatedDouble, NineNodeShape) {
  const std::vector<double> row{0, 0.1, 0.1, 0.2, 0.1, 0.2, 0.3, 0, 0};
  const InteractionMatrix c =
      coordinated_double(VariationSpec::two_betas(VariationKind::CoordinatedDouble, row, 0.3, 0.3));
  Matrix expected = hand_star(row);
  expected.row(6).setZero();
  expected(6, 0) = 1.0 - (0.3 + 0.3);
  expected(6, 7) = 0.3;
  expected(6, 8) = 0.3;
  expected.row(7).setZero();
  expected.row(8).setZero();
  expected(7, 6) = expected(8, 6) = 1.0;
  EXPECT_EQ(c.matrix(), expected);
  EXPECT_NEAR(c(6, 0), 0.4, 1e-15);
  EXPECT_TRUE(oracle::closure_irreducible(c.matrix()));
  EXPECT_FALSE(detect_star(c));
}

TEST(CoordinatedDouble, BetaSumMustStayBelowOne) {
  const std::vector<double> row{0, 0.25, 0.25, 0.5, 0, 0};
  EXPECT_THROW(
      coordinated_double(VariationSpec::two_betas(VariationKind::CoordinatedDouble, row, 0.6, 0.5)),
      ConstraintError);
  EXPECT_THROW(
      coordinated_double(VariationSpec::two_betas(VariationKind::CoordinatedDouble, row, 0.5, 0.5)),
      ConstraintError);
}

TEST(UncoordinatedDouble, NineNodeRows) {
  const std::vector<double> row{0, 0.1, 0.1, 0.2, 0.1, 0.2, 0.3, 0, 0};
  const InteractionMatrix c = uncoordinated_double(
      VariationSpec::two_betas(VariationKind::UncoordinatedDouble, row, 0.4, 0.7));
  Matrix expected = hand_star(row);
  expected.row(5).setZero();
  expected(5, 0) = 1.0 - 0.4;
  expected(5, 7) = 0.4;
  expected.row(6).setZero();
  expected(6, 0) = 1.0 - 0.7;
  expected(6, 8) = 0.7;
  expected.row(7).setZero();
  expected(7, 5) = 1.0;
  expected.row(8).setZero();
  expected(8, 6) = 1.0;
  EXPECT_EQ(c.matrix(), expected);
  EXPECT_TRUE(c.report().ok());
}

TEST(UncoordinatedDouble, BranchSwapSymmetry) {
  const std::vector<double> row{0, 0.2, 0.1, 0.35, 0.35, 0, 0};
  const Matrix c = uncoordinated_double(
      VariationSpec::two_betas(VariationKind::UncoordinatedDouble, row, 0.45, 0.45)).matrix();
  // Swap subjects 4<->5 and attackers 6<->7.
  Eigen::PermutationMatrix<Eigen::Dynamic> p(7);
  p.indices() << 0, 1, 2, 4, 3, 6, 5;
  EXPECT_EQ(Matrix(p.transpose() * c * p), c);
}

TEST(DissentingSubjects, FigureEightConfiguration) {
  const InteractionMatrix c = dissenting_subjects(
      VariationSpec::two_betas(VariationKind::DissentingSubjects, kDissentRow, 0.5, 0.49));
  Matrix expected = hand_star(kDissentRow);
  expected.row(6).setZero();
  expected(6, 0) = 1.0 - 0.5;
  expected(6, 7) = 0.5;
  expected.row(7).setZero();
  expected(7, 0) = 1.0 - 0.49;
  expected(7, 6) = 0.49;
  EXPECT_EQ(c.matrix(), expected);
  EXPECT_TRUE(c.report().ok());
  EXPECT_FALSE(detect_star(c));
}

TEST(DissentingSubjects, SwapSymmetry) {
  const std::vector<double> row{0, 0.2, 0.2, 0.3, 0.3};
  const Matrix c = dissenting_subjects(
      VariationSpec::two_betas(VariationKind::DissentingSubjects, row, 0.5, 0.5)).matrix();
  Eigen::PermutationMatrix<Eigen::Dynamic> p(5);
  p.indices() << 0, 1, 2, 4, 3;
  EXPECT_EQ(Matrix(p.transpose() * c * p), c);
}

TEST(DissentingSubjects, AllCentreWeightsPositive) {
  std::vector<double> row = kDissentRow;
  row[7] = 0.0;
  row[6] = 0.5;
  EXPECT_THROW(dissenting_subjects(
                   VariationSpec::two_betas(VariationKind::DissentingSubjects, row, 0.5, 0.5)),
               ConstraintError);
}

TEST(LeadershipGroup, FigureSixShape) {
  const double w = 0.8 / 3.0;
  const std::vector<double> r{0, w, w, 0.8 - 2 * w};
  const InteractionMatrix c =
      leadership_group(VariationSpec::leadership_group(r, r, 0.2, 0.2));
  EXPECT_EQ(c.size(), 8u);
  EXPECT_TRUE(c.report().ok());
  EXPECT_FALSE(detect_star(c));
  EXPECT_EQ(c(0, 4), 0.2);
  EXPECT_EQ(c(4, 0), 0.2);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(c(i, 0), 1.0);
  for (std::size_t k = 5; k < 8; ++k) EXPECT_EQ(c(k, 4), 1.0);
  const Vector g = gamma_closed_form(VariationSpec::leadership_group(r, r, 0.2, 0.2)).gamma;
  EXPECT_NEAR(g(0), g(4), 1e-15);
}

TEST(LeadershipGroup, RowsMustAlreadyLeaveRoomForBeta) {
  const std::vector<double> r{0, 0.25, 0.25, 0.5};
  EXPECT_THROW(leadership_group(VariationSpec::leadership_group(r, r, 0.2, 0.2)),
               ConstraintError);
  // The rescale option accepts pre-merge rows.
  const InteractionMatrix c =
      leadership_group(VariationSpec::leadership_group(r, r, 0.2, 0.3, true));
  EXPECT_NEAR(c(0, 1), 0.25 * 0.8, 1e-15);
  EXPECT_NEAR(c(4, 5), 0.25 * 0.7, 1e-15);
  EXPECT_TRUE(c.report().ok());
}

TEST(TopologyProperty, RandomSpecsAreValidAndNotStars) {
  std::mt19937_64 rng(77);
  for (VariationKind kind :
       {VariationKind::SingleAttack, VariationKind::CoordinatedDouble,
        VariationKind::UncoordinatedDouble, VariationKind::DissentingSubjects,
        VariationKind::LeadershipGroup}) {
    for (int trial = 0; trial < 200; ++trial) {
      const VariationSpec s = random_spec(kind, rng, VerifyOptions{});
      const InteractionMatrix c = build(s);
      ASSERT_TRUE(oracle::closure_irreducible(c.matrix())) << to_string(kind);
      ASSERT_EQ(oracle::brute_force_star_center(c.matrix()), -1) << to_string(kind);
      ASSERT_FALSE(detect_star(c));
    }
  }
}

TEST(TopologyProperty, JsonRoundTripIsExact) {
  std::mt19937_64 rng(78);
  for (VariationKind kind :
       {VariationKind::Star, VariationKind::SingleAttack, VariationKind::CoordinatedDouble,
        VariationKind::UncoordinatedDouble, VariationKind::DissentingSubjects,
        VariationKind::LeadershipGroup}) {
    for (int trial = 0; trial < 50; ++trial) {
      const VariationSpec s = random_spec(kind, rng, VerifyOptions{});
      const Matrix c = build(s).matrix();
      const Matrix back = matrix_from_json(json::parse(matrix_to_json(c).dump()));
      ASSERT_EQ(back, c);
      const Matrix from_csv = matrix_from_csv(matrix_to_csv(c));
      ASSERT_EQ(from_csv, c);
      const VariationSpec s2 = spec_from_json(json::parse(spec_to_json(s).dump()));
      ASSERT_EQ(build(s2).matrix(), c);
    }
  }
}

TEST(VariationKind, NamesRoundTrip) {
  for (VariationKind kind :
       {VariationKind::Star, VariationKind::SingleAttack, VariationKind::CoordinatedDouble,
        VariationKind::UncoordinatedDouble, VariationKind::DissentingSubjects,
        VariationKind::LeadershipGroup}) {
    EXPECT_EQ(parse_variation_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_variation_kind("Triangle"), Error);
}
