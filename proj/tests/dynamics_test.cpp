#include <gtest/gtest.h>

#include <random>

#include "dfpower/dfpower.hpp"
#include "oracles.hpp"

using namespace dfpower;
namespace oracle = dfpower::testing;

namespace {

Matrix direct_influence(const Matrix& c, const Vector& x) {
  const Eigen::Index n = c.rows();
  const Matrix xd = x.asDiagonal();
  return xd + (Matrix::Identity(n, n) - xd) * c;
}

Vector y_uniform_draw(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = u(rng);
  return y;
}

}  // namespace

TEST(SelfWeights, RejectsPointsOffTheSimplex) {
  EXPECT_THROW(SelfWeights(Vector::Constant(3, 0.3)), ValidationError);
  EXPECT_THROW(SelfWeights(Vector{{1.2, -0.2, 0.0}}), ValidationError);
  EXPECT_THROW(SelfWeights(Vector{{std::nan(""), 0.5, 0.5}}), NumericInputError);
  EXPECT_THROW(SelfWeights(Vector{}), DimensionError);
  EXPECT_NO_THROW(SelfWeights(Vector{{0.2, 0.3, 0.5}}));
}

TEST(IsVertex, Examples) {
  EXPECT_EQ(is_vertex(SelfWeights::vertex(5, 2)), 2u);
  EXPECT_FALSE(is_vertex(SelfWeights::uniform(5)));
  EXPECT_FALSE(is_vertex(SelfWeights(Vector{{1.0 - 1e-13, 1e-13, 0.0}})));
}

TEST(InfluenceMatrix, RingUniform) {
  const InteractionMatrix c(oracle::ring(3));
  const Matrix w = build_influence_matrix(c, SelfWeights::uniform(3)).matrix();
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(w(i, i), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(w(i, (i + 1) % 3), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(w(i, (i + 2) % 3), 0.0);
  }
}

TEST(InfluenceMatrix, VertexRowIsUnit) {
  std::mt19937_64 rng(4);
  const Matrix cm = oracle::random_irreducible(5, rng);
  const InteractionMatrix c(cm);
  const Matrix w = build_influence_matrix(c, SelfWeights::vertex(5, 0)).matrix();
  EXPECT_EQ(w(0, 0), 1.0);
  for (Eigen::Index j = 1; j < 5; ++j) EXPECT_EQ(w(0, j), 0.0);
  for (Eigen::Index i = 1; i < 5; ++i) {
    EXPECT_EQ(w(i, i), 0.0);
    for (Eigen::Index j = 0; j < 5; ++j) {
      if (j != i) EXPECT_EQ(w(i, j), cm(i, j));
    }
  }
}

TEST(InfluenceMatrix, MatchesDirectFormula) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix cm = oracle::random_irreducible(6, rng);
    const Vector x = oracle::random_interior_point(6, rng);
    const Matrix w = build_influence_matrix(InteractionMatrix(cm), SelfWeights(x)).matrix();
    ASSERT_LE((w - direct_influence(cm, x)).cwiseAbs().maxCoeff(), 1e-15);
    ASSERT_LE((w.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  }
}

TEST(InfluenceMatrix, DimensionMismatch) {
  EXPECT_THROW(build_influence_matrix(InteractionMatrix(oracle::ring(3)),
                                      SelfWeights::uniform(4)),
               DimensionError);
}

TEST(Consensus, EqualOpinionsStopImmediately) {
  const InteractionMatrix c(oracle::ring(4));
  const auto w = build_influence_matrix(c, SelfWeights::uniform(4));
  const auto r = degroot_consensus(w, Vector::Constant(4, 2.5), 1e-12, 10);
  EXPECT_EQ(r.value, 2.5);
  EXPECT_EQ(r.steps, 0u);
}

TEST(Consensus, RingAveragesToOne) {
  const InteractionMatrix c(oracle::ring(3));
  const auto w = build_influence_matrix(c, SelfWeights::uniform(3));
  const auto r = degroot_consensus(w, Vector{{0.0, 1.0, 2.0}}, 1e-12, 100000, true);
  EXPECT_NEAR(r.value, 1.0, 1e-11);
  EXPECT_EQ(r.trajectory.size(), r.steps + 1);

  // Brute force: W^1000 y0.
  Vector y{{0.0, 1.0, 2.0}};
  for (int t = 0; t < 1000; ++t) y = w.matrix() * y;
  EXPECT_NEAR(y(0), 1.0, 1e-12);
}

TEST(Consensus, MatchesLeftEigenvectorOfW) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix cm = oracle::random_irreducible(5, rng);
    const Vector x = oracle::random_interior_point(5, rng);
    const auto w = build_influence_matrix(InteractionMatrix(cm), SelfWeights(x));
    const Vector y0 = y_uniform_draw(rng, 5);
    const auto r = degroot_consensus(w, y0, 1e-10, 10'000'000);
    const Vector zeta = oracle::dense_stationary(direct_influence(cm, x));
    ASSERT_NEAR(r.value, zeta.dot(y0), 1e-8);
  }
}

TEST(Consensus, StepCapRaisesConvergenceError) {
  const InteractionMatrix c(oracle::ring(3));
  const auto w = build_influence_matrix(c, SelfWeights::uniform(3));
  EXPECT_THROW(degroot_consensus(w, Vector{{0.0, 1.0, 2.0}}, 1e-12, 3), ConvergenceError);
  EXPECT_THROW(degroot_consensus(w, Vector{{0.0, 1.0}}, 1e-12, 3), DimensionError);
}

TEST(DfMap, Examples) {
  const Vector g = Vector::Constant(3, 1.0 / 3.0);
  const Vector out = df_map(g, Vector{{0.5, 0.25, 0.25}});
  EXPECT_NEAR(out(0), 3.0 / 7.0, 1e-15);
  EXPECT_NEAR(out(1), 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(out(2), 2.0 / 7.0, 1e-15);

  const Vector e1 = df_map(g, Vector{{1.0, 0.0, 0.0}});
  EXPECT_EQ(e1, (Vector{{1.0, 0.0, 0.0}}));

  const Vector u = Vector::Constant(3, 1.0 / 3.0);
  EXPECT_LE((df_map(g, u) - u).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DfMapProperty, StaysOnSimplex) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> size(3, 10);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = static_cast<std::size_t>(size(rng));
    const Vector g = oracle::random_interior_point(n, rng);
    Vector x = oracle::random_interior_point(n, rng);
    if (trial % 4 == 0) {
      // Squeeze towards a vertex.
      x *= 1e-6;
      x(0) += 1.0 - x.sum();
    }
    const Vector out = df_map(g, x);
    ASSERT_NEAR(out.sum(), 1.0, 1e-12);
    ASSERT_GE(out.minCoeff(), 0.0);
    ASSERT_LE(out.maxCoeff(), 1.0);
  }
}

TEST(SelfAppraisal, VertexAndSymmetricCases) {
  std::mt19937_64 rng(6);
  const InteractionMatrix c(oracle::random_irreducible(4, rng));
  const SelfWeights e2 = SelfWeights::vertex(4, 1);
  EXPECT_EQ(self_appraisal_update(c, e2).values(), e2.values());

  const InteractionMatrix ring(oracle::ring(3));
  const SelfWeights next = self_appraisal_update(ring, SelfWeights::uniform(3));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(next[i], 1.0 / 3.0, 1e-12);
}

TEST(SelfAppraisal, AgreesWithDfMap) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const Matrix cm = oracle::random_irreducible(6, rng);
    const InteractionMatrix c(cm);
    const SelfWeights x(oracle::random_interior_point(6, rng));
    const Vector via_w = self_appraisal_update(c, x).values();
    const Vector via_f = df_map(dominant_left_eigenvector(c), x).values();
    ASSERT_LE((via_w - via_f).cwiseAbs().maxCoeff(), 1e-10);
    // And against the dense solve of W itself.
    const Vector zeta = oracle::dense_stationary(direct_influence(cm, x.values()));
    ASSERT_LE((via_w - zeta).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Iterate, RingConvergesToUniform) {
  const InteractionMatrix c(oracle::ring(3));
  const auto t = iterate_to_equilibrium(c, SelfWeights(Vector{{0.2, 0.3, 0.5}}));
  ASSERT_TRUE(t.converged);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(t.final_state()[i], 1.0 / 3.0, 1e-12);

  // Brute force 10^4 applications of F.
  Vector x{{0.2, 0.3, 0.5}};
  const Vector g = Vector::Constant(3, 1.0 / 3.0);
  for (int s = 0; s < 10000; ++s) x = df_map(g, x);
  EXPECT_LE((x - t.final_state().values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Iterate, IndependentOfStart) {
  std::mt19937_64 rng(23);
  const InteractionMatrix c(oracle::random_irreducible(7, rng));
  const auto a = iterate_to_equilibrium(c, SelfWeights(oracle::random_interior_point(7, rng)));
  const auto b = iterate_to_equilibrium(c, SelfWeights(oracle::random_interior_point(7, rng)));
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_LE((a.final_state().values() - b.final_state().values()).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Iterate, StarCentreBecomesAutocrat) {
  const InteractionMatrix c = star(std::vector<double>(4, 0.25));
  EquilibriumOptions opt;
  opt.stop = [](std::size_t, const Vector& x) { return x(0) > 0.99; };
  const auto t = iterate_to_equilibrium(c, SelfWeights::uniform(5), opt);
  EXPECT_TRUE(t.stopped_early);
  EXPECT_GT(t.final_state()[0], 0.99);
  EXPECT_LT(t.issues, kDefaultMaxIssues);
}

TEST(Iterate, RejectsVertexStart) {
  const InteractionMatrix c(oracle::ring(3));
  EXPECT_THROW(iterate_to_equilibrium(c, SelfWeights::vertex(3, 0)), PreconditionError);
}

TEST(Iterate, RecordsEveryState) {
  const InteractionMatrix c(oracle::ring(4));
  EquilibriumOptions opt;
  opt.record_states = true;
  const auto t = iterate_to_equilibrium(c, SelfWeights(Vector{{0.1, 0.2, 0.3, 0.4}}), opt);
  EXPECT_EQ(t.states.size(), t.issues + 1);
  for (const auto& x : t.states) EXPECT_NEAR(x.values().sum(), 1.0, 1e-12);

  opt.record_states = false;
  const auto u = iterate_to_equilibrium(c, SelfWeights(Vector{{0.1, 0.2, 0.3, 0.4}}), opt);
  EXPECT_EQ(u.states.size(), 2u);
  EXPECT_EQ(u.final_state().values(), t.final_state().values());
}

TEST(IterateProperty, FixedPointResidualAndOrderingLaw) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> size(4, 10);
  std::size_t checked_pairs = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto n = static_cast<std::size_t>(size(rng));
    const InteractionMatrix c(oracle::random_irreducible(n, rng, 0.3));
    if (detect_star(c)) continue;
    const Vector g = dominant_left_eigenvector(c).gamma;
    const auto t = iterate_to_equilibrium(c, SelfWeights(oracle::random_interior_point(n, rng)));
    ASSERT_TRUE(t.converged);
    const Vector x = t.final_state().values();
    ASSERT_LE((df_map(g, x) - x).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      for (Eigen::Index j = 0; j < g.size(); ++j) {
        const double dg = g(i) - g(j);
        if (std::abs(dg) > 1e-6) {
          ++checked_pairs;
          ASSERT_EQ(dg > 0, x(i) - x(j) > 0);
        } else if (std::abs(dg) <= 1e-12) {
          ASSERT_LE(std::abs(x(i) - x(j)), 1e-8);
        }
      }
    }
  }
  EXPECT_GT(checked_pairs, 1000u);
}

TEST(IterateProperty, EqualGammaGivesEqualPower) {
  // Ring with a symmetric chord: nodes 1 and 3 are interchangeable.
  Matrix c = Matrix::Zero(4, 4);
  c(1, 0) = 0.5;
  c(1, 2) = 0.5;
  c(0, 1) = 0.6;
  c(0, 3) = 0.4;
  c(2, 1) = 0.6;
  c(2, 3) = 0.4;
  c(3, 0) = 0.5;
  c(3, 2) = 0.5;
  const InteractionMatrix m(c);
  const Vector g = dominant_left_eigenvector(m).gamma;
  ASSERT_LE(std::abs(g(0) - g(2)), 1e-12);
  const auto t = iterate_to_equilibrium(m, SelfWeights(Vector{{0.1, 0.2, 0.3, 0.4}}));
  ASSERT_TRUE(t.converged);
  EXPECT_LE(std::abs(t.final_state()[0] - t.final_state()[2]), 1e-8);
}
