#include <gtest/gtest.h>

#include <cmath>

#include "sidecomp/errors.hpp"
#include "sidecomp/rkhs.hpp"
#include "test_helpers.hpp"

namespace sidecomp {
namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

double multinomial(const MultiIndex& a) {
  double out = factorial(degree(a));
  for (int v : a) out /= factorial(v);
  return out;
}

TEST(Grid, SizesAndOrder) {
  const TruncationGrid g(2, 2);
  EXPECT_EQ(g.size(), 6);
  EXPECT_EQ(g[0], (MultiIndex{0, 0}));
  EXPECT_EQ(g[1], (MultiIndex{1, 0}));
  EXPECT_EQ(g[2], (MultiIndex{0, 1}));
  const TruncationGrid c(2, 2, GridOrder::graded_colex);
  EXPECT_EQ(c[1], (MultiIndex{0, 1}));
  EXPECT_EQ(TruncationGrid(3, 4).size(), 35);
  const auto interior = g.interior();
  EXPECT_EQ(std::count(interior.begin(), interior.end(), true), 3);
}

TEST(KernelSpec, Coefficients) {
  const auto da = DiagonalKernelSpec::drury_arveson(2);
  EXPECT_NEAR(da.fhat({1, 1}), 2.0, 1e-14);
  EXPECT_NEAR(da.fhat({2, 1}), 3.0, 1e-14);
  const auto b = DiagonalKernelSpec::bergman(1, 2.0);
  EXPECT_NEAR(b.fhat({1}), 2.0, 1e-14);
  EXPECT_NEAR(b.fhat({3}), 4.0, 1e-13);
  EXPECT_THROW(DiagonalKernelSpec::bergman(1, 0.0), InputError);
  EXPECT_THROW(DiagonalKernelSpec::custom(1, {{{0}, 1.0}, {{1}, -1.0}}), InputError);
}

TEST(Weights, Examples) {
  const TruncationGrid g(2, 3);
  const auto w = multishift_weights(DiagonalKernelSpec::drury_arveson(2), g);
  EXPECT_NEAR(w.weights[0](*g.find({1, 0})), 1.0, 1e-15);

  const auto adj = truncated_tuple(DiagonalKernelSpec::drury_arveson(2), g, ShiftMode::adjoint);
  EXPECT_NEAR(std::abs(adj[0](*g.find({0, 1}), *g.find({1, 1}))), std::sqrt(0.5), 1e-15);

  const TruncationGrid g1(1, 4);
  const auto wb = multishift_weights(DiagonalKernelSpec::bergman(1, 2.0), g1);
  EXPECT_NEAR(wb.weights[0](0), std::sqrt(0.5), 1e-15);
}

TEST(TruncatedTuple, ShapesAndAdjointness) {
  const TruncationGrid g(2, 2);
  const auto spec = DiagonalKernelSpec::drury_arveson(2);
  const auto f = truncated_tuple(spec, g, ShiftMode::forward);
  const auto a = truncated_tuple(spec, g, ShiftMode::adjoint);
  EXPECT_EQ(f.dim(), 6);
  for (Index i = 0; i < 2; ++i) EXPECT_EQ((f[i].adjoint() - a[i]).norm(), 0.0);
  EXPECT_EQ(validate_commuting(a, 0.0).max_commutator, 0.0);
}

TEST(TruncatedTuple, InteriorJointKernelIsOneDimensional) {
  const TruncationGrid g(2, 8);
  const auto a = truncated_tuple(DiagonalKernelSpec::drury_arveson(2), g, ShiftMode::adjoint);
  const std::vector<Complex> zero{0.0, 0.0};
  const auto k = joint_kernel(a, zero);
  EXPECT_EQ(k.dimension, 1);
  EXPECT_NEAR(std::abs(k.basis(0, 0)), 1.0, 1e-14);
}

TEST(JointEigenvector, Origin) {
  const TruncationGrid g(2, 5);
  const std::vector<Complex> w{0.0, 0.0};
  const auto v = joint_eigenvector(DiagonalKernelSpec::drury_arveson(2), g, w);
  EXPECT_EQ(v.residual, 0.0);
  EXPECT_EQ(v.v(0), Complex(1.0));
  EXPECT_EQ(v.v.tail(v.v.size() - 1).norm(), 0.0);
}

TEST(JointEigenvector, CoefficientsAndResidual) {
  const TruncationGrid g(2, 12);
  const auto spec = DiagonalKernelSpec::drury_arveson(2);
  const std::vector<Complex> w{0.3, 0.2};
  const auto v = joint_eigenvector(spec, g, w);
  EXPECT_LE(v.residual, 1e-3);
  EXPECT_LE(v.residual, v.tail_bound * (1.0 + 1e-12));
  for (Index j = 0; j < g.size(); ++j) {
    const auto& a = g[j];
    const double expect = std::sqrt(spec.fhat(a)) * std::pow(0.3, a[0]) * std::pow(0.2, a[1]);
    EXPECT_NEAR(std::abs(v.v(j) - expect), 0.0, 1e-14 * std::max(1.0, expect));
  }
}

TEST(Defect, DruryArvesonVacuum) {
  for (Index m : {1, 2, 3}) {
    const TruncationGrid g(m, 5);
    const auto a = truncated_tuple(DiagonalKernelSpec::drury_arveson(m), g, ShiftMode::adjoint);
    const auto d = defect_operator(a);
    EXPECT_LE(d.vacuum_residual, 1e-12);
    EXPECT_EQ(d.rank, 1);
    EXPECT_NEAR(std::abs(d.defect(0, 0) - 1.0), 0.0, 1e-14);
    for (Index j = 1; j < g.size(); ++j) EXPECT_LT(d.defect.col(j).norm(), 1e-14);
  }
}

// P_n = sum_{|alpha| = n} multinomial(alpha) (T^alpha)^* T^alpha, computed
// directly from products of the tuple.
Matrix p_closed_form(const OperatorTuple& t, int n) {
  const Index d = t.dim();
  Matrix out = Matrix::Zero(d, d);
  const TruncationGrid layers(t.arity(), n);
  for (const auto& a : layers.alphas()) {
    if (degree(a) != n) continue;
    Matrix power = Matrix::Identity(d, d);
    for (Index i = 0; i < t.arity(); ++i)
      for (int k = 0; k < a[static_cast<std::size_t>(i)]; ++k) power = t[i] * power;
    out += multinomial(a) * power.adjoint() * power;
  }
  return out;
}

TEST(PSequence, RecursionMatchesClosedForm) {
  const TruncationGrid g(2, 6);
  const auto a = truncated_tuple(DiagonalKernelSpec::drury_arveson(2), g, ShiftMode::adjoint);
  const auto ps = p_sequence(a, g, 4);
  ASSERT_EQ(ps.p.size(), 5u);
  for (int n = 0; n <= 4; ++n) EXPECT_LT((ps.p[static_cast<std::size_t>(n)] - p_closed_form(a, n)).norm(), 1e-12);
  EXPECT_TRUE(ps.psd);
  EXPECT_TRUE(ps.decreasing);
  EXPECT_EQ(ps.vanishing, 0.0);

  // P_1 = I - e_0 e_0^*
  Matrix expect = Matrix::Identity(g.size(), g.size());
  expect(0, 0) = 0.0;
  EXPECT_LT((ps.p[1] - expect).norm(), 1e-12);
  EXPECT_EQ(ps.p[3].col(*g.find({1, 1})).norm(), 0.0);
}

TEST(PSequence, RejectsDegreeBeyondGrid) {
  const TruncationGrid g(1, 3);
  const auto a = truncated_tuple(DiagonalKernelSpec::drury_arveson(1), g, ShiftMode::adjoint);
  EXPECT_THROW(p_sequence(a, g, 4), InputError);
}

TEST(SphericalShift, InteriorIsometry) {
  for (Index m : {2, 3}) {
    const TruncationGrid g(m, 4);
    const auto s = spherical_shift(g);
    Matrix gram = Matrix::Zero(g.size(), g.size());
    for (Index i = 0; i < m; ++i) gram += s.tuple[i].adjoint() * s.tuple[i];
    for (Index j = 0; j < g.size(); ++j) {
      if (!s.interior[static_cast<std::size_t>(j)]) continue;
      EXPECT_NEAR(std::abs(gram(j, j) - 1.0), 0.0, 1e-15);
    }
    EXPECT_FALSE(s.interior.back());
    EXPECT_TRUE(check_sphere_conditions(s.tuple, 1, s.interior).spherical_isometry);
  }
}

TEST(SphereConditions, Examples) {
  const TruncationGrid g(2, 5);
  const auto a = truncated_tuple(DiagonalKernelSpec::drury_arveson(2), g, ShiftMode::adjoint);
  const auto r = check_sphere_conditions(a, 2);
  EXPECT_FALSE(r.spherical_isometry);
  EXPECT_TRUE(r.row_contraction);
  ASSERT_EQ(r.hypercontraction.size(), 2u);
  EXPECT_TRUE(r.hypercontraction[0]);

  const double s = 1.0 / std::sqrt(2.0);
  const OperatorTuple u({s * Matrix::Identity(3, 3), s * Matrix::Identity(3, 3)});
  const auto ru = check_sphere_conditions(u, 1);
  EXPECT_TRUE(ru.spherical_isometry);
  EXPECT_TRUE(ru.spherical_unitary);
}

TEST(ModelHypotheses, DruryArvesonInterior) {
  const TruncationGrid g(2, 6);
  const auto a = truncated_tuple(DiagonalKernelSpec::drury_arveson(2), g, ShiftMode::adjoint);
  const auto r = check_model_hypotheses(a, {}, g.interior());
  EXPECT_TRUE(r.projection);
  EXPECT_TRUE(r.solvable);
  EXPECT_LE(r.max_solve_residual, 1e-8);
}

TEST(ModelHypotheses, ZeroOperator) {
  const auto r = check_model_hypotheses(test::single(Matrix::Zero(2, 2)));
  EXPECT_TRUE(r.projection);
  EXPECT_FALSE(r.solvable);
}

TEST(ModelHypotheses, SphericalShiftProjection) {
  const TruncationGrid g(2, 5);
  const auto s = spherical_shift(g);
  const auto r = check_model_hypotheses(s.tuple, {}, s.interior);
  EXPECT_TRUE(r.projection);
}

TEST(GammaTransform, Examples) {
  const TruncationGrid g(1, 10);
  const auto a = truncated_tuple(DiagonalKernelSpec::hardy_like(1), g, ShiftMode::adjoint);
  const std::vector<std::vector<Complex>> points{{0.0}, {0.5}};
  const auto id = gamma_transform(a, Matrix::Identity(g.size(), g.size()), points);
  ASSERT_EQ(id.size(), 2u);
  EXPECT_FALSE(id[0].skipped);
  EXPECT_NEAR(std::abs(id[0].symbol(0, 0) - 1.0), 0.0, 1e-12);

  // only w = 0 is an exact eigenvalue of the truncation
  const auto self = gamma_transform(a, a[0], points);
  EXPECT_FALSE(self[0].skipped);
  EXPECT_NEAR(std::abs(self[0].symbol(0, 0)), 0.0, 1e-12);
  EXPECT_TRUE(self[0].contraction);
  EXPECT_TRUE(self[1].skipped);

  EXPECT_THROW(gamma_transform(a, Matrix::Random(g.size(), g.size()), points), InputError);
}

}  // namespace
}  // namespace sidecomp
