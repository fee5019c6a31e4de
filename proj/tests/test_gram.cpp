#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"
#include "svtakit/gram.hpp"
#include "svtakit/metrics.hpp"

using namespace svtakit;
using namespace svtakit::testing;

namespace {

// Smaller root of p^2 s^2 - s + c^2 = 0.
double scalar_tree_gram(double p, double c) {
  return (1.0 - std::sqrt(1.0 - 4.0 * p * p * c * c)) / (2.0 * p * p);
}

Eigen::VectorXd omega_with_hole(const Wta& a, const Tree& t, const Eigen::VectorXd& hole) {
  if (t.is_leaf()) return t.symbol() == Tree::kHole ? hole : a.terminal(t.symbol());
  const Eigen::VectorXd l = omega_with_hole(a, t.left(), hole);
  const Eigen::VectorXd r = omega_with_hole(a, t.right(), hole);
  const int n = a.states();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out(i) += a.transition()(i, j, k) * l(j) * r(k);
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (m + m.transpose())).eigenvalues()(0);
}

}  // namespace

TEST(TreeGram, ConstantMapConvergesAtOnce) {
  const TreeGram g = tree_gram_fixed_point(scalar_wta(1.0, 0.0, 0.5));
  EXPECT_DOUBLE_EQ(g.gram(0, 0), 0.25);
  EXPECT_EQ(g.report.status, SolveStatus::Converged);
  EXPECT_LE(g.report.iterations, 1);
}

TEST(TreeGram, ScalarClosedForm) {
  const double want = scalar_tree_gram(0.2, 0.5);
  EXPECT_NEAR(want, (1.0 - std::sqrt(0.96)) / 0.08, 1e-15);
  const TreeGram g = tree_gram_fixed_point(scalar_wta(1.0, 0.2, 0.5));
  EXPECT_NEAR(g.gram(0, 0), want, 1e-10);
  EXPECT_NEAR(g.gram(0, 0), 0.2525513, 1e-7);
  EXPECT_LE(g.report.final_residual, 1e-12);
  EXPECT_EQ(g.report.residuals.size(), static_cast<std::size_t>(g.report.iterations + 1));
}

TEST(TreeGram, DivergentScalar) {
  const Wta a = scalar_wta(1.0, 1.0, 1.0);
  EXPECT_EQ(code_of([&] { tree_gram_fixed_point(a); }), Errc::Diverged);
  const TreeGram g = solve_tree_gram(a);
  EXPECT_EQ(g.report.status, SolveStatus::Diverged);
  EXPECT_TRUE(g.report.diverged);
}

TEST(TreeGram, MaxIterations) {
  SolverOptions opts;
  opts.max_iterations = 3;
  EXPECT_EQ(code_of([&] { tree_gram_fixed_point(scalar_wta(1.0, 0.2, 0.5), opts); }), Errc::MaxIterations);
  opts.tolerance = 0.0;
  EXPECT_EQ(code_of([&] { tree_gram_fixed_point(scalar_wta(1.0, 0.2, 0.5), opts); }), Errc::InvalidArgument);
}

TEST(TreeGram, IteratesEqualDepthTruncatedSums) {
  Rng rng(21);
  for (int s : {1, 2}) {
    const Wta a = random_dense(rng, 2, s);
    const int kmax = s == 1 ? 4 : 3;
    const auto trees = enumerate_trees(a.alphabet(), (1 << (kmax - 1)) - 1);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    for (int k = 1; k <= kmax; ++k) {
      g = gram_map(a, g);
      Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(2, 2);
      for (const Tree& t : trees) {
        if (naive_depth(t) <= k - 1) {
          const Eigen::VectorXd w = naive_omega(a, t);
          oracle += w * w.transpose();
        }
      }
      EXPECT_LT((g - oracle).norm(), 1e-10 * (1.0 + oracle.norm())) << "s=" << s << " k=" << k;
    }
  }
}

TEST(TreeGram, DominatesSizeTruncatedSums) {
  Rng rng(22);
  const Wta a = random_contractive(rng, 3, 1, 0.4);
  const Eigen::MatrixXd g = tree_gram_fixed_point(a).gram;
  EXPECT_LT((g - g.transpose()).norm(), 1e-10);
  const auto by_size = enumerate_trees_by_size(a.alphabet(), 8);
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(3, 3);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (const auto& level : by_size) {
    for (const Tree& t : level) {
      const Eigen::VectorXd w = naive_omega(a, t);
      partial += w * w.transpose();
    }
    EXPECT_GE(min_eigenvalue(g - partial), -1e-12);
    const double gap = (g - partial).norm();
    EXPECT_LE(gap, prev_gap + 1e-15);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-2 * g.norm());
}

TEST(TreeGram, CrossGramMatchesEnumeration) {
  Rng rng(23);
  const Wta a = random_contractive(rng, 2, 1, 0.2);
  const Wta b = random_contractive(rng, 3, 1, 0.2);
  const Eigen::MatrixXd g = cross_tree_gram(a, b).gram;
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(2, 3);
  for (const Tree& t : enumerate_trees(a.alphabet(), 10)) {
    partial += naive_omega(a, t) * naive_omega(b, t).transpose();
  }
  EXPECT_LT((g - partial).norm(), 1e-4 * (1.0 + g.norm()));
  EXPECT_EQ(code_of([&] { cross_tree_gram(a, random_dense(rng, 2, 2)); }), Errc::AlphabetMismatch);
}

TEST(ContextGram, ScalarClosedForms) {
  EXPECT_DOUBLE_EQ(gram_matrices(scalar_wta(1.0, 0.0, 0.5)).g_contexts(0, 0), 1.0);
  const GramPair g = gram_matrices(scalar_wta(1.0, 0.2, 0.5));
  const double s = scalar_tree_gram(0.2, 0.5);
  const double e = 2.0 * 0.04 * s;
  EXPECT_NEAR(e, 0.0202041, 1e-7);
  EXPECT_NEAR(g.g_contexts(0, 0), 1.0 / (1.0 - e), 1e-10);
  EXPECT_NEAR(g.g_contexts(0, 0), 1.0206207, 1e-7);
  EXPECT_NEAR(g.g_trees(0, 0), 0.2525513, 1e-7);
}

TEST(ContextGram, DominatesEnumeratedContexts) {
  Rng rng(24);
  const Wta a = random_contractive(rng, 2, 1, 0.3);
  const GramPair g = gram_matrices(a);
  EXPECT_LT((g.g_contexts - g.g_contexts.transpose()).norm(), 1e-10);
  const auto ctx = enumerate_contexts(a.alphabet(), 8);
  std::vector<Eigen::MatrixXd> by_size(9, Eigen::MatrixXd::Zero(2, 2));
  for (const Context& c : ctx) {
    // alpha(c)_m = f(c[h]) with omega(h) = e_m.
    Eigen::VectorXd v(2);
    for (int m = 0; m < 2; ++m) v(m) = a.alpha().dot(omega_with_hole(a, c.shape(), Eigen::VectorXd::Unit(2, m)));
    by_size[static_cast<std::size_t>(c.size())] += v * v.transpose();
  }
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(2, 2);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (const auto& level : by_size) {
    partial += level;
    EXPECT_GE(min_eigenvalue(g.g_contexts - partial), -1e-12);
    const double gap = (g.g_contexts - partial).norm();
    EXPECT_LE(gap, prev_gap + 1e-15);
    prev_gap = gap;
  }
  // Tail beyond size 8 bounded geometrically by the last two level norms.
  const double last = by_size[8].norm();
  const double ratio = by_size[8].norm() / by_size[7].norm();
  ASSERT_LT(ratio, 1.0);
  EXPECT_LE(prev_gap, 10.0 * last * ratio / (1.0 - ratio) + 1e-12);
}

TEST(ContextGram, IterativePathAgreesWithSizeSums) {
  // n^2 > 4096 takes the matrix-free route.
  Rng rng(25);
  const int n = 65;
  Wta dense = random_dense(rng, n, 1);
  std::vector<double> t(dense.transition().data().begin(), dense.transition().data().end());
  for (double& x : t) x *= 2e-3;
  const Wta a(dense.alphabet(), dense.alpha() / std::sqrt(n), Tensor3(n, n, n, std::move(t)),
              {dense.terminal(0) / std::sqrt(n)});
  const GramPair g = gram_matrices(a);
  const auto gts = tree_gram_by_size(a, 12);
  const auto gcs = context_gram_by_size(a, 12, gts);
  Eigen::MatrixXd gc = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd gt = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : gcs) gc += m;
  for (const auto& m : gts) gt += m;
  EXPECT_LT((g.g_trees - gt).norm(), 1e-9 * gt.norm());
  EXPECT_LT((g.g_contexts - gc).norm(), 1e-9 * gc.norm());
}

TEST(Contraction, ScalarAndDegenerate) {
  const Wta a = scalar_wta(1.0, 0.2, 0.5);
  const ContractionEstimate e = estimate_contraction(a, tree_gram_fixed_point(a).gram);
  EXPECT_NEAR(e.rho, 2.0 * 0.04 * scalar_tree_gram(0.2, 0.5), 1e-10);
  EXPECT_TRUE(e.converged);
  EXPECT_EQ(estimate_contraction(scalar_wta(1.0, 0.0, 0.5), Eigen::MatrixXd::Constant(1, 1, 0.25)).rho, 0.0);
  const Wta div = scalar_wta(1.0, 1.0, 1.0);
  for (double s : {0.5, 1.0, 3.0}) {
    EXPECT_GE(estimate_contraction(div, Eigen::MatrixXd::Constant(1, 1, s)).rho, 1.0 - 1e-12);
  }
  EXPECT_NEAR(estimate_contraction(div, Eigen::MatrixXd::Constant(1, 1, 1.0)).rho, 2.0, 1e-12);
}

TEST(Contraction, RatiosBoundedByEstimate) {
  Rng rng(26);
  for (int rep = 0; rep < 4; ++rep) {
    const Wta a = random_contractive(rng, 3, 2, 0.5);
    const TreeGram g = tree_gram_fixed_point(a);
    const double rho = estimate_contraction(a, g.gram).rho;
    const auto& r = g.report.residuals;
    for (std::size_t k = 11; k < r.size(); ++k) {
      if (r[k - 1] < 1e-14) break;
      EXPECT_LE(r[k] / r[k - 1], rho + 0.05) << "k=" << k;
    }
  }
}

TEST(Gamma, ScalarThreshold) {
  const GammaSearch g = max_convergent_gamma(scalar_wta(1.0, 0.2, 0.5));
  EXPECT_FALSE(g.no_upper_bracket);
  EXPECT_GE(g.gamma, 4.99);
  EXPECT_LE(g.gamma, 5.01);
}

TEST(Gamma, NoInternalWeight) {
  const GammaSearch g = max_convergent_gamma(scalar_wta(1.0, 0.0, 0.5));
  EXPECT_TRUE(g.no_upper_bracket);
  EXPECT_EQ(g.gamma, 1048576.0);
  EXPECT_EQ(code_of([] { max_convergent_gamma(scalar_wta(1.0, 1.0, 1.0)); }), Errc::Diverged);
}
