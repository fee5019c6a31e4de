#include "svtakit/gram.hpp"

#include <cmath>
#include <limits>

#include "gram_kernels.hpp"
#include "svtakit/error.hpp"

namespace svtakit {

namespace detail {

// Q(X, Y)(i, i') = sum T_A(i,j,k) T_B(i',j',k') X(j,j') Y(k,k'), column i'
// obtained as T_A,(1) vec(X T_B,i' Y^T) with row-major vec.
Eigen::MatrixXd bilinear(const Tensor3& ta, const Tensor3& tb, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y) {
  const int na = ta.dim1();
  const int nb = tb.dim1();
  Eigen::Map<const RowMajorMatrix> ta1(ta.data().data(), na, static_cast<Eigen::Index>(na) * na);
  Eigen::MatrixXd out(na, nb);
  RowMajorMatrix m(na, na);
  for (int ip = 0; ip < nb; ++ip) {
    m.noalias() = x * tb.slice(ip) * y.transpose();
    out.col(ip).noalias() = ta1 * Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  }
  return out;
}

// Adjoint of E in matrix form:
//   L(G)(m,m') = sum T(i,m,k) T(i',m',k') G(i,i') G_T(k,k')
//              + sum T(i,k,m) T(i',k',m') G(i,i') G_T(k,k').
Eigen::MatrixXd context_map(const Tensor3& t, const Eigen::MatrixXd& g, const Eigen::MatrixXd& gt) {
  const int n = t.dim1();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Tensor3 w1 = t.contract(g.transpose(), id, gt.transpose());
  const Tensor3 w2 = t.contract(g.transpose(), gt.transpose(), id);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    out.noalias() += t.slice(i) * w1.slice(i).transpose();
    out.noalias() += t.slice(i).transpose() * w2.slice(i);
  }
  return out;
}

}  // namespace detail

namespace {

using detail::bilinear;
using detail::context_map;

Eigen::MatrixXd leaf_gram(const Wta& a, const Wta& b) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(a.states(), b.states());
  for (int s = 0; s < a.alphabet().size(); ++s) c.noalias() += a.terminal(s) * b.terminal(s).transpose();
  return c;
}

TreeGram iterate(const Tensor3& ta, const Tensor3& tb, const Eigen::MatrixXd& c, bool symmetric,
                 const SolverOptions& opts) {
  if (!(opts.tolerance > 0.0) || opts.max_iterations < 1) {
    raise(Errc::InvalidArgument, "solver needs tolerance > 0 and max_iterations >= 1");
  }
  TreeGram out{Eigen::MatrixXd::Zero(c.rows(), c.cols()), {}};
  auto& rep = out.report;
  double prev = std::numeric_limits<double>::infinity();
  int non_decreasing = 0;
  rep.status = SolveStatus::MaxIterations;
  for (long k = 0; k <= opts.max_iterations; ++k) {
    Eigen::MatrixXd next = c + bilinear(ta, tb, out.gram, out.gram);
    if (symmetric) next = 0.5 * (next + next.transpose()).eval();
    const double r = (next - out.gram).norm();
    rep.residuals.push_back(r);
    rep.iterations = k;
    rep.final_residual = r;
    if (!std::isfinite(r) || !(next.norm() <= opts.divergence_cap)) {
      rep.status = SolveStatus::Diverged;
      break;
    }
    if (r <= opts.tolerance) {
      rep.status = SolveStatus::Converged;
      break;
    }
    if (k == opts.max_iterations) break;
    non_decreasing = r >= prev ? non_decreasing + 1 : 0;
    if (non_decreasing >= 100) {
      rep.status = SolveStatus::Diverged;
      break;
    }
    prev = r;
    out.gram = std::move(next);
  }
  const auto& h = rep.residuals;
  if (h.size() >= 2 && h[h.size() - 2] > 0.0) rep.contraction_estimate = h.back() / h[h.size() - 2];
  rep.diverged = rep.status == SolveStatus::Diverged;
  return out;
}

void throw_on_failure(const ConvergenceReport& rep) {
  if (rep.status == SolveStatus::Diverged) {
    raise(Errc::Diverged, "tree Gram fixed point diverged after " + std::to_string(rep.iterations) +
                              " iterations (residual " + std::to_string(rep.final_residual) +
                              "); the automaton is not strongly convergent");
  }
  if (rep.status == SolveStatus::MaxIterations) {
    raise(Errc::MaxIterations, "tree Gram fixed point not converged after " +
                                   std::to_string(rep.iterations) + " iterations (residual " +
                                   std::to_string(rep.final_residual) + ")");
  }
}

constexpr int kDenseContextLimit = 4096;

Eigen::MatrixXd context_gram_dense(const Wta& a, const Eigen::MatrixXd& gt) {
  const int n = a.states();
  const Tensor3& t = a.transition();
  // A_m(i,k) = T(i,m,k), B_m(i,k) = T(i,k,m).
  std::vector<Eigen::MatrixXd> am(static_cast<std::size_t>(n), Eigen::MatrixXd(n, n));
  std::vector<Eigen::MatrixXd> bm(static_cast<std::size_t>(n), Eigen::MatrixXd(n, n));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        am[static_cast<std::size_t>(m)](i, k) = t(i, m, k);
        bm[static_cast<std::size_t>(m)](i, k) = t(i, k, m);
      }
  std::vector<Eigen::MatrixXd> pa;
  std::vector<Eigen::MatrixXd> pb;
  for (int m = 0; m < n; ++m) {
    pa.emplace_back(am[static_cast<std::size_t>(m)] * gt);
    pb.emplace_back(bm[static_cast<std::size_t>(m)] * gt);
  }
  const int nn = n * n;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(nn, nn);
  Eigen::MatrixXd block(n, n);
  for (int mp = 0; mp < n; ++mp)
    for (int m = 0; m < n; ++m) {
      const auto um = static_cast<std::size_t>(m);
      const auto ump = static_cast<std::size_t>(mp);
      block.noalias() = pa[um] * am[ump].transpose();
      block.noalias() += pb[um] * bm[ump].transpose();
      const int row = m + n * mp;
      for (int ip = 0; ip < n; ++ip)
        for (int i = 0; i < n; ++i) sys(row, i + n * ip) -= block(i, ip);
    }
  Eigen::MatrixXd rhs_m = a.alpha() * a.alpha().transpose();
  Eigen::Map<const Eigen::VectorXd> rhs(rhs_m.data(), nn);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13)) {
    raise(Errc::SingularSystem, "context Gram system is singular (rcond " + std::to_string(rcond) + ")");
  }
  Eigen::VectorXd q = lu.solve(rhs);
  if (!q.allFinite()) raise(Errc::SingularSystem, "context Gram solve produced non-finite values");
  return Eigen::Map<const Eigen::MatrixXd>(q.data(), n, n);
}

Eigen::MatrixXd context_gram_iterative(const Wta& a, const Eigen::MatrixXd& gt,
                                       const SolverOptions& opts) {
  const Eigen::MatrixXd base = a.alpha() * a.alpha().transpose();
  Eigen::MatrixXd g = base;
  for (long k = 0; k < opts.max_iterations; ++k) {
    Eigen::MatrixXd next = base + context_map(a.transition(), g, gt);
    next = 0.5 * (next + next.transpose()).eval();
    const double r = (next - g).norm();
    g = std::move(next);
    if (!std::isfinite(r) || !(g.norm() <= opts.divergence_cap)) break;
    if (r <= opts.tolerance) return g;
  }
  raise(Errc::SingularSystem, "context Gram Neumann iteration did not converge");
}

}  // namespace

Eigen::MatrixXd gram_map(const Wta& a, const Eigen::MatrixXd& g) {
  if (g.rows() != a.states() || g.cols() != a.states()) {
    raise(Errc::InvalidArgument, "Gram matrix must be n x n");
  }
  return leaf_gram(a, a) + bilinear(a.transition(), a.transition(), g, g);
}

TreeGram solve_tree_gram(const Wta& a, const SolverOptions& opts) {
  return iterate(a.transition(), a.transition(), leaf_gram(a, a), true, opts);
}

TreeGram tree_gram_fixed_point(const Wta& a, const SolverOptions& opts) {
  TreeGram out = solve_tree_gram(a, opts);
  throw_on_failure(out.report);
  return out;
}

TreeGram cross_tree_gram(const Wta& a, const Wta& b, const SolverOptions& opts) {
  if (!(a.alphabet() == b.alphabet())) {
    raise(Errc::AlphabetMismatch, "automata are defined over different alphabets");
  }
  TreeGram out = iterate(a.transition(), b.transition(), leaf_gram(a, b), false, opts);
  throw_on_failure(out.report);
  return out;
}

Eigen::MatrixXd context_gram(const Wta& a, const Eigen::MatrixXd& g_trees, const SolverOptions& opts) {
  const int n = a.states();
  if (g_trees.rows() != n || g_trees.cols() != n) {
    raise(Errc::InvalidArgument, "tree Gram matrix must be n x n");
  }
  Eigen::MatrixXd g = n * n <= kDenseContextLimit ? context_gram_dense(a, g_trees)
                                                  : context_gram_iterative(a, g_trees, opts);
  return 0.5 * (g + g.transpose());
}

GramPair gram_matrices(const Wta& a, const SolverOptions& opts) {
  TreeGram tg = tree_gram_fixed_point(a, opts);
  Eigen::MatrixXd gc = context_gram(a, tg.gram, opts);
  return GramPair{std::move(tg.gram), std::move(gc), std::move(tg.report)};
}

ContractionEstimate estimate_contraction(const Wta& a, const Eigen::MatrixXd& g_trees) {
  const int n = a.states();
  if (g_trees.rows() != n || g_trees.cols() != n) {
    raise(Errc::InvalidArgument, "tree Gram matrix must be n x n");
  }
  const Tensor3& t = a.transition();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) / std::sqrt(static_cast<double>(n));
  ContractionEstimate est;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= 200; ++it) {
    Eigen::MatrixXd jh = bilinear(t, t, g_trees, h) + bilinear(t, t, h, g_trees);
    const double norm = jh.norm();
    est.rho = norm;
    est.iterations = it;
    if (norm == 0.0 || std::abs(norm - prev) <= 1e-8) {
      est.converged = true;
      return est;
    }
    prev = norm;
    h = jh / norm;
  }
  return est;
}

GammaSearch max_convergent_gamma(const Wta& a, const SolverOptions& opts) {
  auto converges = [&](double gamma) {
    return solve_tree_gram(scale_gamma(a, gamma), opts).report.status == SolveStatus::Converged;
  };
  if (!converges(1.0)) {
    raise(Errc::Diverged, "the automaton is not strongly convergent at gamma = 1");
  }
  constexpr double kLimit = 1048576.0;  // 2^20
  double lo = 1.0;
  double hi = 2.0;
  while (converges(hi)) {
    lo = hi;
    if (hi >= kLimit) return GammaSearch{hi, true};
    hi *= 2.0;
  }
  while (hi - lo > 1e-3 * lo) {
    const double mid = 0.5 * (lo + hi);
    (converges(mid) ? lo : hi) = mid;
  }
  return GammaSearch{lo, false};
}

}  // namespace svtakit
