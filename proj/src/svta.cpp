#include "svtakit/svta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "svtakit/error.hpp"

namespace svtakit {

namespace {

// Flip each column so that its largest-magnitude entry is positive.
void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index idx = 0;
    v.col(c).cwiseAbs().maxCoeff(&idx);
    if (v(idx, c) < 0.0) v.col(c) *= -1.0;
  }
}

struct Eig {
  Eigen::VectorXd values;   // non-increasing
  Eigen::MatrixXd vectors;  // matching columns
};

Eig sorted_eig(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success) raise(Errc::SingularSystem, "Gram eigendecomposition failed");
  Eig out{es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
  fix_signs(out.vectors);
  return out;
}

// Eigenvalues at or above kEigenCutoff * scale, where scale is the largest
// eigenvalue of the unreduced Gram so that projected-out noise cannot
// rescale the threshold.
int retained(const Eig& e, double scale, const char* which) {
  if (!(scale > 0.0)) raise(Errc::RankZero, std::string(which) + " Gram matrix is zero; the series vanishes");
  int r = 0;
  while (r < e.values.size() && e.values(r) >= kEigenCutoff * scale) ++r;
  if (r == 0) raise(Errc::RankZero, std::string(which) + " Gram matrix vanishes on the reachable states");
  return r;
}

}  // namespace

Svta compute_svta(const Wta& a, const SolverOptions& opts) {
  GramPair gp = gram_matrices(a, opts);
  Wta cur = a;
  Eigen::MatrixXd gt = gp.g_trees;
  Eigen::MatrixXd gc = gp.g_contexts;

  // Reduce to a minimal automaton: keep the span of the tree vectors, then
  // the span of the context vectors, until neither Gram has a null direction.
  Eig et = sorted_eig(gt);
  Eig ec = sorted_eig(gc);
  const double scale_t = et.values.size() > 0 ? et.values(0) : 0.0;
  const double scale_c = ec.values.size() > 0 ? ec.values(0) : 0.0;
  for (;;) {
    const int n = cur.states();
    const int rt = retained(et, scale_t, "tree");
    const int rc = retained(ec, scale_c, "context");
    if (rt == n && rc == n) break;
    const Eigen::MatrixXd q = rt < n ? et.vectors.leftCols(rt) : ec.vectors.leftCols(rc);
    cur = change_basis(cur, q, q.transpose());
    gt = q.transpose() * gt * q;
    gc = q.transpose() * gc * q;
    et = sorted_eig(gt);
    ec = sorted_eig(gc);
  }

  const Eigen::VectorXd dt_half = et.values.cwiseSqrt();
  const Eigen::VectorXd dc_half = ec.values.cwiseSqrt();
  const Eigen::MatrixXd m =
      dc_half.asDiagonal() * ec.vectors.transpose() * et.vectors * dt_half.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
  Eigen::MatrixXd u = svd.matrixU();
  fix_signs(u);
  const Eigen::VectorXd d = svd.singularValues();
  int r = 0;
  while (r < d.size() && d(r) > 0.0) ++r;
  if (r == 0) raise(Errc::RankZero, "Hankel matrix has rank zero");

  const Eigen::VectorXd dr = d.head(r);
  // Q = V_C D_C^-1/2 U D^1/2 and its (left) inverse D^-1/2 U^T D_C^1/2 V_C^T.
  const Eigen::MatrixXd q = ec.vectors * dc_half.cwiseInverse().asDiagonal() * u.leftCols(r) *
                            dr.cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd q_inv = dr.cwiseSqrt().cwiseInverse().asDiagonal() *
                                u.leftCols(r).transpose() * dc_half.asDiagonal() *
                                ec.vectors.transpose();
  return Svta{change_basis(cur, q, q_inv), dr, r, std::move(gp.report)};
}

// ---------------------------------------------------------------------------
// Error bounds

namespace {

constexpr long double kInfinityThreshold = 1e300L;

double finish(long double v) {
  if (v > kInfinityThreshold) return std::numeric_limits<double>::infinity();
  return static_cast<double>(v);
}

// Largest integer strictly below x, computed conservatively: values within
// rounding noise of an integer m give m - 1. Negative results clamp to 0.
int largest_below(double x) {
  const double shifted = x - 1e-12 * std::max(1.0, std::abs(x));
  const double k = std::ceil(shifted) - 1.0;
  if (k < 0.0) return 0;
  if (k > static_cast<double>(std::numeric_limits<int>::max())) return std::numeric_limits<int>::max();
  return static_cast<int>(k);
}

}  // namespace

double bound_per_tree(double s_next, int n, int leaves) {
  if (leaves < 1) raise(Errc::InvalidArgument, "leaf count must be at least 1");
  if (n < 1) raise(Errc::InvalidArgument, "state count must be at least 1");
  if (s_next == 0.0) return 0.0;
  return finish(std::pow(static_cast<long double>(n), 2.0L * leaves - 1.0L) * s_next);
}

double bound_cumulative(double s_next, int n, int alphabet_size, int max_size) {
  if (max_size < 1) raise(Errc::InvalidArgument, "size cutoff must be at least 1");
  if (n < 1 || alphabet_size < 1) raise(Errc::InvalidArgument, "state and alphabet sizes must be positive");
  if (s_next == 0.0) return 0.0;
  const long double x = 4.0L * alphabet_size * static_cast<long double>(n) * n;
  const long double ratio = (std::pow(x, static_cast<long double>(max_size) + 1.0L) - 1.0L) / (x - 1.0L);
  return finish(ratio * s_next);
}

SafeSize safe_tree_size(double s_next, int n, int alphabet_size, double epsilon) {
  if (!(epsilon > 0.0)) raise(Errc::InvalidArgument, "epsilon must be positive");
  if (!(s_next >= 0.0)) raise(Errc::InvalidArgument, "singular value must be non-negative");
  if (n < 1 || alphabet_size < 1) raise(Errc::InvalidArgument, "state and alphabet sizes must be positive");
  SafeSize out;
  if (s_next == 0.0) return out;
  const double log_ratio = std::log(1.0 / s_next) + std::log(epsilon);
  if (n > 1) out.single = largest_below(log_ratio / (2.0 * std::log(static_cast<double>(n))));
  const double x = 4.0 * alphabet_size * static_cast<double>(n) * n;
  out.cumulative = largest_below(log_ratio / std::log(x) - 1.0);
  return out;
}

Truncation truncate_svta(const Svta& s, int n_hat, const BoundOptions& opts) {
  const int n = s.automaton.states();
  if (n_hat < 1 || n_hat > s.effective_rank) {
    raise(Errc::BadRank, "rank " + std::to_string(n_hat) + " outside [1, " +
                             std::to_string(s.effective_rank) + "]");
  }
  BoundReport rep;
  rep.n = n;
  rep.n_hat = n_hat;
  rep.alphabet_size = s.automaton.alphabet().size();
  rep.s_next = n_hat < n ? s.singular_values(n_hat) : 0.0;
  rep.epsilon = opts.epsilon;
  for (int l = 1; l <= opts.max_leaves; ++l) rep.per_tree[l] = bound_per_tree(rep.s_next, n, l);
  for (int m = 1; m <= opts.max_size; ++m) {
    rep.cumulative[m] = bound_cumulative(rep.s_next, n, rep.alphabet_size, m);
  }
  const SafeSize safe = safe_tree_size(rep.s_next, n, rep.alphabet_size, opts.epsilon);
  rep.safe_size_single = safe.single;
  rep.safe_size_cumulative = safe.cumulative;
  return Truncation{truncate(s.automaton, n_hat), std::move(rep)};
}

// ---------------------------------------------------------------------------
// Verification

VerifyReport verify_svta(const Svta& s, const std::vector<Tree>& sample_trees, double bound_slack,
                         double identity_tolerance) {
  const Wta& a = s.automaton;
  const int n = a.states();
  const Eigen::VectorXd& sv = s.singular_values;
  if (sv.size() != n) raise(Errc::InvalidArgument, "singular value count differs from state count");
  const Eigen::VectorXd root = sv.cwiseSqrt();
  const Tensor3& t = a.transition();
  VerifyReport rep;

  auto record = [&](double& worst, double excess, const std::string& what) {
    if (excess > worst) worst = excess;
    if (excess > bound_slack) {
      rep.passed = false;
      if (rep.violations.size() < 32) {
        std::ostringstream os;
        os << what << " exceeds its bound by " << excess;
        rep.violations.push_back(os.str());
      }
    }
  };

  for (std::size_t idx = 0; idx < sample_trees.size(); ++idx) {
    const Eigen::VectorXd w = leaf_to_root_vector(a, sample_trees[idx]);
    for (int i = 0; i < n; ++i) {
      record(rep.worst_omega, std::abs(w(i)) - root(i),
             "|omega(t)_" + std::to_string(i) + "| for sample tree " + std::to_string(idx));
    }
  }
  for (int i = 0; i < n; ++i) {
    record(rep.worst_alpha, std::abs(a.alpha()(i)) - root(i), "|alpha_" + std::to_string(i) + "|");
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double bound = std::min({root(i) / (root(j) * root(k)), root(j) / (root(i) * root(k)),
                                       root(k) / (root(i) * root(j))});
        record(rep.worst_transition, std::abs(t(i, j, k)) - bound,
               "|T(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")|");
      }

  // M = T(alpha, I, I).
  Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) mm += a.alpha()(i) * t.slice(i);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double bound = n * std::sqrt(std::min(sv(j), sv(k)) / std::max(sv(j), sv(k)));
      record(rep.worst_interaction, std::abs(mm(j, k)) - bound,
             "|M(" + std::to_string(j) + "," + std::to_string(k) + ")|");
    }

  auto identity = [&](double& worst, double rhs, int i, const char* which) {
    const double rel = std::abs(rhs - sv(i)) / sv(i);
    if (rel > worst) worst = rel;
    if (!(rel <= identity_tolerance)) {
      rep.passed = false;
      if (rep.violations.size() < 32) {
        std::ostringstream os;
        os << which << " identity for state " << i << " off by " << rel << " relative";
        rep.violations.push_back(os.str());
      }
    }
  };
  for (int i = 0; i < n; ++i) {
    double tree_rhs = 0.0;
    for (const auto& w : a.terminals()) tree_rhs += w(i) * w(i);
    double ctx_rhs = a.alpha()(i) * a.alpha()(i);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double sjk = sv(j) * sv(k);
        tree_rhs += t(i, j, k) * t(i, j, k) * sjk;
        ctx_rhs += (t(j, i, k) * t(j, i, k) + t(j, k, i) * t(j, k, i)) * sjk;
      }
    identity(rep.worst_tree_identity, tree_rhs, i, "tree Gram");
    identity(rep.worst_context_identity, ctx_rhs, i, "context Gram");
  }
  return rep;
}

}  // namespace svtakit
