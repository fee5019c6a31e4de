#include "svtakit/metrics.hpp"

#include <cmath>
#include <limits>

#include "gram_kernels.hpp"
#include "svtakit/error.hpp"

namespace svtakit {

namespace {

// alpha_A^T G_AB alpha_B. The three sums cancel in the distance, so after
// the solver's tolerance is met the iteration continues while the residual
// still falls, pushing the Gram error down to rounding level.
double cross_sum(const Wta& a, const Wta& b, const SolverOptions& opts) {
  Eigen::MatrixXd g = cross_tree_gram(a, b, opts).gram;
  Eigen::MatrixXd leaves = Eigen::MatrixXd::Zero(a.states(), b.states());
  for (int s = 0; s < a.alphabet().size(); ++s) leaves += a.terminal(s) * b.terminal(s).transpose();
  double prev = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 100; ++step) {
    Eigen::MatrixXd next = leaves + detail::bilinear(a.transition(), b.transition(), g, g);
    const double r = (next - g).norm();
    if (!(r < prev)) break;
    prev = r;
    g = std::move(next);
  }
  return a.alpha().dot(g * b.alpha());
}

}  // namespace

double l2_distance(const Wta& a, const Wta& b, const SolverOptions& opts) {
  if (!(a.alphabet() == b.alphabet())) {
    raise(Errc::AlphabetMismatch, "automata are defined over different alphabets");
  }
  const double aa = cross_sum(a, a, opts);
  const double ab = cross_sum(a, b, opts);
  const double bb = cross_sum(b, b, opts);
  const double radicand = aa - 2.0 * ab + bb;
  if (radicand < -1e-10) {
    raise(Errc::NegativeRadicand, "squared distance evaluated to " + std::to_string(radicand));
  }
  return radicand > 0.0 ? std::sqrt(radicand) : 0.0;
}

double perplexity(const Wta& model, const Wta& reference, const std::vector<Tree>& test) {
  if (test.empty()) raise(Errc::EmptyTestSet, "perplexity needs at least one test tree");
  std::vector<double> p;
  std::vector<double> q;
  double p_sum = 0.0;
  double q_sum = 0.0;
  for (const Tree& t : test) {
    p.push_back(evaluate(reference, t));
    q.push_back(evaluate(model, t));
    p_sum += p.back();
    q_sum += q.back();
  }
  double h = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double pi = p[i] / p_sum;
    const double qi = q[i] / q_sum;
    if (!(pi > 0.0)) raise(Errc::NonPositiveWeight, "reference weight of test tree " + std::to_string(i) + " is not positive");
    if (!(qi > 0.0)) raise(Errc::NonPositiveWeight, "model weight of test tree " + std::to_string(i) + " is not positive");
    h += pi * std::log2(qi);
  }
  return std::exp2(-h);
}

MetricReport compare_series(const Wta& original, const Wta& approximation,
                            const std::vector<Tree>& test, const SolverOptions& opts) {
  MetricReport rep;
  rep.l2 = l2_distance(original, approximation, opts);
  rep.l2_squared = rep.l2 * rep.l2;
  rep.perplexity = test.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : perplexity(approximation, original, test);
  return rep;
}

// ---------------------------------------------------------------------------
// Hankel blocks

HankelBlock hankel_block(const Wta& a, int max_context_size, int max_tree_size, int cap) {
  HankelBlock block{enumerate_contexts(a.alphabet(), max_context_size, cap),
                    enumerate_trees(a.alphabet(), max_tree_size, cap),
                    {}};
  const int n = a.states();
  Eigen::MatrixXd p(static_cast<Eigen::Index>(block.rows.size()), n);
  Eigen::MatrixXd s(n, static_cast<Eigen::Index>(block.cols.size()));
  for (std::size_t r = 0; r < block.rows.size(); ++r) {
    p.row(static_cast<Eigen::Index>(r)) = context_vector(a, block.rows[r]).transpose();
  }
  for (std::size_t c = 0; c < block.cols.size(); ++c) {
    s.col(static_cast<Eigen::Index>(c)) = leaf_to_root_vector(a, block.cols[c]);
  }
  block.entries = p * s;
  return block;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return {};
  return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
}

int numerical_rank(const Eigen::MatrixXd& m, double cutoff) {
  const Eigen::VectorXd sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  while (r < sv.size() && sv(r) > cutoff * sv(0)) ++r;
  return r;
}

namespace {

// Appends the Gram of trees of size gts.size(): pairs of subtrees with
// sizes summing to one less.
void extend_tree_grams(const Tensor3& t, std::vector<Eigen::MatrixXd>& gts) {
  const std::size_t m = gts.size();
  Eigen::MatrixXd next = Eigen::MatrixXd::Zero(gts[0].rows(), gts[0].cols());
  for (std::size_t a = 0; a < m; ++a) next += detail::bilinear(t, t, gts[a], gts[m - 1 - a]);
  gts.push_back(0.5 * (next + next.transpose()));
}

}  // namespace

std::vector<Eigen::MatrixXd> tree_gram_by_size(const Wta& a, int max_size) {
  if (max_size < 0) raise(Errc::InvalidArgument, "max_size must be non-negative");
  std::vector<Eigen::MatrixXd> gts;
  Eigen::MatrixXd leaves = Eigen::MatrixXd::Zero(a.states(), a.states());
  for (const auto& w : a.terminals()) leaves += w * w.transpose();
  gts.push_back(std::move(leaves));
  while (static_cast<int>(gts.size()) <= max_size) extend_tree_grams(a.transition(), gts);
  return gts;
}

std::vector<Eigen::MatrixXd> context_gram_by_size(const Wta& a, int max_size,
                                                  const std::vector<Eigen::MatrixXd>& tree_grams) {
  if (max_size < 0) raise(Errc::InvalidArgument, "max_size must be non-negative");
  if (static_cast<int>(tree_grams.size()) < max_size) {
    raise(Errc::InvalidArgument, "tree Grams up to size max_size - 1 are required");
  }
  // Every context of size m is c'[(*, t)] or c'[(t, *)] with size(c') + size(t) = m - 1.
  std::vector<Eigen::MatrixXd> gcs;
  gcs.push_back(a.alpha() * a.alpha().transpose());
  for (int m = 1; m <= max_size; ++m) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(a.states(), a.states());
    for (int c = 0; c < m; ++c) {
      next += detail::context_map(a.transition(), gcs[static_cast<std::size_t>(c)],
                                  tree_grams[static_cast<std::size_t>(m - 1 - c)]);
    }
    gcs.push_back(0.5 * (next + next.transpose()));
  }
  return gcs;
}

Eigen::VectorXd hankel_block_singular_values(const Wta& a, int max_context_size, int max_tree_size) {
  const int n = a.states();
  const auto gts = tree_gram_by_size(a, std::max(max_tree_size, max_context_size - 1));
  const auto gcs = context_gram_by_size(a, max_context_size, gts);
  Eigen::MatrixXd gt = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd gc = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m <= max_tree_size; ++m) gt += gts[static_cast<std::size_t>(m)];
  for (int m = 0; m <= max_context_size; ++m) gc += gcs[static_cast<std::size_t>(m)];
  // sigma(P S)^2 = eig(S^T P^T P S) = eig(R^T G_C R) with G_T = R R^T.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(gt);
  const Eigen::MatrixXd r = et.eigenvectors() * et.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(r.transpose() * gc * r);
  return ek.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
}

// ---------------------------------------------------------------------------
// Brute force

PartialSum brute_force_sum_squares(const Wta& a, int max_size, int cap) {
  PartialSum out;
  for (const Tree& t : enumerate_trees(a.alphabet(), max_size, cap)) {
    const double f = evaluate(a, t);
    out.partial += f * f;
  }

  const TreeGram fixed = solve_tree_gram(a);
  if (fixed.report.status != SolveStatus::Converged) {
    out.tail_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  const double rho = estimate_contraction(a, fixed.gram).rho;

  auto gts = tree_gram_by_size(a, max_size);
  double tail = 0.0;
  double last = 0.0;
  double before_last = 0.0;
  constexpr int kHorizon = 400;
  for (int step = 1; step <= kHorizon; ++step) {
    extend_tree_grams(a.transition(), gts);
    before_last = last;
    last = std::max(0.0, a.alpha().dot(gts.back() * a.alpha()));
    tail += last;
    if (last == 0.0 && before_last == 0.0 && step >= 2) break;
    if (step >= 3 && last <= 1e-17 * (out.partial + tail)) break;
  }
  double remainder = 0.0;
  if (last > 0.0) {
    double q = rho;
    if (before_last > 0.0) q = std::max(q, last / before_last);
    remainder = q < 1.0 ? last * q / (1.0 - q) : std::numeric_limits<double>::infinity();
  }
  out.tail_bound = tail + remainder;
  return out;
}

}  // namespace svtakit
