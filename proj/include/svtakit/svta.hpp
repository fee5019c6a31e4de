#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svtakit/gram.hpp"
#include "svtakit/wta.hpp"

namespace svtakit {

/// A WTA in singular-value canonical form: both Gram matrices equal
/// diag(singular_values), sorted non-increasing.
struct Svta {
  Wta automaton;
  Eigen::VectorXd singular_values;
  /// States of the input surviving the Gram eigenvalue cutoff; equals
  /// automaton.states().
  int effective_rank = 0;
  ConvergenceReport report;
};

/// Relative cutoff below which Gram eigenvalues are treated as zero.
inline constexpr double kEigenCutoff = 1e-10;

/// Canonical form of A. Non-minimal input is first reduced by projecting
/// onto the retained Gram eigenspaces. Throws Error(RankZero) when A computes
/// the zero series, and propagates gram errors.
Svta compute_svta(const Wta& a, const SolverOptions& opts = {});

struct BoundOptions {
  double epsilon = 1e-2;
  int max_leaves = 8;  ///< per_tree is filled for L = 1..max_leaves
  int max_size = 8;    ///< cumulative is filled for M = 1..max_size
};

struct BoundReport {
  int n = 0;
  int n_hat = 0;
  int alphabet_size = 0;
  double s_next = 0.0;  ///< singular value n_hat + 1, zero when n_hat = n
  double epsilon = 0.0;
  std::map<int, double> per_tree;    ///< leaf count L -> bound on |f(t) - f^(t)|
  std::map<int, double> cumulative;  ///< M -> bound on the sum over size(t) < M
  std::optional<int> safe_size_single;      ///< nullopt = unbounded
  std::optional<int> safe_size_cumulative;  ///< nullopt = unbounded
};

struct Truncation {
  Wta automaton;
  BoundReport report;
};

/// Keep the n_hat leading states. Throws Error(BadRank) unless
/// 1 <= n_hat <= effective_rank.
Truncation truncate_svta(const Svta& s, int n_hat, const BoundOptions& opts = {});

/// n^(2 L - 1) s_next for a tree with L leaves.
double bound_per_tree(double s_next, int n, int leaves);

/// ((4 S n^2)^(M+1) - 1) / (4 S n^2 - 1) s_next, bounding the summed error over
/// trees with size < M. Evaluated in extended precision; +inf past 1e300.
double bound_cumulative(double s_next, int n, int alphabet_size, int max_size);

struct SafeSize {
  /// Largest leaf count L with L < (ln(1/s) + ln eps) / (2 ln n).
  std::optional<int> single;
  /// Largest M with M < (ln(1/s) + ln eps) / ln(4 S n^2) - 1.
  std::optional<int> cumulative;
};

/// Sizes certified to keep the error below eps. nullopt means unbounded
/// (s_next = 0, or n = 1 for the single-tree threshold). Negative
/// thresholds clamp to 0.
SafeSize safe_tree_size(double s_next, int n, int alphabet_size, double epsilon);

struct VerifyReport {
  bool passed = true;
  /// Largest excess over each parameter bound (0 when satisfied).
  double worst_omega = 0.0;
  double worst_alpha = 0.0;
  double worst_transition = 0.0;
  double worst_interaction = 0.0;
  /// Worst relative error of the diagonal fixed-point identities.
  double worst_tree_identity = 0.0;
  double worst_context_identity = 0.0;
  std::vector<std::string> violations;
};

/// Checks the canonical-form parameter bounds on the given trees, the
/// interaction decay of T(alpha, I, I), and the diagonal identities
///   s_i = sum_sigma omega_sigma(i)^2 + sum_jk T(i,j,k)^2 s_j s_k
///   s_i = alpha_i^2 + sum_jk (T(j,i,k)^2 + T(j,k,i)^2) s_j s_k.
VerifyReport verify_svta(const Svta& s, const std::vector<Tree>& sample_trees,
                         double bound_slack = 1e-8, double identity_tolerance = 1e-6);

}  // namespace svtakit
