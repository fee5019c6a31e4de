#pragma once

#include <vector>

#include <Eigen/Dense>

#include "svtakit/gram.hpp"
#include "svtakit/trees.hpp"
#include "svtakit/wta.hpp"

namespace svtakit {

/// sqrt(sum_t (f_A(t) - f_B(t))^2), from the three cross Grams A/A, A/B and
/// B/B, each iterated past the tolerance down to rounding level because the
/// sums cancel. Radicands in [-1e-10, 0) clamp to 0; below that
/// Error(NegativeRadicand).
double l2_distance(const Wta& a, const Wta& b, const SolverOptions& opts = {});

/// 2^(-H) with H = sum_t p(t) log2 q(t), where p and q are the reference and
/// model weights normalized over the test set. Throws Error(EmptyTestSet) or
/// Error(NonPositiveWeight).
double perplexity(const Wta& model, const Wta& reference, const std::vector<Tree>& test);

struct MetricReport {
  double l2_squared = 0.0;
  double l2 = 0.0;
  double perplexity = 0.0;  ///< NaN when no test set was given
  double tail_bound = 0.0;  ///< zero for Gram-based distances
};

MetricReport compare_series(const Wta& original, const Wta& approximation,
                            const std::vector<Tree>& test, const SolverOptions& opts = {});

/// Finite Hankel block H(c, t) = f(c[t]) over all contexts and trees up to
/// the given sizes, in enumeration order.
struct HankelBlock {
  std::vector<Context> rows;
  std::vector<Tree> cols;
  Eigen::MatrixXd entries;
};

HankelBlock hankel_block(const Wta& a, int max_context_size, int max_tree_size,
                         int cap = kDefaultEnumerationCap);

/// Singular values, non-increasing.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& m);

/// Numerical rank: singular values above cutoff * largest.
int numerical_rank(const Eigen::MatrixXd& m, double cutoff = 1e-8);

/// result[m] = sum over trees of size exactly m of omega(t) omega(t)^T.
std::vector<Eigen::MatrixXd> tree_gram_by_size(const Wta& a, int max_size);
/// result[m] = sum over contexts of size exactly m of alpha(c) alpha(c)^T,
/// given tree_gram_by_size up to at least max_size - 1.
std::vector<Eigen::MatrixXd> context_gram_by_size(const Wta& a, int max_size,
                                                  const std::vector<Eigen::MatrixXd>& tree_grams);

/// Singular values of the Hankel block (contexts of size <= max_context_size
/// x trees of size <= max_tree_size) without materializing it: the block is
/// P S with P^T P and S S^T accumulated by size.
Eigen::VectorXd hankel_block_singular_values(const Wta& a, int max_context_size, int max_tree_size);

struct PartialSum {
  double partial = 0.0;     ///< sum over enumerated trees of size <= max_size of f(t)^2
  double tail_bound = 0.0;  ///< estimate of the remaining sum
};

/// Enumerates trees up to max_size. The tail adds the exact per-size sums
/// alpha^T G^(m) alpha for larger m until they are negligible, then a
/// geometric remainder with ratio max(last observed ratio, contraction
/// estimate); +inf when that ratio is >= 1.
PartialSum brute_force_sum_squares(const Wta& a, int max_size, int cap = kDefaultEnumerationCap);

}  // namespace svtakit
