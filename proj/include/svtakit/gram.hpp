#pragma once

#include <vector>

#include <Eigen/Dense>

#include "svtakit/wta.hpp"

namespace svtakit {

struct SolverOptions {
  double tolerance = 1e-12;      ///< absolute bound on ||F(G) - G||_F
  long max_iterations = 100000;
  double divergence_cap = 1e12;  ///< iterate norm treated as divergence
};

enum class SolveStatus { Converged, Diverged, MaxIterations };

struct ConvergenceReport {
  SolveStatus status = SolveStatus::Converged;
  long iterations = 0;
  double final_residual = 0.0;
  /// Ratio of the last two residuals; estimates the linear rate.
  double contraction_estimate = 0.0;
  bool diverged = false;
  /// Residual ||F(G_k) - G_k||_F at every iteration k = 0, 1, ...
  std::vector<double> residuals;
};

struct TreeGram {
  Eigen::MatrixXd gram;
  ConvergenceReport report;
};

struct GramPair {
  Eigen::MatrixXd g_trees;     ///< sum over trees of omega(t) omega(t)^T
  Eigen::MatrixXd g_contexts;  ///< sum over contexts of alpha(c) alpha(c)^T
  ConvergenceReport report;
};

/// Matrices here are the column-major reshapes of the Kronecker-space
/// vectors: s = vec(G_T), q = vec(G_C).

/// F(G) = sum_sigma omega_sigma omega_sigma^T + sum T(i,j,k) T(i',j',k') G(j,j') G(k,k').
Eigen::MatrixXd gram_map(const Wta& a, const Eigen::MatrixXd& g);

/// Iterates G <- F(G) from G = 0 until ||F(G) - G||_F <= tolerance.
/// Never throws on divergence; inspect report.status.
TreeGram solve_tree_gram(const Wta& a, const SolverOptions& opts = {});

/// Same as solve_tree_gram but throws Error(Diverged) or Error(MaxIterations).
TreeGram tree_gram_fixed_point(const Wta& a, const SolverOptions& opts = {});

/// Cross Gram sum_t omega_A(t) omega_B(t)^T (n_A x n_B), so that
/// sum_t f_A(t) f_B(t) = alpha_A^T G alpha_B. Throws like tree_gram_fixed_point
/// and Error(AlphabetMismatch).
TreeGram cross_tree_gram(const Wta& a, const Wta& b, const SolverOptions& opts = {});

/// Solves G_C = alpha alpha^T + E^T(G_C), i.e. (I - E)^T q = alpha (x) alpha
/// with E = T(I, s, I) + T(I, I, s) in Kronecker space. Dense LU when
/// n^2 <= 4096, matrix-free Neumann iteration otherwise. Throws
/// Error(SingularSystem) when I - E is singular or the iteration fails.
Eigen::MatrixXd context_gram(const Wta& a, const Eigen::MatrixXd& g_trees,
                             const SolverOptions& opts = {});

GramPair gram_matrices(const Wta& a, const SolverOptions& opts = {});

struct ContractionEstimate {
  double rho = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Spectral radius of the Jacobian H -> sum T T' [G(j,j') H(k,k') + H(j,j') G(k,k')]
/// of F at G, by power iteration from the identity (200 steps or 1e-8
/// stabilization).
ContractionEstimate estimate_contraction(const Wta& a, const Eigen::MatrixXd& g_trees);

struct GammaSearch {
  double gamma = 1.0;
  /// Still convergent at gamma = 2^20; `gamma` is then 2^20.
  bool no_upper_bracket = false;
};

/// Largest gamma (relative precision 1e-3) for which scale_gamma(A, gamma)
/// keeps a convergent tree-Gram fixed point. Throws Error(Diverged) when A
/// itself does not converge.
GammaSearch max_convergent_gamma(const Wta& a, const SolverOptions& opts = {});

}  // namespace svtakit
