#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "svtakit/tensor.hpp"
#include "svtakit/trees.hpp"

namespace svtakit {

/// Default bound on the state count of a dense Kronecker automaton
/// (n_A * n_B). The transition tensor has that many states cubed entries.
inline constexpr int kDefaultKronStateCap = 256;

/// Weighted tree automaton <alpha, T, {omega_sigma}> over full binary trees:
///   omega(sigma) = omega_sigma,  omega((t1, t2)) = T(I, omega(t1), omega(t2)),
///   f(t) = alpha . omega(t).
class Wta {
 public:
  /// `terminal[s]` is the vector of alphabet symbol s. Throws
  /// Error(InvalidArgument) on inconsistent dimensions or non-finite entries.
  Wta(Alphabet alphabet, Eigen::VectorXd alpha, Tensor3 transition,
      std::vector<Eigen::VectorXd> terminal);

  int states() const noexcept { return static_cast<int>(alpha_.size()); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const Tensor3& transition() const noexcept { return transition_; }
  const Eigen::VectorXd& terminal(int symbol) const;
  const std::vector<Eigen::VectorXd>& terminals() const noexcept { return terminal_; }

  friend bool operator==(const Wta& a, const Wta& b);

 private:
  Alphabet alphabet_;
  Eigen::VectorXd alpha_;
  Tensor3 transition_;
  std::vector<Eigen::VectorXd> terminal_;
};

/// omega_A(t). Throws Error(UnknownSymbol) for leaves outside the alphabet.
Eigen::VectorXd leaf_to_root_vector(const Wta& a, const Tree& t);
/// f_A(t) = alpha . omega_A(t).
double evaluate(const Wta& a, const Tree& t);

/// Xi_A(c): the n x n matrix with Xi_A(c) omega_A(t) = omega_A(c[t]).
Eigen::MatrixXd context_matrix(const Wta& a, const Context& c);
/// alpha_A(c) = Xi_A(c)^T alpha, so that f_A(c[t]) = alpha_A(c) . omega_A(t).
Eigen::VectorXd context_vector(const Wta& a, const Context& c);

/// A^Q = <Q^T alpha, T(Q^-T, Q, Q), {Q^-1 omega_sigma}>. Throws
/// Error(SingularMatrix) when sigma_min(Q) < 1e-12 sigma_max(Q).
Wta conjugate(const Wta& a, const Eigen::MatrixXd& q);

/// <Q^T alpha, T(R^T, Q, Q), {R omega_sigma}> for an n x r matrix Q and an
/// r x n matrix R. With R = Q^-1 this is conjugate(); with R Q = I on the
/// span of the reachable tree vectors it is an exact state reduction.
Wta change_basis(const Wta& a, const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

/// A (x) A, computing t -> f_A(t)^2.
Wta kron_square(const Wta& a, int state_cap = kDefaultKronStateCap);
/// <alpha_A (x) alpha_B, T_A (x) T_B, {omega^A (x) omega^B}>, computing
/// t -> f_A(t) f_B(t). Throws Error(AlphabetMismatch) or Error(CapExceeded).
Wta cross_pair(const Wta& a, const Wta& b, int state_cap = kDefaultKronStateCap);

/// Keep the first n_hat coordinates of every parameter. Throws Error(BadRank)
/// unless 1 <= n_hat <= n.
Wta truncate(const Wta& a, int n_hat);

/// <alpha, gamma T, {omega_sigma}>, computing t -> gamma^size(t) f(t).
Wta scale_gamma(const Wta& a, double gamma);

/// Block-diagonal sum with the second initial vector negated, computing
/// t -> f_A(t) - f_B(t).
Wta difference(const Wta& a, const Wta& b);

}  // namespace svtakit
