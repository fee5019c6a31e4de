#include "svtakit/wta.hpp"

#include <cmath>
#include <string>

#include "svtakit/error.hpp"

namespace svtakit {

namespace {

bool finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

Wta::Wta(Alphabet alphabet, Eigen::VectorXd alpha, Tensor3 transition,
         std::vector<Eigen::VectorXd> terminal)
    : alphabet_(std::move(alphabet)),
      alpha_(std::move(alpha)),
      transition_(std::move(transition)),
      terminal_(std::move(terminal)) {
  const int n = states();
  if (n < 1) raise(Errc::InvalidArgument, "automaton needs at least one state");
  if (transition_.dim1() != n || transition_.dim2() != n || transition_.dim3() != n) {
    raise(Errc::InvalidArgument, "transition tensor must be n x n x n with n = " + std::to_string(n));
  }
  if (static_cast<int>(terminal_.size()) != alphabet_.size()) {
    raise(Errc::InvalidArgument, "expected one terminal vector per alphabet symbol");
  }
  for (std::size_t s = 0; s < terminal_.size(); ++s) {
    if (terminal_[s].size() != n) {
      raise(Errc::InvalidArgument,
            "terminal vector of '" + alphabet_.symbol(static_cast<int>(s)) + "' has wrong length");
    }
    if (!finite(terminal_[s])) raise(Errc::InvalidArgument, "non-finite terminal weight");
  }
  if (!finite(alpha_)) raise(Errc::InvalidArgument, "non-finite initial weight");
  if (!transition_.all_finite()) raise(Errc::InvalidArgument, "non-finite transition weight");
}

const Eigen::VectorXd& Wta::terminal(int symbol) const {
  if (symbol < 0 || symbol >= alphabet_.size()) {
    raise(Errc::UnknownSymbol, "symbol index " + std::to_string(symbol) + " not in alphabet");
  }
  return terminal_[static_cast<std::size_t>(symbol)];
}

bool operator==(const Wta& a, const Wta& b) {
  return a.alphabet_ == b.alphabet_ && a.alpha_ == b.alpha_ && a.transition_ == b.transition_ &&
         a.terminal_ == b.terminal_;
}

// ---------------------------------------------------------------------------
// Semantics

Eigen::VectorXd leaf_to_root_vector(const Wta& a, const Tree& t) {
  if (t.is_leaf()) {
    if (t.symbol() == Tree::kHole) raise(Errc::InvalidArgument, "cannot evaluate a placeholder leaf");
    return a.terminal(t.symbol());
  }
  return a.transition().apply(leaf_to_root_vector(a, t.left()), leaf_to_root_vector(a, t.right()));
}

double evaluate(const Wta& a, const Tree& t) { return a.alpha().dot(leaf_to_root_vector(a, t)); }

namespace {

// Xi((c, t))(i, m) = sum_jk T(i, j, k) Xi(c)(j, m) omega(t)_k, and symmetrically.
Eigen::MatrixXd context_matrix_of(const Wta& a, const Tree& shape) {
  const int n = a.states();
  if (shape.is_leaf()) return Eigen::MatrixXd::Identity(n, n);
  const Tensor3& tr = a.transition();
  const bool hole_left = shape.left().hole_count() == 1;
  const Eigen::MatrixXd inner = context_matrix_of(a, hole_left ? shape.left() : shape.right());
  const Eigen::VectorXd w = leaf_to_root_vector(a, hole_left ? shape.right() : shape.left());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    // Row i of the result: (T_i w)^T inner or (T_i^T w)^T inner.
    const Eigen::VectorXd coeff = hole_left ? Eigen::VectorXd(tr.slice(i) * w)
                                            : Eigen::VectorXd(tr.slice(i).transpose() * w);
    out.row(i) = coeff.transpose() * inner;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd context_matrix(const Wta& a, const Context& c) {
  return context_matrix_of(a, c.shape());
}

Eigen::VectorXd context_vector(const Wta& a, const Context& c) {
  return context_matrix(a, c).transpose() * a.alpha();
}

// ---------------------------------------------------------------------------
// Transformations

Wta change_basis(const Wta& a, const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  const int n = a.states();
  if (q.rows() != n || r.cols() != n || q.cols() != r.rows()) {
    raise(Errc::InvalidArgument, "change of basis matrices have inconsistent shapes");
  }
  std::vector<Eigen::VectorXd> terminal;
  terminal.reserve(a.terminals().size());
  for (const auto& w : a.terminals()) terminal.emplace_back(r * w);
  return Wta(a.alphabet(), q.transpose() * a.alpha(),
             a.transition().contract(r.transpose(), q, q), std::move(terminal));
}

Wta conjugate(const Wta& a, const Eigen::MatrixXd& q) {
  const int n = a.states();
  if (q.rows() != n || q.cols() != n) {
    raise(Errc::InvalidArgument, "conjugation matrix must be n x n");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  const auto& sv = svd.singularValues();
  if (!(sv(n - 1) >= 1e-12 * sv(0)) || sv(0) == 0.0) {
    raise(Errc::SingularMatrix, "conjugation matrix is singular at tolerance 1e-12");
  }
  return change_basis(a, q, q.partialPivLu().inverse());
}

namespace {

void check_kron(const Wta& a, const Wta& b, int state_cap) {
  if (!(a.alphabet() == b.alphabet())) {
    raise(Errc::AlphabetMismatch, "automata are defined over different alphabets");
  }
  const long long states = static_cast<long long>(a.states()) * b.states();
  if (states > state_cap) {
    raise(Errc::CapExceeded, "Kronecker automaton would have " + std::to_string(states) +
                                 " states, cap is " + std::to_string(state_cap));
  }
}

Eigen::VectorXd kron_vec(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
  return out;
}

}  // namespace

Wta cross_pair(const Wta& a, const Wta& b, int state_cap) {
  check_kron(a, b, state_cap);
  std::vector<Eigen::VectorXd> terminal;
  for (int s = 0; s < a.alphabet().size(); ++s) {
    terminal.push_back(kron_vec(a.terminal(s), b.terminal(s)));
  }
  return Wta(a.alphabet(), kron_vec(a.alpha(), b.alpha()), kron(a.transition(), b.transition()),
             std::move(terminal));
}

Wta kron_square(const Wta& a, int state_cap) { return cross_pair(a, a, state_cap); }

Wta truncate(const Wta& a, int n_hat) {
  const int n = a.states();
  if (n_hat < 1 || n_hat > n) {
    raise(Errc::BadRank, "rank " + std::to_string(n_hat) + " outside [1, " + std::to_string(n) + "]");
  }
  Tensor3 tr(n_hat, n_hat, n_hat);
  for (int i = 0; i < n_hat; ++i)
    for (int j = 0; j < n_hat; ++j)
      for (int k = 0; k < n_hat; ++k) tr(i, j, k) = a.transition()(i, j, k);
  std::vector<Eigen::VectorXd> terminal;
  for (const auto& w : a.terminals()) terminal.emplace_back(w.head(n_hat));
  return Wta(a.alphabet(), a.alpha().head(n_hat), std::move(tr), std::move(terminal));
}

Wta scale_gamma(const Wta& a, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    raise(Errc::InvalidArgument, "gamma must be a positive finite number");
  }
  std::vector<double> data(a.transition().data().begin(), a.transition().data().end());
  for (double& v : data) v *= gamma;
  const int n = a.states();
  return Wta(a.alphabet(), a.alpha(), Tensor3(n, n, n, std::move(data)), a.terminals());
}

Wta difference(const Wta& a, const Wta& b) {
  if (!(a.alphabet() == b.alphabet())) {
    raise(Errc::AlphabetMismatch, "automata are defined over different alphabets");
  }
  const int na = a.states();
  const int nb = b.states();
  const int n = na + nb;
  Eigen::VectorXd alpha(n);
  alpha << a.alpha(), -b.alpha();
  Tensor3 tr(n, n, n);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < na; ++k) tr(i, j, k) = a.transition()(i, j, k);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j)
      for (int k = 0; k < nb; ++k) tr(na + i, na + j, na + k) = b.transition()(i, j, k);
  std::vector<Eigen::VectorXd> terminal;
  for (int s = 0; s < a.alphabet().size(); ++s) {
    Eigen::VectorXd w(n);
    w << a.terminal(s), b.terminal(s);
    terminal.push_back(std::move(w));
  }
  return Wta(a.alphabet(), std::move(alpha), std::move(tr), std::move(terminal));
}

}  // namespace svtakit
