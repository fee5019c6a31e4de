#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "svtakit/gram.hpp"

namespace svtakit::testing {

Alphabet letters(int count) {
  std::vector<std::string> s;
  for (int i = 0; i < count; ++i) s.emplace_back(1, static_cast<char>('a' + i));
  return Alphabet(std::move(s));
}

Wta scalar_wta(double alpha, double p, double c) {
  return Wta(letters(1), Eigen::VectorXd::Constant(1, alpha), Tensor3(1, 1, 1, {p}),
             {Eigen::VectorXd::Constant(1, c)});
}

Wta random_dense(Rng& rng, int n, int alphabet_size) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd alpha(n);
  for (int i = 0; i < n; ++i) alpha(i) = u(rng);
  std::vector<double> data(static_cast<std::size_t>(n) * n * n);
  for (double& v : data) v = u(rng);
  std::vector<Eigen::VectorXd> terminal;
  for (int s = 0; s < alphabet_size; ++s) {
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = u(rng);
    terminal.push_back(w);
  }
  return Wta(letters(alphabet_size), alpha, Tensor3(n, n, n, std::move(data)), std::move(terminal));
}

Wta random_contractive(Rng& rng, int n, int alphabet_size, double target) {
  Wta a = random_dense(rng, n, alphabet_size);
  for (;;) {
    const TreeGram g = solve_tree_gram(a);
    if (g.report.status == SolveStatus::Converged && estimate_contraction(a, g.gram).rho < target) {
      return a;
    }
    a = scale_gamma(a, 0.8);
  }
}

Eigen::MatrixXd random_invertible(Rng& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd rot = qr.householderQ();
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = 0.5 + std::abs(u(rng)) * 1.5;
  return rot * d + 0.2 * m;
}

namespace {

Tree random_tree_rec(Rng& rng, const Alphabet& alphabet, int size) {
  if (size == 0) {
    std::uniform_int_distribution<int> pick(0, alphabet.size() - 1);
    return Tree::leaf(pick(rng));
  }
  // Weight split points by the number of shapes they admit.
  std::vector<double> w;
  for (int l = 0; l < size; ++l) w.push_back(static_cast<double>(catalan(l)) * static_cast<double>(catalan(size - 1 - l)));
  std::discrete_distribution<int> split(w.begin(), w.end());
  const int l = split(rng);
  Tree left = random_tree_rec(rng, alphabet, l);
  Tree right = random_tree_rec(rng, alphabet, size - 1 - l);
  return Tree::node(left, right);
}

}  // namespace

Tree random_tree(Rng& rng, const Alphabet& alphabet, int size) { return random_tree_rec(rng, alphabet, size); }

Eigen::VectorXd naive_omega(const Wta& a, const Tree& t) {
  if (t.is_leaf()) return a.terminals().at(static_cast<std::size_t>(t.symbol()));
  const Eigen::VectorXd l = naive_omega(a, t.left());
  const Eigen::VectorXd r = naive_omega(a, t.right());
  const int n = a.states();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out(i) += a.transition()(i, j, k) * l(j) * r(k);
  return out;
}

double naive_eval(const Wta& a, const Tree& t) {
  const Eigen::VectorXd w = naive_omega(a, t);
  double acc = 0.0;
  for (int i = 0; i < a.states(); ++i) acc += a.alpha()(i) * w(i);
  return acc;
}

long long catalan(int m) {
  long long c = 1;
  for (int k = 0; k < m; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

int naive_depth(const Tree& t) {
  if (t.is_leaf()) return 0;
  return 1 + std::max(naive_depth(t.left()), naive_depth(t.right()));
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

Wcfg random_pcfg(Rng& rng, int nonterminals, int terminals) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Wcfg g;
  for (int i = 0; i < nonterminals; ++i) g.nonterminals.push_back("N" + std::to_string(i));
  for (int x = 0; x < terminals; ++x) g.terminals.emplace_back(1, static_cast<char>('a' + x));
  double root_total = 0.0;
  for (int a = 0; a < nonterminals; ++a) root_total += g.root[a] = u(rng);
  for (auto& [a, w] : g.root) w /= root_total;
  for (int a = 0; a < nonterminals; ++a) {
    // Lexical mass dominates so the grammar stays consistent.
    double total = 0.0;
    for (int b = 0; b < nonterminals; ++b)
      for (int c = 0; c < nonterminals; ++c) total += g.binary[{a, b, c}] = 0.3 * u(rng);
    for (int x = 0; x < terminals; ++x) total += g.lexical[{a, x}] = 2.0 * u(rng);
    for (int b = 0; b < nonterminals; ++b)
      for (int c = 0; c < nonterminals; ++c) g.binary[{a, b, c}] /= total;
    for (int x = 0; x < terminals; ++x) g.lexical[{a, x}] /= total;
  }
  return g;
}

namespace {

int count_nodes(const Tree& t) { return t.is_leaf() ? 1 : 1 + count_nodes(t.left()) + count_nodes(t.right()); }

// Product of rule weights with labels assigned to nodes in preorder;
// `next` walks the label sequence.
double labeled_weight(const Wcfg& g, const Tree& t, const std::vector<int>& labels, std::size_t& next) {
  const int a = labels[next++];
  if (t.is_leaf()) {
    auto it = g.lexical.find({a, t.symbol()});
    return it == g.lexical.end() ? 0.0 : it->second;
  }
  const int b = labels[next];
  const double left = labeled_weight(g, t.left(), labels, next);
  const int c = labels[next];
  const double right = labeled_weight(g, t.right(), labels, next);
  auto it = g.binary.find({a, b, c});
  return (it == g.binary.end() ? 0.0 : it->second) * left * right;
}

}  // namespace

double derivation_sum(const Wcfg& g, const Tree& shape) {
  const int n = static_cast<int>(g.nonterminals.size());
  std::vector<int> labels(static_cast<std::size_t>(count_nodes(shape)), 0);
  double total = 0.0;
  for (;;) {
    auto root = g.root.find(labels[0]);
    std::size_t next = 0;
    total += (root == g.root.end() ? 0.0 : root->second) * labeled_weight(g, shape, labels, next);
    std::size_t i = 0;
    while (i < labels.size() && ++labels[i] == n) labels[i++] = 0;
    if (i == labels.size()) break;
  }
  return total;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::InvalidArgument;
}

}  // namespace svtakit::testing
