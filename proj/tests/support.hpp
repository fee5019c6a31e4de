#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svtakit/error.hpp"
#include "svtakit/grammar.hpp"
#include "svtakit/trees.hpp"
#include "svtakit/wta.hpp"

namespace svtakit::testing {

using Rng = std::mt19937_64;

/// {a}, {a, b}, {a, b, c}, ...
Alphabet letters(int count);

/// One state over {a}: alpha = [alpha], T = [p], omega_a = [c].
Wta scalar_wta(double alpha, double p, double c);

/// Entries uniform in [-1, 1].
Wta random_dense(Rng& rng, int n, int alphabet_size);

/// random_dense with T shrunk by 0.8 until the tree Gram converges and its
/// contraction estimate is below `target`.
Wta random_contractive(Rng& rng, int n, int alphabet_size, double target);

/// Well-conditioned random matrix (identity plus a small perturbation,
/// rotated).
Eigen::MatrixXd random_invertible(Rng& rng, int n);

/// Uniformly shaped random tree of the given size.
Tree random_tree(Rng& rng, const Alphabet& alphabet, int size);

/// Plain index-loop evaluation, independent of the library's contractions.
Eigen::VectorXd naive_omega(const Wta& a, const Tree& t);
double naive_eval(const Wta& a, const Tree& t);

/// Catalan number from the product formula.
long long catalan(int m);

/// Depth by direct recursion.
int naive_depth(const Tree& t);

/// Proper PCFG with all rules present: for every nonterminal the binary and
/// lexical weights sum to 1, and so do the root weights.
Wcfg random_pcfg(Rng& rng, int nonterminals, int terminals);

/// Sum over every nonterminal labeling of the tree's nodes of the product of
/// rule weights, enumerating all n^(nodes) labelings. Leaf symbols index the
/// grammar's terminals.
double derivation_sum(const Wcfg& g, const Tree& shape);

double rel_err(double got, double want);

/// Code of the Error thrown by f; InvalidArgument plus a test failure when
/// nothing is thrown.
Errc code_of(const std::function<void()>& f);

}  // namespace svtakit::testing
