#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svtakit/wta.hpp"

namespace svtakit {

/// Weighted context-free grammar in Chomsky normal form. Nonterminals and
/// terminals are indexed by position; rules absent from the maps weigh 0.
struct Wcfg {
  std::vector<std::string> nonterminals;
  std::vector<std::string> terminals;
  std::map<std::array<int, 3>, double> binary;  ///< (a, b, c): a -> b c
  std::map<std::pair<int, int>, double> lexical;  ///< (a, x): a -> 'x'
  std::map<int, double> root;                     ///< a: -> a

  friend bool operator==(const Wcfg&, const Wcfg&) = default;
};

/// Text format, one item per line, `#` starts a comment:
///   nonterminals S A          (optional; fixes the order)
///   terminals 'x' 'y'         (optional; fixes the order)
///   root S : 1.0
///   S -> A S : 0.25
///   A -> 'x' : 0.5
/// Without declarations, names are ordered by first appearance. Throws
/// Error(SyntaxError), Error(DuplicateRule) or Error(NameClash).
Wcfg parse_wcfg(std::string_view text);
/// Emits both declaration lines, then root, binary and lexical rules in
/// index order, with shortest round-trip weights.
std::string serialize_wcfg(const Wcfg& g);

/// alpha(i) = weight(-> i), T(i,j,k) = weight(i -> j k), omega_x(i) = weight(i -> x).
Wta wcfg_to_wta(const Wcfg& g);
/// Inverse of wcfg_to_wta: states become nonterminals N0, N1, ... and only
/// nonzero weights are emitted.
Wcfg wta_to_wcfg(const Wta& a);

/// A binarized derivation: either a lexical node (label, terminal) or a
/// binary node (label, left, right).
struct Derivation {
  std::string label;
  std::optional<std::string> terminal;
  std::vector<Derivation> children;  ///< empty or exactly two
};

struct TreeBank {
  std::vector<Derivation> derivations;
};

/// Parses "(A (B 'x') (C 'y'))". Rejects non-binary nodes with
/// Error(SyntaxError).
Derivation parse_derivation(std::string_view text);
/// One derivation per line; blank lines and `#` lines are skipped.
TreeBank parse_treebank(std::istream& in);
TreeBank parse_treebank(std::string_view text);

/// The unlabeled tree of a derivation.
Tree derivation_tree(const Derivation& d, const Alphabet& alphabet);

/// Relative-frequency estimate. Root weights are root-label frequencies.
/// Throws Error(EmptyBank) or Error(NameClash).
Wcfg estimate_mle(const TreeBank& bank);

/// Sum of f_A(t) over all trees t with yield w (inside algorithm, O(|w|^3 n^3)).
/// Throws Error(EmptyString) or Error(UnknownSymbol).
double string_weight(const Wta& a, const std::vector<int>& word);

/// Whitespace-separated symbols; text without whitespace that is not itself
/// a symbol is split into single characters.
std::vector<int> parse_word(std::string_view text, const Alphabet& alphabet);

}  // namespace svtakit
