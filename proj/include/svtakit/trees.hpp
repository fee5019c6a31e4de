#pragma once

#include <compare>
#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace svtakit {

/// Text used for the context placeholder leaf. Never a valid alphabet symbol.
inline constexpr std::string_view kHoleText = "*";

/// Default bound on the number of internal nodes enumerated by
/// enumerate_trees / enumerate_contexts. Counts grow like 4^m |S|^(m+1).
inline constexpr int kDefaultEnumerationCap = 10;

/// Ordered list of distinct leaf symbols. Symbol indices follow list order.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols);

  int size() const noexcept { return static_cast<int>(symbols_.size()); }
  const std::string& symbol(int index) const { return symbols_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  std::optional<int> find(std::string_view symbol) const;
  /// Throws Error(UnknownSymbol).
  int index_of(std::string_view symbol) const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

  static bool valid_symbol(std::string_view symbol) noexcept;

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

/// Immutable full binary tree. Leaves carry a symbol index; the special
/// index kHole marks the placeholder leaf of a context. Subtrees are shared.
class Tree {
 public:
  static constexpr int kHole = -1;

  static Tree leaf(int symbol);
  static Tree node(Tree left, Tree right);

  bool is_leaf() const noexcept;
  /// Symbol index of a leaf (kHole for the placeholder).
  int symbol() const;
  const Tree& left() const;
  const Tree& right() const;

  /// Number of internal nodes.
  int size() const noexcept;
  int depth() const noexcept;
  int leaf_count() const noexcept { return size() + 1; }
  /// Total number of nodes, internal plus leaves.
  int node_count() const noexcept { return 2 * size() + 1; }
  int hole_count() const noexcept;

  /// Left-to-right leaf symbols.
  std::vector<int> yield() const;

  friend bool operator==(const Tree& a, const Tree& b);
  /// Size first; then leaves before nodes; leaves by symbol, nodes by
  /// (left, right). This is the enumeration order.
  friend std::strong_ordering operator<=>(const Tree& a, const Tree& b);

 private:
  struct Node;
  explicit Tree(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Tree::Node {
  int symbol = kHole;
  Tree left_child{nullptr};
  Tree right_child{nullptr};
  int size = 0;
  int depth = 0;
  int holes = 0;
};

/// A tree with exactly one placeholder leaf.
class Context {
 public:
  /// The trivial context consisting only of the placeholder.
  static Context hole();
  /// Throws Error(InvalidArgument) unless `shape` has exactly one hole.
  explicit Context(Tree shape);

  const Tree& shape() const noexcept { return shape_; }
  int size() const noexcept { return shape_.size(); }
  /// Distance from the root to the placeholder.
  int drop() const;

  friend bool operator==(const Context& a, const Context& b) { return a.shape_ == b.shape_; }
  friend std::strong_ordering operator<=>(const Context& a, const Context& b) {
    return a.shape_ <=> b.shape_;
  }

 private:
  Tree shape_;
};

/// Plug `t` into the placeholder of `c`.
Tree substitute(const Context& c, const Tree& t);
/// Plug `inner` into the placeholder of `outer`; the result is a context.
Context compose(const Context& outer, const Context& inner);

/// Parse a bracketed tree, e.g. "((a b) c)". Holes are rejected.
Tree parse_tree(std::string_view text, const Alphabet& alphabet);
/// Parse a bracketed context containing exactly one `*`.
Context parse_context(std::string_view text, const Alphabet& alphabet);

/// Canonical text: leaves as symbols, nodes as "(left right)".
std::string to_string(const Tree& t, const Alphabet& alphabet);
std::string to_string(const Context& c, const Alphabet& alphabet);

/// All trees with at most `max_size` internal nodes, size-major and ordered
/// within a size by Tree's ordering. Throws Error(CapExceeded) past `cap`.
std::vector<Tree> enumerate_trees(const Alphabet& alphabet, int max_size,
                                  int cap = kDefaultEnumerationCap);
/// Same for contexts.
std::vector<Context> enumerate_contexts(const Alphabet& alphabet, int max_size,
                                        int cap = kDefaultEnumerationCap);

/// Trees grouped by exact size: result[m] holds all trees of size m.
std::vector<std::vector<Tree>> enumerate_trees_by_size(const Alphabet& alphabet, int max_size,
                                                       int cap = kDefaultEnumerationCap);

/// One tree per line; blank lines and lines starting with '#' are skipped.
std::vector<Tree> read_tree_corpus(std::istream& in, const Alphabet& alphabet);

}  // namespace svtakit
