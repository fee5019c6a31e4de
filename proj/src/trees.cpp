#include "svtakit/trees.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "svtakit/error.hpp"

namespace svtakit {

// ---------------------------------------------------------------------------
// Alphabet

bool Alphabet::valid_symbol(std::string_view symbol) noexcept {
  if (symbol.empty() || symbol == kHoleText) return false;
  return std::none_of(symbol.begin(), symbol.end(), [](char ch) {
    return std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')';
  });
}

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) raise(Errc::InvalidArgument, "alphabet must not be empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const auto& s = symbols_[i];
    if (!valid_symbol(s)) raise(Errc::InvalidArgument, "invalid alphabet symbol '" + s + "'");
    if (!index_.emplace(s, static_cast<int>(i)).second) {
      raise(Errc::InvalidArgument, "duplicate alphabet symbol '" + s + "'");
    }
  }
}

std::optional<int> Alphabet::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Alphabet::index_of(std::string_view symbol) const {
  auto found = find(symbol);
  if (!found) raise(Errc::UnknownSymbol, "symbol '" + std::string(symbol) + "' not in alphabet");
  return *found;
}

// ---------------------------------------------------------------------------
// Tree

Tree Tree::leaf(int symbol) {
  auto n = std::make_shared<Node>();
  n->symbol = symbol;
  n->holes = symbol == kHole ? 1 : 0;
  return Tree(std::move(n));
}

Tree Tree::node(Tree left, Tree right) {
  auto n = std::make_shared<Node>();
  n->size = left.size() + right.size() + 1;
  n->depth = std::max(left.depth(), right.depth()) + 1;
  n->holes = left.hole_count() + right.hole_count();
  n->left_child = std::move(left);
  n->right_child = std::move(right);
  return Tree(std::move(n));
}

bool Tree::is_leaf() const noexcept { return node_->left_child.node_ == nullptr; }

int Tree::symbol() const {
  if (!is_leaf()) raise(Errc::InvalidArgument, "symbol() on an internal node");
  return node_->symbol;
}

const Tree& Tree::left() const {
  if (is_leaf()) raise(Errc::InvalidArgument, "left() on a leaf");
  return node_->left_child;
}

const Tree& Tree::right() const {
  if (is_leaf()) raise(Errc::InvalidArgument, "right() on a leaf");
  return node_->right_child;
}

int Tree::size() const noexcept { return node_->size; }
int Tree::depth() const noexcept { return node_->depth; }
int Tree::hole_count() const noexcept { return node_->holes; }

namespace {

void collect_yield(const Tree& t, std::vector<int>& out) {
  if (t.is_leaf()) {
    out.push_back(t.symbol());
    return;
  }
  collect_yield(t.left(), out);
  collect_yield(t.right(), out);
}

}  // namespace

std::vector<int> Tree::yield() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(leaf_count()));
  collect_yield(*this, out);
  return out;
}

bool operator==(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return true;
  if (a.size() != b.size()) return false;
  if (a.is_leaf()) return a.node_->symbol == b.node_->symbol;
  return a.left() == b.left() && a.right() == b.right();
}

std::strong_ordering operator<=>(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  // Equal sizes: both leaves or both internal.
  if (a.is_leaf()) return a.node_->symbol <=> b.node_->symbol;
  if (auto c = a.left() <=> b.left(); c != 0) return c;
  return a.right() <=> b.right();
}

// ---------------------------------------------------------------------------
// Context

Context Context::hole() { return Context(Tree::leaf(Tree::kHole)); }

Context::Context(Tree shape) : shape_(std::move(shape)) {
  if (shape_.hole_count() != 1) {
    raise(Errc::InvalidArgument, "a context needs exactly one placeholder leaf");
  }
}

int Context::drop() const {
  int d = 0;
  const Tree* cur = &shape_;
  while (!cur->is_leaf()) {
    cur = cur->left().hole_count() == 1 ? &cur->left() : &cur->right();
    ++d;
  }
  return d;
}

namespace {

Tree plug(const Tree& shape, const Tree& filler) {
  if (shape.is_leaf()) return shape.symbol() == Tree::kHole ? filler : shape;
  if (shape.left().hole_count() == 1) return Tree::node(plug(shape.left(), filler), shape.right());
  return Tree::node(shape.left(), plug(shape.right(), filler));
}

}  // namespace

Tree substitute(const Context& c, const Tree& t) { return plug(c.shape(), t); }

Context compose(const Context& outer, const Context& inner) {
  return Context(plug(outer.shape(), inner.shape()));
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class TreeParser {
 public:
  TreeParser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

  Tree parse_all() {
    Tree t = parse_one();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    raise(Errc::SyntaxError, why + " at offset " + std::to_string(pos_) + " in '" +
                                 std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Tree parse_one() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char ch = text_[pos_];
    if (ch == ')') fail("unexpected ')'");
    if (ch == '(') {
      ++pos_;
      Tree left = parse_one();
      Tree right = parse_one();
      skip_space();
      if (pos_ >= text_.size()) fail("missing ')'");
      if (text_[pos_] != ')') fail("expected ')' after two subtrees");
      ++pos_;
      return Tree::node(std::move(left), std::move(right));
    }
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos_;
    }
    std::string_view token = text_.substr(start, pos_ - start);
    if (token == kHoleText) return Tree::leaf(Tree::kHole);
    return Tree::leaf(alphabet_.index_of(token));
  }

  std::string_view text_;
  const Alphabet& alphabet_;
  std::size_t pos_ = 0;
};

void write_tree(const Tree& t, const Alphabet& alphabet, std::string& out) {
  if (t.is_leaf()) {
    out += t.symbol() == Tree::kHole ? std::string(kHoleText) : alphabet.symbol(t.symbol());
    return;
  }
  out += '(';
  write_tree(t.left(), alphabet, out);
  out += ' ';
  write_tree(t.right(), alphabet, out);
  out += ')';
}

}  // namespace

Tree parse_tree(std::string_view text, const Alphabet& alphabet) {
  Tree t = TreeParser(text, alphabet).parse_all();
  if (t.hole_count() != 0) raise(Errc::SyntaxError, "placeholder '*' not allowed in a tree");
  return t;
}

Context parse_context(std::string_view text, const Alphabet& alphabet) {
  Tree t = TreeParser(text, alphabet).parse_all();
  if (t.hole_count() != 1) {
    raise(Errc::SyntaxError, "a context needs exactly one '*', got " +
                                 std::to_string(t.hole_count()));
  }
  return Context(std::move(t));
}

std::string to_string(const Tree& t, const Alphabet& alphabet) {
  std::string out;
  write_tree(t, alphabet, out);
  return out;
}

std::string to_string(const Context& c, const Alphabet& alphabet) {
  return to_string(c.shape(), alphabet);
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

void check_cap(int max_size, int cap) {
  if (max_size < 0) raise(Errc::InvalidArgument, "max_size must be non-negative");
  if (max_size > cap) {
    raise(Errc::CapExceeded, "enumeration size " + std::to_string(max_size) +
                                 " exceeds cap " + std::to_string(cap));
  }
}

}  // namespace

std::vector<std::vector<Tree>> enumerate_trees_by_size(const Alphabet& alphabet, int max_size,
                                                       int cap) {
  check_cap(max_size, cap);
  std::vector<std::vector<Tree>> by_size(static_cast<std::size_t>(max_size) + 1);
  for (int s = 0; s < alphabet.size(); ++s) by_size[0].push_back(Tree::leaf(s));
  // Generation order (left size, left, right) coincides with Tree's ordering.
  for (int m = 1; m <= max_size; ++m) {
    auto& level = by_size[static_cast<std::size_t>(m)];
    for (int a = 0; a < m; ++a) {
      for (const Tree& l : by_size[static_cast<std::size_t>(a)]) {
        for (const Tree& r : by_size[static_cast<std::size_t>(m - 1 - a)]) {
          level.push_back(Tree::node(l, r));
        }
      }
    }
  }
  return by_size;
}

std::vector<Tree> enumerate_trees(const Alphabet& alphabet, int max_size, int cap) {
  std::vector<Tree> out;
  for (auto& level : enumerate_trees_by_size(alphabet, max_size, cap)) {
    out.insert(out.end(), std::make_move_iterator(level.begin()),
               std::make_move_iterator(level.end()));
  }
  return out;
}

std::vector<Context> enumerate_contexts(const Alphabet& alphabet, int max_size, int cap) {
  check_cap(max_size, cap);
  auto trees = enumerate_trees_by_size(alphabet, max_size == 0 ? 0 : max_size - 1, cap);
  std::vector<std::vector<Tree>> ctx(static_cast<std::size_t>(max_size) + 1);
  ctx[0].push_back(Tree::leaf(Tree::kHole));
  for (int m = 1; m <= max_size; ++m) {
    auto& level = ctx[static_cast<std::size_t>(m)];
    for (int a = 0; a < m; ++a) {
      const auto b = static_cast<std::size_t>(m - 1 - a);
      for (const Tree& c : ctx[static_cast<std::size_t>(a)]) {
        for (const Tree& t : trees[b]) level.push_back(Tree::node(c, t));
      }
      for (const Tree& t : trees[static_cast<std::size_t>(a)]) {
        for (const Tree& c : ctx[b]) level.push_back(Tree::node(t, c));
      }
    }
    std::sort(level.begin(), level.end());
  }
  std::vector<Context> out;
  for (auto& level : ctx) {
    for (auto& shape : level) out.emplace_back(std::move(shape));
  }
  return out;
}

std::vector<Tree> read_tree_corpus(std::istream& in, const Alphabet& alphabet) {
  std::vector<Tree> out;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_tree(line, alphabet));
  }
  return out;
}

}  // namespace svtakit
