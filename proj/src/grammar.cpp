#include "svtakit/grammar.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "svtakit/error.hpp"
#include "svtakit/format.hpp"

namespace svtakit {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool is_quoted(std::string_view tok) {
  return tok.size() >= 3 && tok.front() == '\'' && tok.back() == '\'';
}

class NameTable {
 public:
  int nonterminal(std::string_view name, Wcfg& g, const std::string& where) {
    const std::string key(name);
    if (!Alphabet::valid_symbol(key) || key.front() == '\'' || key == "->" || key == ":") {
      raise(Errc::SyntaxError, where + ": invalid nonterminal name '" + key + "'");
    }
    if (terminals_.count(key)) {
      raise(Errc::NameClash, where + ": '" + key + "' is used both as terminal and nonterminal");
    }
    auto [it, fresh] = nonterminals_.emplace(key, static_cast<int>(g.nonterminals.size()));
    if (fresh) g.nonterminals.push_back(key);
    return it->second;
  }

  int terminal(std::string_view name, Wcfg& g, const std::string& where) {
    const std::string key(name);
    if (!Alphabet::valid_symbol(key)) raise(Errc::SyntaxError, where + ": invalid terminal '" + key + "'");
    if (nonterminals_.count(key)) {
      raise(Errc::NameClash, where + ": '" + key + "' is used both as terminal and nonterminal");
    }
    auto [it, fresh] = terminals_.emplace(key, static_cast<int>(g.terminals.size()));
    if (fresh) g.terminals.push_back(key);
    return it->second;
  }

 private:
  std::unordered_map<std::string, int> nonterminals_;
  std::unordered_map<std::string, int> terminals_;
};

double parse_weight(std::string_view tok, const std::string& where) {
  double w = 0.0;
  try {
    w = parse_double(tok);
  } catch (const Error&) {
    raise(Errc::SyntaxError, where + ": bad weight '" + std::string(tok) + "'");
  }
  if (!std::isfinite(w)) raise(Errc::SyntaxError, where + ": weight must be finite");
  return w;
}

template <class Map, class Key>
void insert_rule(Map& rules, const Key& key, double w, const std::string& where) {
  if (!rules.emplace(key, w).second) raise(Errc::DuplicateRule, where + ": rule defined twice");
}

}  // namespace

Wcfg parse_wcfg(std::string_view text) {
  Wcfg g;
  NameTable names;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto toks = split_ws(line);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].front() == '#') {
        toks.resize(i);
        break;
      }
    }
    if (toks.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const bool is_rule = toks.size() >= 2 && toks[1] == "->";

    if (!is_rule && toks[0] == "nonterminals") {
      for (std::size_t i = 1; i < toks.size(); ++i) names.nonterminal(toks[i], g, where);
    } else if (!is_rule && toks[0] == "terminals") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (!is_quoted(toks[i])) raise(Errc::SyntaxError, where + ": terminals must be quoted");
        names.terminal(toks[i].substr(1, toks[i].size() - 2), g, where);
      }
    } else if (!is_rule && toks[0] == "root") {
      if (toks.size() != 4 || toks[2] != ":") raise(Errc::SyntaxError, where + ": expected 'root A : w'");
      const int a = names.nonterminal(toks[1], g, where);
      insert_rule(g.root, a, parse_weight(toks[3], where), where);
    } else if (is_rule && toks.size() == 5 && toks[3] == ":") {
      if (!is_quoted(toks[2])) {
        raise(Errc::SyntaxError, where + ": unary rules between nonterminals are not supported");
      }
      const int a = names.nonterminal(toks[0], g, where);
      const int x = names.terminal(toks[2].substr(1, toks[2].size() - 2), g, where);
      insert_rule(g.lexical, std::pair{a, x}, parse_weight(toks[4], where), where);
    } else if (is_rule && toks.size() == 6 && toks[4] == ":") {
      if (is_quoted(toks[2]) || is_quoted(toks[3])) {
        raise(Errc::SyntaxError, where + ": binary rules must expand to two nonterminals");
      }
      const int a = names.nonterminal(toks[0], g, where);
      const int b = names.nonterminal(toks[2], g, where);
      const int c = names.nonterminal(toks[3], g, where);
      insert_rule(g.binary, std::array{a, b, c}, parse_weight(toks[5], where), where);
    } else {
      raise(Errc::SyntaxError, where + ": cannot parse '" + std::string(line) + "'");
    }
  }
  return g;
}

std::string serialize_wcfg(const Wcfg& g) {
  std::string out = "nonterminals";
  for (const auto& a : g.nonterminals) out += " " + a;
  out += "\nterminals";
  for (const auto& x : g.terminals) out += " '" + x + "'";
  out += "\n";
  const auto nt = [&](int i) -> const std::string& { return g.nonterminals.at(static_cast<std::size_t>(i)); };
  for (const auto& [a, w] : g.root) out += "root " + nt(a) + " : " + format_double(w) + "\n";
  for (const auto& [r, w] : g.binary) {
    out += nt(r[0]) + " -> " + nt(r[1]) + " " + nt(r[2]) + " : " + format_double(w) + "\n";
  }
  for (const auto& [r, w] : g.lexical) {
    out += nt(r.first) + " -> '" + g.terminals.at(static_cast<std::size_t>(r.second)) +
           "' : " + format_double(w) + "\n";
  }
  return out;
}

Wta wcfg_to_wta(const Wcfg& g) {
  const int n = static_cast<int>(g.nonterminals.size());
  if (n == 0) raise(Errc::InvalidArgument, "grammar has no nonterminals");
  Alphabet alphabet(g.terminals);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  for (const auto& [a, w] : g.root) alpha(a) = w;
  Tensor3 t(n, n, n);
  for (const auto& [r, w] : g.binary) t(r[0], r[1], r[2]) = w;
  std::vector<Eigen::VectorXd> terminal(g.terminals.size(), Eigen::VectorXd::Zero(n));
  for (const auto& [r, w] : g.lexical) terminal[static_cast<std::size_t>(r.second)](r.first) = w;
  return Wta(std::move(alphabet), std::move(alpha), std::move(t), std::move(terminal));
}

Wcfg wta_to_wcfg(const Wta& a) {
  const int n = a.states();
  Wcfg g;
  g.terminals = a.alphabet().symbols();
  std::string prefix = "N";
  auto clashes = [&](const std::string& p) {
    for (int i = 0; i < n; ++i) {
      if (a.alphabet().find(p + std::to_string(i))) return true;
    }
    return false;
  };
  while (clashes(prefix)) prefix += "_";
  for (int i = 0; i < n; ++i) g.nonterminals.push_back(prefix + std::to_string(i));
  for (int i = 0; i < n; ++i) {
    if (a.alpha()(i) != 0.0) g.root[i] = a.alpha()(i);
  }
  const Tensor3& t = a.transition();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (t(i, j, k) != 0.0) g.binary[{i, j, k}] = t(i, j, k);
      }
  for (int i = 0; i < n; ++i)
    for (int x = 0; x < a.alphabet().size(); ++x) {
      if (a.terminal(x)(i) != 0.0) g.lexical[{i, x}] = a.terminal(x)(i);
    }
  return g;
}

// ---------------------------------------------------------------------------
// Treebank

namespace {

class DerivationParser {
 public:
  explicit DerivationParser(std::string_view text) : text_(text) {}

  Derivation parse_all() {
    Derivation d = parse_node();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return d;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    raise(Errc::SyntaxError, why + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view atom() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos_;
    }
    if (pos_ == start) fail("expected a label or terminal");
    return text_.substr(start, pos_ - start);
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Derivation parse_node() {
    expect('(');
    Derivation d;
    d.label = std::string(atom());
    if (is_quoted(d.label) || !Alphabet::valid_symbol(d.label)) fail("invalid node label '" + d.label + "'");
    if (!peek('(')) {
      const std::string_view leaf = atom();
      if (!is_quoted(leaf)) fail("terminals must be quoted");
      d.terminal = std::string(leaf.substr(1, leaf.size() - 2));
      if (!Alphabet::valid_symbol(*d.terminal)) fail("invalid terminal '" + *d.terminal + "'");
    } else {
      while (peek('(')) d.children.push_back(parse_node());
      if (d.children.size() != 2) fail("node '" + d.label + "' is not binarized");
    }
    expect(')');
    return d;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void count_rules(const Derivation& d, Wcfg& g, NameTable& names, std::map<int, double>& totals,
                 const std::string& where) {
  const int a = names.nonterminal(d.label, g, where);
  totals[a] += 1.0;
  if (d.terminal) {
    const int x = names.terminal(*d.terminal, g, where);
    g.lexical[{a, x}] += 1.0;
    return;
  }
  const int b = names.nonterminal(d.children[0].label, g, where);
  const int c = names.nonterminal(d.children[1].label, g, where);
  g.binary[{a, b, c}] += 1.0;
  count_rules(d.children[0], g, names, totals, where);
  count_rules(d.children[1], g, names, totals, where);
}

}  // namespace

Derivation parse_derivation(std::string_view text) { return DerivationParser(text).parse_all(); }

TreeBank parse_treebank(std::istream& in) {
  TreeBank bank;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    bank.derivations.push_back(parse_derivation(line));
  }
  return bank;
}

TreeBank parse_treebank(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_treebank(in);
}

Tree derivation_tree(const Derivation& d, const Alphabet& alphabet) {
  if (d.terminal) return Tree::leaf(alphabet.index_of(*d.terminal));
  return Tree::node(derivation_tree(d.children[0], alphabet), derivation_tree(d.children[1], alphabet));
}

Wcfg estimate_mle(const TreeBank& bank) {
  if (bank.derivations.empty()) raise(Errc::EmptyBank, "treebank has no derivations");
  Wcfg g;
  NameTable names;
  std::map<int, double> totals;
  for (std::size_t i = 0; i < bank.derivations.size(); ++i) {
    const auto& d = bank.derivations[i];
    const std::string where = "derivation " + std::to_string(i + 1);
    g.root[names.nonterminal(d.label, g, where)] += 1.0;
    count_rules(d, g, names, totals, where);
  }
  const double trees = static_cast<double>(bank.derivations.size());
  for (auto& [a, w] : g.root) w /= trees;
  for (auto& [r, w] : g.binary) w /= totals[r[0]];
  for (auto& [r, w] : g.lexical) w /= totals[r.first];
  return g;
}

// ---------------------------------------------------------------------------
// Strings

double string_weight(const Wta& a, const std::vector<int>& word) {
  const int len = static_cast<int>(word.size());
  if (len == 0) raise(Errc::EmptyString, "string weight of the empty word is undefined");
  const int n = a.states();
  // inside[i * len + j] sums omega(t) over trees with yield word[i..j].
  std::vector<Eigen::VectorXd> inside(static_cast<std::size_t>(len) * len);
  auto at = [&](int i, int j) -> Eigen::VectorXd& { return inside[static_cast<std::size_t>(i) * len + j]; };
  for (int i = 0; i < len; ++i) at(i, i) = a.terminal(word[static_cast<std::size_t>(i)]);
  const Tensor3& t = a.transition();
  for (int span = 2; span <= len; ++span) {
    for (int i = 0; i + span - 1 < len; ++i) {
      const int j = i + span - 1;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
      for (int k = i; k < j; ++k) acc += t.apply(at(i, k), at(k + 1, j));
      at(i, j) = std::move(acc);
    }
  }
  return a.alpha().dot(at(0, len - 1));
}

std::vector<int> parse_word(std::string_view text, const Alphabet& alphabet) {
  const auto toks = split_ws(text);
  std::vector<int> out;
  if (toks.size() == 1 && !alphabet.find(toks[0])) {
    for (char c : toks[0]) out.push_back(alphabet.index_of(std::string_view(&c, 1)));
    return out;
  }
  for (auto tok : toks) out.push_back(alphabet.index_of(tok));
  return out;
}

}  // namespace svtakit
