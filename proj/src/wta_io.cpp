#include "svtakit/wta_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "svtakit/error.hpp"

namespace svtakit {

namespace {

using Json = nlohmann::ordered_json;

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::vector<double> read_numbers(const Json& node, const char* field) {
  if (!node.is_array()) raise(Errc::SyntaxError, std::string("field '") + field + "' must be an array");
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& x : node) {
    if (!x.is_number()) {
      raise(Errc::SyntaxError, std::string("field '") + field + "' must contain only numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const Json& require(const Json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) raise(Errc::SyntaxError, std::string("missing field '") + field + "'");
  return *it;
}

}  // namespace

std::string serialize_wta(const WtaFile& file) {
  const Wta& a = file.automaton;
  Json doc;
  doc["n"] = a.states();
  doc["alphabet"] = a.alphabet().symbols();
  doc["alpha"] = vector_json(a.alpha());
  doc["transition"] = std::vector<double>(a.transition().data().begin(), a.transition().data().end());
  Json terminal = Json::object();
  for (int s = 0; s < a.alphabet().size(); ++s) terminal[a.alphabet().symbol(s)] = vector_json(a.terminal(s));
  doc["terminal"] = std::move(terminal);
  if (!file.singular_values.empty()) doc["singular_values"] = file.singular_values;
  if (file.gamma) doc["gamma"] = *file.gamma;
  return doc.dump(1) + "\n";
}

std::string serialize_wta(const Wta& a) { return serialize_wta(WtaFile{a, {}, std::nullopt}); }

WtaFile parse_wta_file(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    raise(Errc::SyntaxError, std::string("automaton file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) raise(Errc::SyntaxError, "automaton file must be a JSON object");

  const Json& n_node = require(doc, "n");
  if (!n_node.is_number_integer() || n_node.get<long long>() < 1) {
    raise(Errc::SyntaxError, "field 'n' must be a positive integer");
  }
  const auto n = n_node.get<int>();

  const Json& alpha_node = require(doc, "alphabet");
  if (!alpha_node.is_array()) raise(Errc::SyntaxError, "field 'alphabet' must be an array");
  std::vector<std::string> symbols;
  for (const auto& s : alpha_node) {
    if (!s.is_string()) raise(Errc::SyntaxError, "alphabet entries must be strings");
    symbols.push_back(s.get<std::string>());
  }
  Alphabet alphabet(std::move(symbols));

  auto alpha = read_numbers(require(doc, "alpha"), "alpha");
  if (static_cast<int>(alpha.size()) != n) raise(Errc::SyntaxError, "field 'alpha' must have n entries");
  auto transition = read_numbers(require(doc, "transition"), "transition");
  if (transition.size() != static_cast<std::size_t>(n) * n * n) {
    raise(Errc::SyntaxError, "field 'transition' must have n^3 entries");
  }

  const Json& term_node = require(doc, "terminal");
  if (!term_node.is_object()) raise(Errc::SyntaxError, "field 'terminal' must be an object");
  if (static_cast<int>(term_node.size()) != alphabet.size()) {
    raise(Errc::SyntaxError, "field 'terminal' must list exactly the alphabet symbols");
  }
  std::vector<Eigen::VectorXd> terminal;
  for (const auto& sym : alphabet.symbols()) {
    auto it = term_node.find(sym);
    if (it == term_node.end()) raise(Errc::SyntaxError, "no terminal vector for symbol '" + sym + "'");
    auto w = read_numbers(*it, "terminal");
    if (static_cast<int>(w.size()) != n) raise(Errc::SyntaxError, "terminal vector of '" + sym + "' must have n entries");
    terminal.push_back(to_vector(w));
  }

  WtaFile file{Wta(std::move(alphabet), to_vector(alpha), Tensor3(n, n, n, std::move(transition)),
                   std::move(terminal)),
               {},
               std::nullopt};
  if (auto it = doc.find("singular_values"); it != doc.end()) {
    file.singular_values = read_numbers(*it, "singular_values");
    if (static_cast<int>(file.singular_values.size()) != n) {
      raise(Errc::SyntaxError, "field 'singular_values' must have n entries");
    }
  }
  if (auto it = doc.find("gamma"); it != doc.end()) {
    if (!it->is_number() || !(it->get<double>() > 0.0)) {
      raise(Errc::SyntaxError, "field 'gamma' must be a positive number");
    }
    file.gamma = it->get<double>();
  }
  return file;
}

Wta parse_wta(std::string_view text) { return parse_wta_file(text).automaton; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) raise(Errc::IoError, "error while reading '" + path.string() + "'");
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) raise(Errc::IoError, "error while writing '" + path.string() + "'");
}

}  // namespace svtakit
