// svta-kit: command-line front end for singular-value minimization of
// weighted tree automata.
//
// Exit status: 0 success, 1 usage / I-O / parse errors, 2 numerical failure
// (divergence, singular systems), 3 when some of the requested ranks failed.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "svtakit/error.hpp"
#include "svtakit/format.hpp"
#include "svtakit/gram.hpp"
#include "svtakit/grammar.hpp"
#include "svtakit/metrics.hpp"
#include "svtakit/svta.hpp"
#include "svtakit/wta_io.hpp"

namespace fs = std::filesystem;
using namespace svtakit;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kPartial = 3 };

int exit_code(Errc code) {
  switch (code) {
    case Errc::Diverged:
    case Errc::MaxIterations:
    case Errc::SingularSystem:
    case Errc::SingularMatrix:
    case Errc::RankZero:
    case Errc::NegativeRadicand:
    case Errc::NonPositiveWeight:
      return kNumerical;
    default:
      return kUsage;
  }
}

// ---------------------------------------------------------------------------
// Input handling

enum class Kind { Wta, Wcfg, Treebank };

Kind resolve_kind(const std::string& kind, const fs::path& path) {
  if (kind == "wta") return Kind::Wta;
  if (kind == "wcfg") return Kind::Wcfg;
  if (kind == "treebank") return Kind::Treebank;
  const std::string ext = path.extension().string();
  if (ext == ".wta" || ext == ".json") return Kind::Wta;
  if (ext == ".wcfg" || ext == ".pcfg" || ext == ".grammar") return Kind::Wcfg;
  if (ext == ".treebank" || ext == ".tb") return Kind::Treebank;
  raise(Errc::InvalidArgument, "cannot infer the kind of '" + path.string() + "'; pass --kind");
}

struct Loaded {
  Wta automaton;
  std::vector<double> singular_values;
  std::optional<double> gamma;
};

Loaded load(const fs::path& path, const std::string& kind) {
  const std::string text = read_text_file(path);
  switch (resolve_kind(kind, path)) {
    case Kind::Wta: {
      WtaFile f = parse_wta_file(text);
      return Loaded{std::move(f.automaton), std::move(f.singular_values), f.gamma};
    }
    case Kind::Wcfg:
      return Loaded{wcfg_to_wta(parse_wcfg(text)), {}, std::nullopt};
    case Kind::Treebank:
      return Loaded{wcfg_to_wta(estimate_mle(parse_treebank(std::string_view(text)))), {}, std::nullopt};
  }
  raise(Errc::InvalidArgument, "unknown input kind");
}

// The series a stored automaton stands for: gamma-scaled canonical forms are
// mapped back with 1 / gamma.
Wta unscaled(const Loaded& in) {
  return in.gamma ? scale_gamma(in.automaton, 1.0 / *in.gamma) : in.automaton;
}

SolverOptions solver_options(double tol, long max_iter) {
  SolverOptions opts;
  opts.tolerance = tol;
  opts.max_iterations = max_iter;
  return opts;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(Errc::IoError, "cannot create directory '" + dir.string() + "': " + ec.message());
}

// ---------------------------------------------------------------------------
// Worker pool: results are collected by index so output order never depends
// on scheduling.

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SVTA_KIT_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) n = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring invalid SVTA_KIT_THREADS='" << env << "'\n";
    }
  }
  return n;
}

template <class Result>
std::vector<Result> run_pool(std::size_t jobs, const std::function<Result(std::size_t)>& task) {
  std::vector<Result> results(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) results[i] = task(i);
  };
  const unsigned threads = std::min<std::size_t>(worker_count(), std::max<std::size_t>(jobs, 1));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return results;
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(const std::optional<int>& v) { return v ? std::to_string(*v) : "unbounded"; }

std::string report_text(const ConvergenceReport& rep, double rho, const std::optional<double>& gamma) {
  std::ostringstream os;
  os << "status: " << (rep.status == SolveStatus::Converged ? "converged" : "failed") << "\n"
     << "iterations: " << rep.iterations << "\n"
     << "final_residual: " << fmt(rep.final_residual) << "\n"
     << "residual_ratio: " << fmt(rep.contraction_estimate) << "\n"
     << "contraction_estimate: " << fmt(rho) << "\n";
  if (gamma) os << "gamma: " << fmt(*gamma) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands

struct Common {
  double tol = 1e-12;
  long max_iter = 100000;
  std::string kind = "auto";
  std::string format = "csv";
};

int cmd_svta(const Common& c, const fs::path& input, const fs::path& out, const std::string& gamma_mode,
             double safety) {
  Loaded in = load(input, c.kind);
  const SolverOptions opts = solver_options(c.tol, c.max_iter);
  std::optional<double> gamma;
  if (gamma_mode == "auto") {
    const GammaSearch g = max_convergent_gamma(in.automaton, opts);
    gamma = safety * g.gamma;
    if (g.no_upper_bracket) std::cerr << "note: series converges for every gamma up to 2^20\n";
  } else if (gamma_mode != "off") {
    gamma = parse_double(gamma_mode);
    if (!(*gamma > 0.0) || !std::isfinite(*gamma)) raise(Errc::InvalidArgument, "--gamma must be positive");
  }
  const Wta base = gamma ? scale_gamma(in.automaton, *gamma) : in.automaton;
  Svta s = compute_svta(base, opts);
  const ContractionEstimate rho = estimate_contraction(base, tree_gram_fixed_point(base, opts).gram);

  ensure_dir(out);
  WtaFile file{s.automaton, std::vector<double>(s.singular_values.data(),
                                                s.singular_values.data() + s.singular_values.size()),
               gamma};
  write_text_file(out / "svta.wta", serialize_wta(file));
  std::string rep = report_text(s.report, rho.rho, gamma);
  rep += "input_states: " + std::to_string(in.automaton.states()) + "\n";
  rep += "effective_rank: " + std::to_string(s.effective_rank) + "\n";
  rep += "singular_values:";
  for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) rep += " " + fmt(s.singular_values(i));
  rep += "\n";
  write_text_file(out / "convergence.txt", rep);
  std::cout << rep;
  return kOk;
}

std::vector<int> parse_ranks(const std::string& text, int n) {
  std::vector<int> ranks;
  if (text == "all") {
    for (int r = 1; r <= n; ++r) ranks.push_back(r);
    return ranks;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int r = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      ranks.push_back(r);
    } catch (const std::exception&) {
      raise(Errc::SyntaxError, "bad rank '" + item + "' in --ranks");
    }
  }
  if (ranks.empty()) raise(Errc::SyntaxError, "--ranks is empty");
  return ranks;
}

std::string certificate_csv(const BoundReport& r) {
  std::string out = "quantity,index,value\n";
  out += "n,," + std::to_string(r.n) + "\n";
  out += "n_hat,," + std::to_string(r.n_hat) + "\n";
  out += "alphabet_size,," + std::to_string(r.alphabet_size) + "\n";
  out += "s_next,," + fmt(r.s_next) + "\n";
  out += "epsilon,," + fmt(r.epsilon) + "\n";
  for (const auto& [l, b] : r.per_tree) out += "per_tree_leaves," + std::to_string(l) + "," + fmt(b) + "\n";
  for (const auto& [m, b] : r.cumulative) out += "cumulative_size_below," + std::to_string(m) + "," + fmt(b) + "\n";
  out += "safe_size_single,," + fmt(r.safe_size_single) + "\n";
  out += "safe_size_cumulative,," + fmt(r.safe_size_cumulative) + "\n";
  return out;
}

std::string certificate_text(const BoundReport& r, const std::optional<double>& gamma) {
  std::ostringstream os;
  os << "Truncation of a " << r.n << "-state canonical automaton to " << r.n_hat
     << (r.n_hat == 1 ? " state\n" : " states\n")
     << "alphabet size: " << r.alphabet_size << "\n"
     << "first discarded singular value: " << fmt(r.s_next) << "\n";
  if (gamma) os << "bounds refer to the series scaled by gamma = " << fmt(*gamma) << "\n";
  os << "\nper-tree error bound |f(t) - f^(t)| <= n^(2L-1) s_next, L = number of leaves:\n";
  for (const auto& [l, b] : r.per_tree) os << "  L = " << l << ": " << fmt(b) << "\n";
  os << "\nsummed error bound over trees with size < M:\n";
  for (const auto& [m, b] : r.cumulative) os << "  M = " << m << ": " << fmt(b) << "\n";
  os << "\nfor epsilon = " << fmt(r.epsilon) << ":\n";
  if (r.safe_size_single) {
    os << "  every tree with at most " << *r.safe_size_single << " leaves has error < epsilon\n";
  } else {
    os << "  every tree has error < epsilon\n";
  }
  if (r.safe_size_cumulative) {
    os << "  trees with size below " << *r.safe_size_cumulative << " have summed error < epsilon\n";
  } else {
    os << "  the summed error over all trees is < epsilon\n";
  }
  return os.str();
}

int cmd_truncate(const Common& c, const fs::path& input, const fs::path& out, const std::string& ranks_text,
                 double epsilon) {
  Loaded in = load(input, "wta");
  const int n = in.automaton.states();
  if (static_cast<int>(in.singular_values.size()) != n) {
    raise(Errc::SyntaxError, "'" + input.string() + "' carries no singular values; run 'svta' first");
  }
  Svta s{in.automaton, Eigen::Map<const Eigen::VectorXd>(in.singular_values.data(), n), n, {}};
  const std::vector<int> ranks = parse_ranks(ranks_text, n);
  ensure_dir(out);
  BoundOptions bopts;
  bopts.epsilon = epsilon;

  struct Outcome {
    std::optional<Truncation> result;
    std::string error;
  };
  auto outcomes = run_pool<Outcome>(ranks.size(), [&](std::size_t i) {
    Outcome o;
    try {
      o.result = truncate_svta(s, ranks[i], bopts);
      if (in.gamma) o.result->automaton = scale_gamma(o.result->automaton, 1.0 / *in.gamma);
    } catch (const Error& e) {
      o.error = e.what();
    }
    return o;
  });

  int failed = 0;
  std::string summary = c.format == "csv" ? "n_hat,s_next,per_tree_L4,cumulative_M3,safe_single,safe_cumulative\n" : "";
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (!o.result) {
      ++failed;
      std::cerr << "rank " << ranks[i] << " skipped: " << o.error << "\n";
      continue;
    }
    const BoundReport& r = o.result->report;
    const std::string tag = std::to_string(r.n_hat);
    write_text_file(out / ("trunc_" + tag + ".wta"), serialize_wta(o.result->automaton));
    write_text_file(out / ("cert_" + tag + ".csv"), certificate_csv(r));
    write_text_file(out / ("cert_" + tag + ".txt"), certificate_text(r, in.gamma));
    const double l4 = bound_per_tree(r.s_next, r.n, 4);
    const double m3 = bound_cumulative(r.s_next, r.n, r.alphabet_size, 3);
    if (c.format == "csv") {
      summary += tag + "," + fmt(r.s_next) + "," + fmt(l4) + "," + fmt(m3) + "," + fmt(r.safe_size_single) +
                 "," + fmt(r.safe_size_cumulative) + "\n";
    } else {
      summary += "n_hat " + tag + ": s_next " + fmt(r.s_next) + ", per-tree bound (4 leaves) " + fmt(l4) +
                 ", cumulative bound (size < 3) " + fmt(m3) + "\n";
    }
  }
  std::cout << summary;
  return failed == 0 ? kOk : kPartial;
}

int cmd_compare(const Common& c, const fs::path& original, const std::vector<fs::path>& approximations,
                const std::string& corpus, const std::string& out) {
  const Loaded orig = load(original, c.kind);
  const Wta reference = unscaled(orig);
  std::vector<Tree> test;
  if (!corpus.empty()) {
    std::istringstream in(read_text_file(corpus));
    test = read_tree_corpus(in, reference.alphabet());
  }
  const SolverOptions opts = solver_options(c.tol, c.max_iter);
  const int n = reference.states();
  const int alphabet_size = reference.alphabet().size();

  struct Row {
    std::string text;
    std::string error;
    Errc code = Errc::InvalidArgument;
  };
  auto rows = run_pool<Row>(approximations.size(), [&](std::size_t i) {
    Row row;
    try {
      const Wta approx = unscaled(load(approximations[i], c.kind));
      const MetricReport m = compare_series(reference, approx, test, opts);
      const int n_hat = approx.states();
      std::string s_next = "nan";
      std::string bound = "nan";
      if (static_cast<int>(orig.singular_values.size()) == n) {
        const double sv = n_hat < n ? orig.singular_values[static_cast<std::size_t>(n_hat)] : 0.0;
        s_next = fmt(sv);
        bound = fmt(bound_cumulative(sv, n, alphabet_size, 3));
      }
      const long long params = static_cast<long long>(n_hat) * n_hat * n_hat;
      if (c.format == "csv") {
        row.text = std::to_string(n_hat) + "," + std::to_string(params) + "," + fmt(m.l2) + "," +
                   fmt(m.perplexity) + "," + s_next + "," + bound + "\n";
      } else {
        row.text = approximations[i].filename().string() + ": n_hat " + std::to_string(n_hat) + ", params " +
                   std::to_string(params) + ", l2 " + fmt(m.l2) + ", perplexity " + fmt(m.perplexity) +
                   ", s_next " + s_next + ", cumulative bound (size < 3) " + bound + "\n";
      }
    } catch (const Error& e) {
      row.error = e.what();
      row.code = e.code();
    }
    return row;
  });

  std::string table = c.format == "csv" ? "n_hat,params,l2,perplexity,s_next,bound_cumulative_M3\n" : "";
  int status = kOk;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].error.empty()) {
      std::cerr << approximations[i].string() << ": " << rows[i].error << "\n";
      status = std::max(status, exit_code(rows[i].code));
      continue;
    }
    table += rows[i].text;
  }
  if (out.empty()) {
    std::cout << table;
  } else {
    write_text_file(out, table);
  }
  return status;
}

int cmd_eval(const Common& c, const fs::path& input, const std::string& tree, const std::string& word) {
  const Wta a = unscaled(load(input, c.kind));
  if (tree.empty() == word.empty()) raise(Errc::InvalidArgument, "pass exactly one of --tree and --word");
  const double v = tree.empty() ? string_weight(a, parse_word(word, a.alphabet()))
                                : evaluate(a, parse_tree(tree, a.alphabet()));
  std::cout << fmt(v) << "\n";
  return kOk;
}

std::string matrix_text(const Eigen::MatrixXd& m, const std::string& sep) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += (j ? sep : "") + fmt(m(i, j));
    out += "\n";
  }
  return out;
}

int cmd_gram(const Common& c, const fs::path& input) {
  const Wta a = load(input, c.kind).automaton;
  const GramPair gp = gram_matrices(a, solver_options(c.tol, c.max_iter));
  const ContractionEstimate rho = estimate_contraction(a, gp.g_trees);
  const std::string sep = c.format == "csv" ? "," : " ";
  std::cout << report_text(gp.report, rho.rho, std::nullopt) << "tree_gram:\n"
            << matrix_text(gp.g_trees, sep) << "context_gram:\n"
            << matrix_text(gp.g_contexts, sep);
  return kOk;
}

int cmd_gamma(const Common& c, const fs::path& input) {
  const Wta a = load(input, c.kind).automaton;
  const GammaSearch g = max_convergent_gamma(a, solver_options(c.tol, c.max_iter));
  std::cout << fmt(g.gamma) << (g.no_upper_bracket ? " (no upper bracket up to 2^20)" : "") << "\n";
  return kOk;
}

int cmd_convert(const Common& c, const fs::path& input, const std::string& to, const std::string& out) {
  const Loaded in = load(input, c.kind);
  std::string text;
  if (to == "wta") {
    text = serialize_wta(WtaFile{in.automaton, in.singular_values, in.gamma});
  } else if (to == "wcfg") {
    text = serialize_wcfg(wta_to_wcfg(in.automaton));
  } else {
    raise(Errc::InvalidArgument, "--to must be 'wta' or 'wcfg'");
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular-value minimization of weighted tree automata"};
  app.name("svta-kit");
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool solver) {
    sub->add_option("--kind", common.kind, "Input kind: wta, wcfg, treebank or auto (by extension)")
        ->check(CLI::IsMember({"auto", "wta", "wcfg", "treebank"}));
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "text"}));
    if (solver) {
      sub->add_option("--tol", common.tol, "Fixed-point residual tolerance")->check(CLI::PositiveNumber);
      sub->add_option("--max-iter", common.max_iter, "Fixed-point iteration limit")->check(CLI::PositiveNumber);
    }
  };

  fs::path input;
  std::string out;
  std::string gamma_mode = "off";
  double safety = 0.95;
  auto* svta = app.add_subcommand("svta", "Compute the singular-value canonical form");
  svta->add_option("input", input, "Automaton, grammar or treebank")->required();
  svta->add_option("--out", out, "Output directory")->required();
  svta->add_option("--gamma", gamma_mode, "off, auto or a positive scaling factor");
  svta->add_option("--gamma-safety", safety, "Factor applied to the largest convergent gamma in auto mode")
      ->check(CLI::Range(1e-6, 1.0));
  add_common(svta, true);

  std::string ranks = "all";
  double epsilon = 1e-2;
  auto* trunc = app.add_subcommand("truncate", "Truncate a canonical form and certify the error");
  trunc->add_option("input", input, "svta.wta produced by 'svta'")->required();
  trunc->add_option("--out", out, "Output directory")->required();
  trunc->add_option("--ranks", ranks, "Comma-separated ranks or 'all'");
  trunc->add_option("--epsilon", epsilon, "Error target for safe sizes")->check(CLI::PositiveNumber);
  add_common(trunc, false);

  std::vector<fs::path> approximations;
  std::string corpus;
  auto* compare = app.add_subcommand("compare", "Tabulate l2 distance and perplexity of approximations");
  compare->add_option("original", input, "Reference automaton")->required();
  compare->add_option("approximations", approximations, "Approximating automata")->required();
  compare->add_option("--corpus", corpus, "Test trees for perplexity");
  compare->add_option("--out", out, "CSV output file (default: stdout)");
  add_common(compare, true);

  std::string tree;
  std::string word;
  auto* eval = app.add_subcommand("eval", "Weight of a tree or a word");
  eval->add_option("input", input, "Automaton or grammar")->required();
  eval->add_option("--tree", tree, "Bracketed tree");
  eval->add_option("--word", word, "Word (sum over all trees with this yield)");
  add_common(eval, false);

  auto* gram = app.add_subcommand("gram", "Print the tree and context Gram matrices");
  gram->add_option("input", input, "Automaton or grammar")->required();
  add_common(gram, true);

  auto* gamma = app.add_subcommand("gamma", "Largest gamma keeping the scaled series convergent");
  gamma->add_option("input", input, "Automaton or grammar")->required();
  add_common(gamma, true);

  std::string to;
  auto* convert = app.add_subcommand("convert", "Convert between automata and grammars");
  convert->add_option("input", input, "Automaton, grammar or treebank")->required();
  convert->add_option("--to", to, "Target: wta or wcfg")->required()->check(CLI::IsMember({"wta", "wcfg"}));
  convert->add_option("--out", out, "Output file (default: stdout)");
  add_common(convert, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*svta) return cmd_svta(common, input, out, gamma_mode, safety);
    if (*trunc) return cmd_truncate(common, input, out, ranks, epsilon);
    if (*compare) return cmd_compare(common, input, approximations, corpus, out);
    if (*eval) return cmd_eval(common, input, tree, word);
    if (*gram) return cmd_gram(common, input);
    if (*gamma) return cmd_gamma(common, input);
    if (*convert) return cmd_convert(common, input, to, out);
  } catch (const Error& e) {
    std::cerr << "svta-kit: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "svta-kit: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
