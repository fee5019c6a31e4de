#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svtakit/wta.hpp"

namespace svtakit {

/// Contents of an automaton file. The optional fields are written only when
/// present: `singular_values` for canonical forms and `gamma` when the
/// automaton was computed from a gamma-scaled series.
struct WtaFile {
  Wta automaton;
  std::vector<double> singular_values;
  std::optional<double> gamma;
};

/// JSON document with fields n, alphabet, alpha, transition (n^3 reals,
/// (i, j, k) row-major with i slowest) and terminal (symbol -> n reals).
/// Numbers use shortest round-trip text.
std::string serialize_wta(const WtaFile& file);
std::string serialize_wta(const Wta& a);

/// Throws Error(SyntaxError) on malformed documents.
WtaFile parse_wta_file(std::string_view text);
Wta parse_wta(std::string_view text);

/// Throws Error(IoError) naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace svtakit
