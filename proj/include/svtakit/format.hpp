#pragma once

#include <string>
#include <string_view>

namespace svtakit {

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

// Strict full-string parse; throws Error(SyntaxError) on garbage.
double parse_double(std::string_view text);

}  // namespace svtakit
