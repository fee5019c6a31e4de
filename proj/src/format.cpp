#include "svtakit/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "svtakit/error.hpp"

namespace svtakit {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) raise(Errc::InvalidArgument, "cannot format double");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
  if (text == "inf" || text == "+inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    raise(Errc::SyntaxError, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace svtakit
