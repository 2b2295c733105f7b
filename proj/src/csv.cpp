#include "sabrnet/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sabrnet/errors.hpp"

namespace sabrnet::csv {

namespace {

std::string format(double v, const char* fmt) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, fmt, v);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::string format12(double v) { return format(v, "%.12g"); }
std::string format17(double v) { return format(v, "%.17g"); }

std::vector<std::string> split_line(std::string_view line, char sep) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view token) {
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ConfigError("csv: cannot parse number '" + std::string(token) + "'");
  return v;
}

}  // namespace sabrnet::csv
