#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sabrnet::csv {

/// %.12g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format12(double v);
/// %.17g: round-trips every double.
std::string format17(double v);

std::vector<std::string> split_line(std::string_view line, char sep = ',');
/// Parses a decimal or nan/inf token; throws ConfigError on garbage.
double parse_double(std::string_view token);

}  // namespace sabrnet::csv
