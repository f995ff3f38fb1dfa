#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace loadshape::csv {

/// Shortest representation that parses back to the exact same double, so CSV
/// round trips are lossless and reruns are byte-identical.
std::string format_double(double value);

double parse_double(std::string_view text);  // throws std::invalid_argument

std::vector<std::string_view> split(std::string_view line, char sep = ',');

}  // namespace loadshape::csv
