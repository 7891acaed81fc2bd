#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace collapse {

// Locale-independent, 17 significant digits: lossless for doubles.
std::string format_double(double v);
// Fixed decimals for human-facing tables and chart labels.
std::string format_fixed(double v, int decimals);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

}  // namespace collapse
