#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ltesim::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
/// Returns false on anything other than a complete, finite number.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, char sep);

/// Actor names, reasons and app ids must survive the line format unchanged.
bool is_token(std::string_view text);

}  // namespace ltesim::text
