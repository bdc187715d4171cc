#pragma once

#include <string>
#include <string_view>

namespace sr {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// Strict full-string parse; ParseError (with `context` in the message)
/// otherwise.
double parse_double(std::string_view text, const std::string& context);

}  // namespace sr
