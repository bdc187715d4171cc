#include "sr/text.hpp"

#include <charconv>

#include "sr/errors.hpp"

namespace sr {

std::string format_double(double value) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

double parse_double(std::string_view text, const std::string& context) {
  double value = 0.0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size())
    raise(ErrorKind::ParseError,
          context + ": cannot parse number '" + std::string(text) + "'");
  return value;
}

}  // namespace sr
