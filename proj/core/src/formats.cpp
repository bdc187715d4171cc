#include "sr/formats.hpp"

#include <cctype>
#include <cmath>

#include "sr/errors.hpp"

namespace sr {
namespace {

// Carrier-exactness caps. A double holds 53 significand bits and spans
// binades [-1074, 1023]; formats inside these caps have every member,
// every gap and every residual x - lo exact in the carrier.
constexpr int kCarrierMantissaMax = 52;
constexpr int kCarrierMaxExponent = 1023;
constexpr int kCarrierMinExponent = -1074;
constexpr int kFixedTotalBitsMax = 53;

double floor_nonneg_float(const FormatSpec& fmt, double x) {
  if (x == 0.0) return 0.0;
  const int emin = fmt.min_normal_exponent();
  const double min_normal = std::ldexp(1.0, emin);
  if (x < min_normal) {
    if (!fmt.supports_subnormals) return 0.0;
    // Uniform subnormal grid with spacing 2^(emin - m).
    const double inv_gap = std::ldexp(1.0, fmt.mantissa_bits - emin);
    return std::ldexp(std::floor(x * inv_gap), emin - fmt.mantissa_bits);
  }
  const int e = std::ilogb(x);
  // x / gap is an exact power-of-two scaling, so floor() sees the true
  // grid index and never the neighbour.
  const double scaled = std::ldexp(x, fmt.mantissa_bits - e);
  return std::ldexp(std::floor(scaled), e - fmt.mantissa_bits);
}

Bracket bracket_nonneg_float(const FormatSpec& fmt, double x) {
  const double lo = floor_nonneg_float(fmt, x);
  if (lo == x) return {x, x, 0.0};
  double gap;
  const double min_normal = std::ldexp(1.0, fmt.min_normal_exponent());
  if (x < min_normal && !fmt.supports_subnormals) {
    // F has no member strictly between 0 and the minimum normal.
    return {0.0, min_normal, min_normal};
  }
  if (x < min_normal) {
    gap = std::ldexp(1.0, fmt.min_normal_exponent() - fmt.mantissa_bits);
  } else {
    gap = std::ldexp(1.0, std::ilogb(x) - fmt.mantissa_bits);
  }
  return {lo, lo + gap, gap};
}

Bracket bracket_fixed(const FormatSpec& fmt, double x) {
  const int f = fmt.fraction_bits;
  const double lo = std::ldexp(std::floor(std::ldexp(x, f)), -f);
  if (lo == x) return {x, x, 0.0};
  const double gap = std::ldexp(1.0, -f);
  return {lo, lo + gap, gap};
}

long long parse_uint_token(const std::string& text, size_t& pos,
                           const std::string& whole) {
  if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
    raise(ErrorKind::ParseError,
          "format '" + whole + "': expected digits at position " +
              std::to_string(pos));
  long long value = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    value = value * 10 + (text[pos] - '0');
    if (value > 1'000'000)
      raise(ErrorKind::ParseError, "format '" + whole + "': field too large");
    ++pos;
  }
  return value;
}

}  // namespace

FormatSpec FormatSpec::make_float(int exponent_bits, int mantissa_bits,
                                  bool supports_subnormals,
                                  bool supports_inf_nan) {
  FormatSpec fmt;
  fmt.kind = Kind::Float;
  fmt.exponent_bits = exponent_bits;
  fmt.mantissa_bits = mantissa_bits;
  fmt.supports_subnormals = supports_subnormals;
  fmt.supports_inf_nan = supports_inf_nan;
  fmt.validate();
  return fmt;
}

FormatSpec FormatSpec::make_fixed(bool is_signed, int integer_bits,
                                  int fraction_bits) {
  FormatSpec fmt;
  fmt.kind = Kind::Fixed;
  fmt.is_signed = is_signed;
  fmt.integer_bits = integer_bits;
  fmt.fraction_bits = fraction_bits;
  fmt.validate();
  return fmt;
}

void FormatSpec::validate() const {
  if (kind == Kind::Float) {
    if (exponent_bits < 2)
      raise(ErrorKind::InvalidInput, "float format needs exponent_bits >= 2");
    if (mantissa_bits < 1)
      raise(ErrorKind::InvalidInput, "float format needs mantissa_bits >= 1");
    if (exponent_bits + mantissa_bits > 62)
      raise(ErrorKind::InvalidInput,
            "float format needs exponent_bits + mantissa_bits <= 62");
    if (mantissa_bits > kCarrierMantissaMax)
      raise(ErrorKind::InvalidInput,
            "float format mantissa_bits exceeds the 52-bit carrier budget");
    if (max_finite_exponent() > kCarrierMaxExponent ||
        min_normal_exponent() - mantissa_bits < kCarrierMinExponent)
      raise(ErrorKind::InvalidInput,
            "float format exponent range exceeds the carrier budget");
  } else {
    if (integer_bits < 0 || fraction_bits < 0)
      raise(ErrorKind::InvalidInput, "fixed format bit counts must be >= 0");
    if (integer_bits + fraction_bits < 1)
      raise(ErrorKind::InvalidInput,
            "fixed format needs integer_bits + fraction_bits >= 1");
    if (integer_bits + fraction_bits > kFixedTotalBitsMax)
      raise(ErrorKind::InvalidInput,
            "fixed format needs integer_bits + fraction_bits <= 53");
  }
}

FormatSpec FormatSpec::parse(const std::string& text) {
  if (text == "fp16") return make_float(5, 10);
  if (text == "bf16") return make_float(8, 7);

  if (!text.empty() && text[0] == 'f') {
    size_t pos = 1;
    const long long e = parse_uint_token(text, pos, text);
    if (pos >= text.size() || text[pos] != 'e')
      raise(ErrorKind::ParseError,
            "format '" + text + "': expected 'e' after exponent width");
    ++pos;
    const long long m = parse_uint_token(text, pos, text);
    if (pos >= text.size() || text[pos] != 'm')
      raise(ErrorKind::ParseError,
            "format '" + text + "': expected 'm' after mantissa width");
    ++pos;
    if (pos != text.size())
      raise(ErrorKind::ParseError,
            "format '" + text + "': trailing characters after 'm'");
    return make_float(static_cast<int>(e), static_cast<int>(m));
  }

  bool is_signed = true;
  size_t pos = 0;
  if (text.size() >= 2 && text[0] == 'u' && text[1] == 'q') {
    is_signed = false;
    pos = 2;
  } else if (!text.empty() && text[0] == 'q') {
    pos = 1;
  } else {
    raise(ErrorKind::ParseError,
          "format '" + text + "': expected f<e>e<m>m, q<i>.<f>, uq<i>.<f>, "
          "fp16 or bf16");
  }
  const long long i = parse_uint_token(text, pos, text);
  if (pos >= text.size() || text[pos] != '.')
    raise(ErrorKind::ParseError,
          "format '" + text + "': expected '.' between integer and fraction "
          "widths");
  ++pos;
  const long long f = parse_uint_token(text, pos, text);
  if (pos != text.size())
    raise(ErrorKind::ParseError,
          "format '" + text + "': trailing characters after fraction width");
  return make_fixed(is_signed, static_cast<int>(i), static_cast<int>(f));
}

std::string FormatSpec::to_string() const {
  if (kind == Kind::Float)
    return "f" + std::to_string(exponent_bits) + "e" +
           std::to_string(mantissa_bits) + "m";
  return std::string(is_signed ? "" : "u") + "q" +
         std::to_string(integer_bits) + "." + std::to_string(fraction_bits);
}

Bracket bracket(const FormatSpec& fmt, double x) {
  if (std::isnan(x)) raise(ErrorKind::InvalidInput, "bracket: x is NaN");
  const double hi_bound = max_finite(fmt);
  const double lo_bound = min_finite(fmt);
  if (!(x >= lo_bound && x <= hi_bound))
    raise(ErrorKind::OutOfRange, "bracket: x outside [min F, max F]");

  if (fmt.kind == FormatSpec::Kind::Fixed) return bracket_fixed(fmt, x);
  if (x >= 0.0) return bracket_nonneg_float(fmt, x);
  const Bracket mirrored = bracket_nonneg_float(fmt, -x);
  return {-mirrored.hi, -mirrored.lo, mirrored.gap};
}

bool is_representable(const FormatSpec& fmt, double x) {
  if (!std::isfinite(x)) return false;
  if (x > max_finite(fmt) || x < min_finite(fmt)) return false;
  return bracket(fmt, x).gap == 0.0;
}

double max_finite(const FormatSpec& fmt) {
  if (fmt.kind == FormatSpec::Kind::Float)
    return std::ldexp(2.0 - std::ldexp(1.0, -fmt.mantissa_bits),
                      fmt.max_finite_exponent());
  return std::ldexp(1.0, fmt.integer_bits) -
         std::ldexp(1.0, -fmt.fraction_bits);
}

double min_positive(const FormatSpec& fmt) {
  if (fmt.kind == FormatSpec::Kind::Fixed)
    return std::ldexp(1.0, -fmt.fraction_bits);
  if (fmt.supports_subnormals)
    return std::ldexp(1.0, fmt.min_normal_exponent() - fmt.mantissa_bits);
  return std::ldexp(1.0, fmt.min_normal_exponent());
}

double min_finite(const FormatSpec& fmt) {
  if (fmt.kind == FormatSpec::Kind::Fixed && !fmt.is_signed) return 0.0;
  return -max_finite(fmt);
}

UnitRoundoff unit_roundoff(const FormatSpec& fmt) {
  if (fmt.kind == FormatSpec::Kind::Float)
    return {std::ldexp(1.0, -fmt.mantissa_bits - 1), RoundoffScale::Relative};
  return {std::ldexp(1.0, -fmt.fraction_bits - 1), RoundoffScale::Absolute};
}

}  // namespace sr
