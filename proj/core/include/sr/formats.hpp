#pragma once

#include <cstdint>
#include <string>

namespace sr {

/// Describes a finite set F of binary floating-point or fixed-point numbers.
///
/// Float formats follow the usual IEEE layout: `exponent_bits` biased
/// exponent field, `mantissa_bits` stored fraction bits, implicit leading
/// one for normals, bias 2^(e-1) - 1. When `supports_inf_nan` is set the
/// top exponent code is reserved (as in IEEE), otherwise it encodes finite
/// values. When `supports_subnormals` is cleared, the values strictly
/// between 0 and the minimum normal are absent from F.
///
/// Fixed formats are the uniform grid { k * 2^-fraction_bits } with k
/// ranging over [0, 2^(i+f) - 1] (unsigned) or the symmetric range
/// [-(2^(i+f) - 1), 2^(i+f) - 1] (signed).
///
/// Every member of F, every gap between adjacent members, and every
/// residual x - floor(x) must be exact in the double carrier; the size
/// caps in validate() guarantee that.
struct FormatSpec {
  enum class Kind { Float, Fixed };

  Kind kind = Kind::Float;

  // Float fields.
  int exponent_bits = 0;
  int mantissa_bits = 0;
  bool supports_subnormals = true;
  bool supports_inf_nan = true;

  // Fixed fields.
  bool is_signed = true;
  int integer_bits = 0;
  int fraction_bits = 0;

  static FormatSpec make_float(int exponent_bits, int mantissa_bits,
                               bool supports_subnormals = true,
                               bool supports_inf_nan = true);
  static FormatSpec make_fixed(bool is_signed, int integer_bits,
                               int fraction_bits);

  /// "f5e10m" / "bf16" / "fp16" / "q4.8" / "uq1.0".
  static FormatSpec parse(const std::string& text);

  std::string to_string() const;

  /// Throws ErrorKind::InvalidInput when the fields violate an invariant
  /// or when F would not be exactly representable in the carrier.
  void validate() const;

  bool operator==(const FormatSpec&) const = default;

  // Float helpers (only meaningful for Kind::Float).
  int exponent_bias() const { return (1 << (exponent_bits - 1)) - 1; }
  int min_normal_exponent() const { return 1 - exponent_bias(); }
  int max_finite_exponent() const {
    return ((1 << exponent_bits) - 1) - (supports_inf_nan ? 1 : 0) -
           exponent_bias();
  }
};

/// The two adjacent members of F enclosing a real x: lo <= x <= hi and no
/// member lies strictly between them. gap = hi - lo is 0 exactly when x is
/// itself a member.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double gap = 0.0;
};

enum class RoundoffScale { Relative, Absolute };

/// Half the grid spacing: relative (2^-m-1) for float formats, absolute
/// (2^-f-1) for fixed ones.
struct UnitRoundoff {
  double value = 0.0;
  RoundoffScale scale = RoundoffScale::Relative;
};

/// Eq.-style bracketing of x in F. Errors: InvalidInput on NaN,
/// OutOfRange when x lies outside [min F, max F].
Bracket bracket(const FormatSpec& fmt, double x);

/// Membership test; false (never an error) for out-of-range or NaN x.
bool is_representable(const FormatSpec& fmt, double x);

/// Largest finite member of F.
double max_finite(const FormatSpec& fmt);

/// Smallest positive member of F (subnormal when the format has them).
double min_positive(const FormatSpec& fmt);

/// Smallest member of F (0 for unsigned fixed formats, -max_finite else).
double min_finite(const FormatSpec& fmt);

UnitRoundoff unit_roundoff(const FormatSpec& fmt);

}  // namespace sr
