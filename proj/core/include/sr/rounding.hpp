#pragma once

#include <cstdint>
#include <string>

#include "sr/formats.hpp"
#include "sr/rng.hpp"

namespace sr {

/// Which rounding rule maps a carrier real onto F.
///
///   NearestEven     deterministic, ties to the even grid index
///   SRProportional  up with probability (x - lo) / gap
///   SRUpDown        up or down with probability 1/2, independent of x
///   SRSelective     SRProportional when tau <= p(x) <= 1 - tau, else
///                   NearestEven (no draw on the deterministic branch)
struct RoundingMode {
  enum class Kind { NearestEven, SRProportional, SRUpDown, SRSelective };

  Kind kind = Kind::NearestEven;
  double tau = 0.0;  // SRSelective only, strictly in (0, 0.5)

  static RoundingMode nearest_even() { return {Kind::NearestEven, 0.0}; }
  static RoundingMode sr_proportional() { return {Kind::SRProportional, 0.0}; }
  static RoundingMode sr_up_down() { return {Kind::SRUpDown, 0.0}; }
  static RoundingMode sr_selective(double tau);

  /// "rn" | "sr" | "sr-updown" | "sr-sel:<tau>".
  static RoundingMode parse(const std::string& text);
  std::string to_string() const;

  bool is_stochastic() const { return kind != Kind::NearestEven; }

  bool operator==(const RoundingMode&) const = default;
};

/// What happens when the exact value lies beyond max_finite.
enum class OverflowPolicy { Strict, Saturate };

OverflowPolicy parse_policy(const std::string& text);
std::string policy_to_string(OverflowPolicy policy);

/// The probability p(x) that stochastic rounding moves x up to its bracket
/// ceiling: (x - lo) / gap, and 0 when x is representable. The numerator
/// and the gap are exact in the carrier, so p carries at most one carrier
/// ulp of error from the division.
double round_prob_up(const FormatSpec& fmt, double x);

struct RoundOutcome {
  double value = 0.0;
  bool used_draw = false;  // exactly one uniform per stochastic event
};

/// Rounds carrier value x into F under the given mode. Representable
/// values pass through unchanged in every mode and consume no draw.
/// Errors: InvalidInput on NaN; OutOfRange when |x| exceeds the format
/// range under OverflowPolicy::Strict (Saturate clamps instead).
RoundOutcome round_one(const FormatSpec& fmt, const RoundingMode& mode,
                       OverflowPolicy policy, double x, const RngKey& key,
                       std::uint64_t counter);

/// Value-only convenience wrapper around round_one.
double round(const FormatSpec& fmt, const RoundingMode& mode,
             OverflowPolicy policy, double x, const RngKey& key,
             std::uint64_t counter);

}  // namespace sr
