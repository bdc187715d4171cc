#include "sr/rounding.hpp"

#include <cmath>
#include <cstdlib>

#include "sr/errors.hpp"
#include "sr/text.hpp"

namespace sr {
namespace {

// Ties go to the endpoint whose grid index (value / gap, an exact
// power-of-two division) is even. Exactly one of lo, hi qualifies.
double tie_to_even(const Bracket& b) {
  const long long lo_index = std::llround(b.lo / b.gap);
  return (lo_index % 2 == 0) ? b.lo : b.hi;
}

double nearest_even_pick(const Bracket& b, double prob_up) {
  if (prob_up < 0.5) return b.lo;
  if (prob_up > 0.5) return b.hi;
  return tie_to_even(b);
}

}  // namespace

RoundingMode RoundingMode::sr_selective(double tau) {
  if (!(tau > 0.0 && tau < 0.5))
    raise(ErrorKind::InvalidInput,
          "sr-sel threshold tau must lie strictly in (0, 0.5)");
  return {Kind::SRSelective, tau};
}

RoundingMode RoundingMode::parse(const std::string& text) {
  if (text == "rn") return nearest_even();
  if (text == "sr") return sr_proportional();
  if (text == "sr-updown") return sr_up_down();
  if (text.rfind("sr-sel:", 0) == 0)
    return sr_selective(parse_double(text.substr(7), "mode '" + text + "'"));
  raise(ErrorKind::ParseError,
        "mode '" + text + "': expected rn, sr, sr-updown or sr-sel:<tau>");
}

std::string RoundingMode::to_string() const {
  switch (kind) {
    case Kind::NearestEven:
      return "rn";
    case Kind::SRProportional:
      return "sr";
    case Kind::SRUpDown:
      return "sr-updown";
    case Kind::SRSelective:
      return "sr-sel:" + format_double(tau);
  }
  std::abort();
}

OverflowPolicy parse_policy(const std::string& text) {
  if (text == "strict") return OverflowPolicy::Strict;
  if (text == "saturate") return OverflowPolicy::Saturate;
  raise(ErrorKind::ParseError,
        "policy '" + text + "': expected strict or saturate");
}

std::string policy_to_string(OverflowPolicy policy) {
  return policy == OverflowPolicy::Strict ? "strict" : "saturate";
}

double round_prob_up(const FormatSpec& fmt, double x) {
  const Bracket b = bracket(fmt, x);
  if (b.gap == 0.0) return 0.0;
  return (x - b.lo) / b.gap;
}

RoundOutcome round_one(const FormatSpec& fmt, const RoundingMode& mode,
                       OverflowPolicy policy, double x, const RngKey& key,
                       std::uint64_t counter) {
  if (std::isnan(x)) raise(ErrorKind::InvalidInput, "round: x is NaN");
  const double top = max_finite(fmt);
  const double bottom = min_finite(fmt);
  if (x > top || x < bottom) {
    if (policy == OverflowPolicy::Strict)
      raise(ErrorKind::OutOfRange,
            "round: " + format_double(x) + " outside [" +
                format_double(bottom) + ", " + format_double(top) +
                "] under strict overflow policy");
    return {x > top ? top : bottom, false};
  }

  const Bracket b = bracket(fmt, x);
  if (b.gap == 0.0) return {x, false};
  const double prob_up = (x - b.lo) / b.gap;

  switch (mode.kind) {
    case RoundingMode::Kind::NearestEven:
      return {nearest_even_pick(b, prob_up), false};
    case RoundingMode::Kind::SRProportional:
      return {uniform_unit(key, counter) < prob_up ? b.hi : b.lo, true};
    case RoundingMode::Kind::SRUpDown:
      return {uniform_unit(key, counter) < 0.5 ? b.hi : b.lo, true};
    case RoundingMode::Kind::SRSelective:
      if (prob_up < mode.tau || prob_up > 1.0 - mode.tau)
        return {nearest_even_pick(b, prob_up), false};
      return {uniform_unit(key, counter) < prob_up ? b.hi : b.lo, true};
  }
  std::abort();
}

double round(const FormatSpec& fmt, const RoundingMode& mode,
             OverflowPolicy policy, double x, const RngKey& key,
             std::uint64_t counter) {
  return round_one(fmt, mode, policy, x, key, counter).value;
}

}  // namespace sr
