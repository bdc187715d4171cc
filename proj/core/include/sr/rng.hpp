#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>

namespace sr {

/// Identity of one random stream: a user seed plus a stream id derived
/// from a label path. The triple (seed, stream, counter) maps to an output
/// word through a pure function, so replay and trial-level parallelism
/// cannot change results.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  bool operator==(const RngKey&) const = default;
};

/// One element of a stream label path, e.g. {"stagnation", trial_index}.
using Label = std::variant<std::uint64_t, std::string>;

/// Hashes the label path into a stream id (FNV-1a over tagged, length
/// prefixed tokens, finished with a splitmix64 mix). Distinct paths give
/// distinct streams up to the usual 2^-64 collision odds.
RngKey derive_stream(std::uint64_t seed, std::span<const Label> labels);
RngKey derive_stream(std::uint64_t seed, std::initializer_list<Label> labels);

/// Philox2x64-10 block function keyed by `key.seed` on the counter block
/// (counter, key.stream); returns the first output word. Stateless: the
/// caller owns the counter.
std::uint64_t uniform_u64(const RngKey& key, std::uint64_t counter);

/// Top 53 bits of uniform_u64 scaled by 2^-53; always in [0, 1).
double uniform_unit(const RngKey& key, std::uint64_t counter);

/// The scaling used by uniform_unit, exposed so its identities (0 -> 0.0,
/// never reaching 1) can be checked directly.
inline double unit_from_bits(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace sr
