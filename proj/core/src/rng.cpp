#include "sr/rng.hpp"

namespace sr {
namespace {

constexpr std::uint64_t kPhiloxMultiplier = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxWeyl = 0x9E3779B97F4A7C15ULL;
constexpr int kPhiloxRounds = 10;

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_absorb(std::uint64_t& h, unsigned char byte) {
  h ^= byte;
  h *= kFnvPrime;
}

void fnv_absorb_u64(std::uint64_t& h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) fnv_absorb(h, (value >> (8 * i)) & 0xff);
}

std::uint64_t splitmix_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngKey derive_stream(std::uint64_t seed, std::span<const Label> labels) {
  std::uint64_t h = kFnvOffset;
  for (const Label& label : labels) {
    if (const auto* num = std::get_if<std::uint64_t>(&label)) {
      fnv_absorb(h, 'i');
      fnv_absorb_u64(h, *num);
    } else {
      const std::string& text = std::get<std::string>(label);
      fnv_absorb(h, 's');
      fnv_absorb_u64(h, text.size());
      for (char c : text) fnv_absorb(h, static_cast<unsigned char>(c));
    }
  }
  return {seed, splitmix_mix(h)};
}

RngKey derive_stream(std::uint64_t seed, std::initializer_list<Label> labels) {
  return derive_stream(seed, std::span<const Label>(labels.begin(), labels.size()));
}

std::uint64_t uniform_u64(const RngKey& key, std::uint64_t counter) {
  std::uint64_t x0 = counter;
  std::uint64_t x1 = key.stream;
  std::uint64_t k = key.seed;
  for (int round = 0; round < kPhiloxRounds; ++round) {
    if (round > 0) k += kPhiloxWeyl;
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(kPhiloxMultiplier) * x0;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(prod);
    x0 = hi ^ k ^ x1;
    x1 = lo;
  }
  return x0;
}

double uniform_unit(const RngKey& key, std::uint64_t counter) {
  return unit_from_bits(uniform_u64(key, counter));
}

}  // namespace sr
