#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sr/formats.hpp"
#include "sr/linalg.hpp"
#include "sr/rng.hpp"
#include "sr/rounding.hpp"

namespace sr {

/// A rounded-arithmetic context: every kernel computes in the carrier and
/// rounds results into `fmt` under `mode`, drawing randomness from `key`
/// at the monotone `counter`. The counter advances by exactly one per
/// stochastic rounding event, so a kernel's draw usage is auditable as the
/// counter delta. Single-owner value; concurrent work needs distinct
/// derived streams.
struct ArithEnv {
  FormatSpec fmt;
  RoundingMode mode;
  OverflowPolicy policy = OverflowPolicy::Strict;
  RngKey key;
  std::uint64_t counter = 0;

  /// Rounds a carrier value into F, advancing the counter when a draw is
  /// consumed.
  double round(double carrier_value);
};

// Elementary rounded operations. Operands must already be members of
// env.fmt (quantize inputs first); the carrier computes the operation and
// a single rounding lands the result back in F. For div and fma the
// carrier result is itself nearest-rounded at 53 bits first, which
// distorts rounding probabilities by at most ~2^-42 for formats up to 30
// bits; the same applies to add/sub when the format's exponent range
// exceeds what the carrier can represent exactly.
double add(ArithEnv& env, double a, double b);
double sub(ArithEnv& env, double a, double b);
double mul(ArithEnv& env, double a, double b);
double div(ArithEnv& env, double a, double b);
double fma(ArithEnv& env, double a, double b, double c);

/// Left-to-right fold of add over a nonempty sequence of F members;
/// consumes at most xs.size() - 1 draws.
double sum_sequential(ArithEnv& env, std::span<const double> xs);

/// Compensated (Neumaier) summation in the carrier, the ground-truth
/// reference for error measurements. EmptyInput on an empty sequence.
double sum_exact(std::span<const double> xs);

enum class DotKernel { MulAdd, Fma };

/// Rounded inner product: mul-then-add (two roundings per term, default)
/// or fused multiply-add (one per term).
double dot(ArithEnv& env, std::span<const double> xs,
           std::span<const double> ys, DotKernel kernel = DotKernel::MulAdd);

/// Independent rounding of each element in index order; one draw per
/// non-representable element. This is the perturbation-only front door:
/// inputs land on the grid once and downstream work may then proceed in
/// exact arithmetic.
std::vector<double> quantize_vector(ArithEnv& env, std::span<const double> xs);

/// Elementwise quantization in row-major draw order.
Matrix quantize_matrix(ArithEnv& env, const Matrix& a);

}  // namespace sr
