#include "sr/arith.hpp"

#include <cmath>
#include <string>

#include "sr/errors.hpp"

namespace sr {
namespace {

void require_member(const ArithEnv& env, double v, const char* who) {
  if (!is_representable(env.fmt, v))
    raise(ErrorKind::InvalidInput,
          std::string(who) + ": operand not representable in " +
              env.fmt.to_string());
}

}  // namespace

double ArithEnv::round(double carrier_value) {
  const RoundOutcome out =
      round_one(fmt, mode, policy, carrier_value, key, counter);
  if (out.used_draw) ++counter;
  return out.value;
}

double add(ArithEnv& env, double a, double b) {
  require_member(env, a, "add");
  require_member(env, b, "add");
  return env.round(a + b);
}

double sub(ArithEnv& env, double a, double b) {
  require_member(env, a, "sub");
  require_member(env, b, "sub");
  return env.round(a - b);
}

double mul(ArithEnv& env, double a, double b) {
  require_member(env, a, "mul");
  require_member(env, b, "mul");
  return env.round(a * b);
}

double div(ArithEnv& env, double a, double b) {
  require_member(env, a, "div");
  require_member(env, b, "div");
  if (b == 0.0) raise(ErrorKind::DivisionByZero, "div: divisor is zero");
  return env.round(a / b);
}

double fma(ArithEnv& env, double a, double b, double c) {
  require_member(env, a, "fma");
  require_member(env, b, "fma");
  require_member(env, c, "fma");
  return env.round(std::fma(a, b, c));
}

double sum_sequential(ArithEnv& env, std::span<const double> xs) {
  if (xs.empty()) raise(ErrorKind::EmptyInput, "sum_sequential: empty input");
  require_member(env, xs[0], "sum_sequential");
  double acc = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) acc = add(env, acc, xs[i]);
  return acc;
}

double sum_exact(std::span<const double> xs) {
  if (xs.empty()) raise(ErrorKind::EmptyInput, "sum_exact: empty input");
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : xs) {
    if (!std::isfinite(v))
      raise(ErrorKind::InvalidInput, "sum_exact: non-finite input");
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      compensation += (sum - t) + v;
    else
      compensation += (v - t) + sum;
    sum = t;
  }
  return sum + compensation;
}

double dot(ArithEnv& env, std::span<const double> xs,
           std::span<const double> ys, DotKernel kernel) {
  if (xs.empty()) raise(ErrorKind::EmptyInput, "dot: empty input");
  if (xs.size() != ys.size())
    raise(ErrorKind::ShapeError, "dot: length mismatch");
  if (kernel == DotKernel::Fma) {
    double acc = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) acc = fma(env, xs[i], ys[i], acc);
    return acc;
  }
  double acc = mul(env, xs[0], ys[0]);
  for (size_t i = 1; i < xs.size(); ++i)
    acc = add(env, acc, mul(env, xs[i], ys[i]));
  return acc;
}

std::vector<double> quantize_vector(ArithEnv& env,
                                    std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) out[i] = env.round(xs[i]);
  return out;
}

Matrix quantize_matrix(ArithEnv& env, const Matrix& a) {
  Matrix out = a;
  for (double& v : out.data) v = env.round(v);  // row-major draw order
  return out;
}

}  // namespace sr
