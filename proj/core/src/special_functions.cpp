#include "leolink/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "leolink/error.hpp"

namespace leolink::special {
namespace {

bool is_nonpositive_integer(double v) { return v <= 0.0 && std::floor(v) == v; }

// Above this argument the Hankel asymptotic expansion is accurate to far
// below double epsilon for orders 0..2; below it the power series has only
// positive terms and no cancellation.
constexpr double kBesselAsymptoticFrom = 50.0;

long double bessel_series(int n, long double x) {
  const long double half = x / 2.0L;
  const long double q = half * half;
  long double term = 1.0L;
  for (int j = 1; j <= n; ++j) term *= half / j;
  long double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (term < sum * 1e-21L) break;
  }
  return sum;
}

long double bessel_asymptotic(int n, long double x) {
  const long double mu = 4.0L * n * n;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k < 60; ++k) {
    const long double odd = 2.0L * k - 1.0L;
    const long double next = -term * (mu - odd * odd) / (k * 8.0L * x);
    if (std::fabs(next) >= std::fabs(term)) break;  // series starts diverging
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-21L * std::fabs(sum)) break;
  }
  return std::exp(x) / std::sqrt(2.0L * std::numbers::pi_v<long double> * x) * sum;
}

}  // namespace

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1e-3)) {
    detail::fail(ErrorCode::InvalidArgument, "SeriesControl.rel_tol must lie in (0, 1e-3)");
  }
  if (max_terms < 50) {
    detail::fail(ErrorCode::InvalidArgument, "SeriesControl.max_terms must be >= 50");
  }
}

double pochhammer(double w, int k) {
  detail::require(k >= 0, ErrorCode::InvalidArgument, "pochhammer: k must be >= 0");
  long double product = 1.0L;
  for (int i = 0; i < k; ++i) product *= static_cast<long double>(w) + i;
  return static_cast<double>(product);
}

long double confluent_1f1_ld(double a, double b, double x, const SeriesControl& ctl) {
  ctl.validate();
  if (is_nonpositive_integer(b)) {
    detail::fail(ErrorCode::InvalidArgument, "confluent_1f1: b must not be a non-positive integer");
  }
  if (x == 0.0) return 1.0L;
  if (x < 0.0 && !is_nonpositive_integer(a)) {
    // Kummer: 1F1(a;b;x) = e^x 1F1(b-a;b;-x)
    return std::exp(static_cast<long double>(x)) * confluent_1f1_ld(b - a, b, -x, ctl);
  }

  const long double la = a;
  const long double lb = b;
  const long double lx = x;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int n = 0; n < ctl.max_terms; ++n) {
    const long double next = term * (la + n) * lx / ((lb + n) * (n + 1));
    if (next == 0.0L) return sum;  // (a)_n hit zero: polynomial case
    sum += next;
    const bool shrinking = std::fabs(next) <= std::fabs(term);
    term = next;
    if (shrinking && std::fabs(term) < ctl.rel_tol * std::fabs(sum)) return sum;
  }
  detail::fail(ErrorCode::NonConvergent,
               "confluent_1f1: no convergence within " + std::to_string(ctl.max_terms) +
                   " terms (a=" + std::to_string(a) + ", b=" + std::to_string(b) +
                   ", x=" + std::to_string(x) + ")");
}

double confluent_1f1(double a, double b, double x, const SeriesControl& ctl) {
  return static_cast<double>(confluent_1f1_ld(a, b, x, ctl));
}

double bessel_i(int n, double x) {
  if (n < 0 || n > 2) {
    detail::fail(ErrorCode::UnsupportedOrder, "bessel_i: only orders 0, 1 and 2 are supported");
  }
  detail::require(x >= 0.0, ErrorCode::InvalidArgument, "bessel_i: x must be >= 0");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const long double lx = x;
  const long double value =
      x < kBesselAsymptoticFrom ? bessel_series(n, lx) : bessel_asymptotic(n, lx);
  return static_cast<double>(value);
}

double log_gamma(double x) {
  detail::require(x > 0.0, ErrorCode::InvalidArgument, "log_gamma: x must be > 0");
  return std::lgamma(x);
}

}  // namespace leolink::special
