#pragma once

namespace leolink::special {

/// Truncation policy for the infinite series used by 1F1 and the level
/// crossing rate. Summation stops once the next term is below
/// `rel_tol * |partial sum|`.
struct SeriesControl {
  double rel_tol = 1e-12;
  int max_terms = 10'000;

  /// Throws InvalidArgument unless 0 < rel_tol < 1e-3 and max_terms >= 50.
  void validate() const;

  friend bool operator==(const SeriesControl&, const SeriesControl&) = default;
};

/// Rising factorial (w)_k = w (w+1) ... (w+k-1); (w)_0 = 1.
double pochhammer(double w, int k);

/// Confluent hypergeometric function of the first kind, 1F1(a; b; x), by
/// direct power series accumulated in long double. Negative arguments are
/// mapped through Kummer's transformation so the summed series never
/// alternates for x < 0. A non-positive integer `a` terminates the series.
///
/// Throws InvalidArgument when b is a non-positive integer and
/// NonConvergent when `ctl.max_terms` is exhausted.
double confluent_1f1(double a, double b, double x, const SeriesControl& ctl = {});

/// Same as confluent_1f1 but returns the long double accumulator, for
/// callers that multiply by a tiny exponential afterwards.
long double confluent_1f1_ld(double a, double b, double x, const SeriesControl& ctl = {});

/// Modified Bessel function of the first kind I_n(x) for n in {0, 1, 2} and
/// x >= 0. Throws UnsupportedOrder for n > 2.
double bessel_i(int n, double x);

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

}  // namespace leolink::special
