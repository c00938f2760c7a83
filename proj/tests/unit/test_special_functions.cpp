#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "leolink/error.hpp"
#include "leolink/special_functions.hpp"
#include "testkit.hpp"

using namespace leolink;
using namespace leolink::special;
using testkit::rel_err;

namespace {

// Plain term-by-term 1F1 in long double, stopping on a fixed tolerance.
long double naive_1f1(long double a, long double b, long double x, long double tol) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int n = 0; n < 100000; ++n) {
    term *= (a + n) * x / ((b + n) * (n + 1));
    sum += term;
    if (std::fabs(term) < tol * std::fabs(sum) && n > 5) break;
  }
  return sum;
}

// Sum of |terms| of the same series; bounds the rounding error of the naive
// sum when it cancels.
long double naive_1f1_magnitude(long double a, long double b, long double x) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int n = 0; n < 100000; ++n) {
    term *= (a + n) * x / ((b + n) * (n + 1));
    sum += std::fabs(term);
    if (std::fabs(term) < 1e-20L * sum && n > 5) break;
  }
  return sum;
}

long double naive_bessel(int order, long double x, int terms) {
  long double sum = 0.0L;
  for (int k = 0; k < terms; ++k) {
    sum += std::exp((2.0L * k + order) * std::log(x / 2.0L) - std::lgamma(k + 1.0L) -
                    std::lgamma(k + order + 1.0L));
  }
  return sum;
}

}  // namespace

TEST(Pochhammer, EmptyProductIsOne) { EXPECT_EQ(pochhammer(3.7, 0), 1.0); }

TEST(Pochhammer, SmallIntegerProduct) { EXPECT_EQ(pochhammer(3.0, 2), 12.0); }

TEST(Pochhammer, NegativeBase) {
  EXPECT_LT(rel_err(pochhammer(1.0 - 10.1, 3), -9.1 * -8.1 * -7.1), 1e-14);
  EXPECT_LT(rel_err(pochhammer(1.0 - 10.1, 3), -523.341), 1e-12);
}

TEST(Pochhammer, RejectsNegativeCount) { EXPECT_THROW(pochhammer(1.0, -1), Error); }

TEST(Pochhammer, StepRecurrence) {
  testkit::Gen gen(11);
  for (int i = 0; i < testkit::kCases; ++i) {
    const double w = gen.uniform(-20.0, 20.0);
    const int k = gen.integer(0, 30);
    SCOPED_TRACE(testing::Message() << "w=" << w << " k=" << k);
    const double lhs = pochhammer(w, k + 1);
    const double rhs = pochhammer(w, k) * (w + k);
    EXPECT_LE(std::fabs(lhs - rhs), 1e-12 * std::max(std::fabs(rhs), 1e-300));
  }
}

TEST(Hypergeometric, ZeroArgumentIsExactlyOne) {
  EXPECT_EQ(confluent_1f1(2.0, 1.0, 0.0), 1.0);
  testkit::Gen gen(12);
  for (int i = 0; i < testkit::kCases; ++i) {
    EXPECT_EQ(confluent_1f1(gen.uniform(-30.0, 30.0), gen.uniform(0.1, 30.0), 0.0), 1.0);
  }
}

TEST(Hypergeometric, UnitParametersGiveExp) {
  EXPECT_LT(rel_err(confluent_1f1(1.0, 1.0, 1.0, SeriesControl{1e-16, 10000}), std::numbers::e), 1e-15);
  for (double x = 0.0; x <= 30.0; x += 0.25) {
    SCOPED_TRACE(x);
    EXPECT_LT(rel_err(confluent_1f1(1.0, 1.0, x), std::exp(x)), 1e-12);
  }
}

TEST(Hypergeometric, AgreesWithTightSeriesOracle) {
  const long double want = naive_1f1(10.1L, 1.0L, 0.5L, 1e-14L);
  EXPECT_LT(rel_err(confluent_1f1(10.1, 1.0, 0.5), static_cast<double>(want)), 1e-12);
}

TEST(Hypergeometric, NegativeArgumentUsesKummer) {
  testkit::Gen gen(13);
  for (int i = 0; i < testkit::kCases; ++i) {
    const double a = gen.uniform(0.5, 12.0);
    const double b = gen.uniform(0.5, 6.0);
    const double x = -gen.uniform(0.0, 15.0);
    SCOPED_TRACE(testing::Message() << "a=" << a << " b=" << b << " x=" << x);
    // the naive alternating sum is accurate enough while |x| stays moderate
    if (x < -8.0) {
      const double direct = std::exp(x) * confluent_1f1(b - a, b, -x);
      EXPECT_LT(rel_err(confluent_1f1(a, b, x), direct), 1e-12);
    } else {
      const long double want = naive_1f1(a, b, x, 1e-20L);
      const double slack = static_cast<double>(1e-16L * naive_1f1_magnitude(a, b, x) + 1e-12L * std::fabs(want));
      EXPECT_LE(std::fabs(confluent_1f1(a, b, x) - static_cast<double>(want)), slack);
    }
  }
}

TEST(Hypergeometric, TerminatesForNonPositiveIntegerA) {
  // 1F1(-3; 1; x) = L_3(x)
  for (double x = -5.0; x <= 20.0; x += 0.5) {
    const double laguerre = (-x * x * x + 9.0 * x * x - 18.0 * x + 6.0) / 6.0;
    EXPECT_NEAR(confluent_1f1(-3.0, 1.0, x), laguerre, 1e-12 * std::max(1.0, std::fabs(laguerre)));
  }
}

TEST(Hypergeometric, KummerContiguousRelation) {
  testkit::Gen gen(14);
  for (int i = 0; i < testkit::kCases; ++i) {
    const double a = gen.uniform(1.0, 12.0);
    const double b = gen.uniform(1.0, 5.0);
    const double x = gen.uniform(-5.0, 20.0);
    SCOPED_TRACE(testing::Message() << "a=" << a << " b=" << b << " x=" << x);
    const double f = confluent_1f1(a, b, x);
    const double f_am = confluent_1f1(a - 1.0, b, x);
    const double f_bp = confluent_1f1(a, b + 1.0, x);
    const double scale = std::max({std::fabs(b * f), std::fabs(b * f_am), std::fabs(x * f_bp)});
    EXPECT_LE(std::fabs(b * f - b * f_am - x * f_bp), 1e-8 * scale);
  }
}

TEST(Hypergeometric, ReportsNonConvergence) {
  SeriesControl tight{1e-12, 50};
  try {
    confluent_1f1(10.0, 1.0, 200.0, tight);
    FAIL() << "expected NonConvergent";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergent);
  }
}

TEST(Hypergeometric, RejectsPoleInB) { EXPECT_THROW(confluent_1f1(1.0, -2.0, 1.0), Error); }

TEST(SeriesControl, Validation) {
  EXPECT_NO_THROW(SeriesControl{}.validate());
  EXPECT_THROW((SeriesControl{0.0, 100}.validate()), Error);
  EXPECT_THROW((SeriesControl{1e-2, 100}.validate()), Error);
  EXPECT_THROW((SeriesControl{1e-12, 49}.validate()), Error);
  EXPECT_EQ(SeriesControl{}.rel_tol, 1e-12);
  EXPECT_EQ(SeriesControl{}.max_terms, 10000);
}

TEST(Bessel, ValuesAtZero) {
  EXPECT_EQ(bessel_i(0, 0.0), 1.0);
  EXPECT_EQ(bessel_i(1, 0.0), 0.0);
  EXPECT_EQ(bessel_i(2, 0.0), 0.0);
}

TEST(Bessel, ExtendedPrecisionSeriesAtKappa) {
  const double want = static_cast<double>(naive_bessel(0, 24.2L, 200));
  EXPECT_LT(rel_err(bessel_i(0, 24.2), want), 1e-12);
}

TEST(Bessel, MatchesSeriesOracleOnRange) {
  for (int n = 0; n <= 2; ++n) {
    for (double x = 0.05; x <= 50.0; x += 0.05) {
      SCOPED_TRACE(testing::Message() << "n=" << n << " x=" << x);
      EXPECT_LT(rel_err(bessel_i(n, x), static_cast<double>(naive_bessel(n, x, 200))), 1e-10);
    }
  }
}

TEST(Bessel, MatchesStandardLibraryAcrossAsymptoticSwitch) {
  for (int n = 0; n <= 2; ++n) {
    for (double x : {1e-3, 0.5, 10.0, 49.999, 50.0, 50.001, 75.0, 200.0, 650.0}) {
      SCOPED_TRACE(testing::Message() << "n=" << n << " x=" << x);
      EXPECT_LT(rel_err(bessel_i(n, x), std::cyl_bessel_i(static_cast<double>(n), x)), 1e-10);
    }
  }
}

TEST(Bessel, OrdersAreOrdered) {
  testkit::Gen gen(15);
  for (int i = 0; i < testkit::kCases; ++i) {
    const double x = gen.log_uniform(1e-4, 300.0);
    SCOPED_TRACE(x);
    const double i0 = bessel_i(0, x), i1 = bessel_i(1, x), i2 = bessel_i(2, x);
    EXPECT_GE(i0, i1);
    EXPECT_GE(i1, i2);
    EXPECT_GE(i2, 0.0);
  }
}

TEST(Bessel, RejectsHigherOrders) {
  try {
    bessel_i(3, 1.0);
    FAIL() << "expected UnsupportedOrder";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedOrder);
  }
  EXPECT_THROW(bessel_i(0, -1.0), Error);
}

TEST(LogGamma, MatchesStd) {
  for (double x : {0.5, 1.0, 10.1, 170.0}) EXPECT_EQ(log_gamma(x), std::lgamma(x));
  EXPECT_THROW(log_gamma(0.0), Error);
}
