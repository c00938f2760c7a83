#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "leolink/channel.hpp"
#include "leolink/error.hpp"
#include "leolink/geometry.hpp"
#include "leolink/schemes.hpp"
#include "leolink/validation.hpp"
#include "testkit.hpp"

using namespace leolink;
using namespace leolink::schemes;
using testkit::rel_err;

namespace {

geometry::PassGeometry reference_geometry(double height = 500e3) {
  geometry::PassGeometry g;
  g.orbit_height = height;
  g.coverage_radius = 500e3;
  g.half_track = 400e3;
  g.terminal_offset = 100e3;
  g.sat_speed = geometry::circular_orbit_speed(g.earth_radius, height);
  return g;
}

LinkBudget reference_budget() {
  LinkBudget b;
  b.bandwidth = 60e6;
  b.noise_power = testkit::dbm_to_w(-66.0);
  return b;
}

struct RatCase {
  geometry::PassGeometry geo;
  geometry::PassTimeline tl;
  LinkBudget budget = reference_budget();
  RatConfig rat;
  channel::SrFading fading = testkit::reference_fading();
  channel::GainPartition part;
  channel::StateProbMatrix probs;
  double d_max = 0.0;
  double lambda = 0.0;
};

RatCase rat_case(double tx_dbw, double height = 500e3, int states = 8) {
  RatCase c;
  c.geo = reference_geometry(height);
  c.tl = geometry::build_timeline(c.geo, 1.0);
  c.rat.tx_power = testkit::db_to_linear(tx_dbw);
  c.rat.min_snr = 1.0;
  c.d_max = geometry::coverage_max_distance(c.geo);
  const double mu1 = rat_first_threshold(c.budget, c.rat, c.d_max);
  c.part = channel::equal_probability_partition(c.fading, mu1, states);
  c.probs = channel::state_prob_matrix(c.fading, c.part, c.tl.n_slots);
  c.lambda = channel::afd(c.fading, testkit::reference_doppler(), mu1);
  return c;
}

struct PatCase {
  geometry::PassTimeline tl;
  LinkBudget budget = reference_budget();
  PatConfig pat;
  channel::SrFading fading = testkit::reference_fading();
  channel::GainPartition part;
  channel::StateProbMatrix probs;
  double d_max = 0.0;
  double lambda = 0.0;
};

PatCase pat_case(double max_dbw, double rate = 600e6) {
  PatCase c;
  const auto geo = reference_geometry();
  c.tl = geometry::build_timeline(geo, 1.0);
  c.pat.max_power = testkit::db_to_linear(max_dbw);
  c.pat.fixed_rate = rate;
  c.d_max = geometry::coverage_max_distance(geo);
  const double mu1 = pat_first_threshold(c.budget, c.pat, c.d_max);
  c.part = channel::equal_probability_partition(c.fading, mu1, 8);
  c.probs = channel::state_prob_matrix(c.fading, c.part, c.tl.n_slots);
  c.lambda = channel::afd(c.fading, testkit::reference_doppler(), mu1);
  return c;
}

TrafficSpec traffic(double th) { return {500e3, th}; }

double log2p1(double x) { return std::log(1.0 + x) / std::log(2.0); }

}  // namespace

TEST(RatThreshold, SnrAtCoverageEdgeIsTheMinimum) {
  testkit::Gen gen(51);
  for (int i = 0; i < testkit::kCases; ++i) {
    LinkBudget b;
    b.noise_power = gen.log_uniform(1e-15, 1e-6);
    b.path_loss_exp = gen.uniform(2.0, 4.0);
    RatConfig r{gen.log_uniform(1.0, 1e5), gen.log_uniform(0.1, 100.0)};
    const double d = gen.uniform(3e5, 3e6);
    const double mu = rat_first_threshold(b, r, d);
    EXPECT_LT(rel_err(r.tx_power * mu * mu / (b.noise_power * std::pow(d, b.path_loss_exp)), r.min_snr),
              1e-12);
  }
  EXPECT_THROW(rat_first_threshold(reference_budget(), RatConfig{}, 0.0), Error);
}

TEST(PatThreshold, PowerAtCoverageEdgeIsTheMaximum) {
  testkit::Gen gen(52);
  for (int i = 0; i < testkit::kCases; ++i) {
    LinkBudget b;
    b.bandwidth = gen.log_uniform(1e6, 1e9);
    b.noise_power = gen.log_uniform(1e-15, 1e-6);
    PatConfig p{gen.log_uniform(10.0, 1e6), gen.log_uniform(1e6, 2e9)};
    const double d = gen.uniform(3e5, 3e6);
    const double mu = pat_first_threshold(b, p, d);
    const double snr = std::exp2(p.fixed_rate / b.bandwidth) - 1.0;
    EXPECT_LT(rel_err(b.noise_power * d * d * snr / (mu * mu), p.max_power), 1e-12);
  }
}

TEST(RatBounds, OrderedAndSilentInStateOne) {
  const auto c = rat_case(30.0);
  for (int n = 1; n <= c.tl.n_slots; n += 7) {
    const auto s1 = rat_rate_bounds(c.budget, c.rat, c.part, c.tl, 1, n);
    EXPECT_EQ(s1.lo, 0.0);
    EXPECT_EQ(s1.hi, 0.0);
    for (int k = 2; k <= c.part.states(); ++k) {
      const auto snr = rat_snr_bounds(c.budget, c.rat, c.part, c.tl, k, n);
      const auto r = rat_rate_bounds(c.budget, c.rat, c.part, c.tl, k, n);
      EXPECT_LE(snr.lo, snr.hi);
      EXPECT_LE(r.lo, r.hi);
      EXPECT_LT(rel_err(r.lo, 60e6 * log2p1(snr.lo)), 1e-13);
      EXPECT_LT(rel_err(r.hi, 60e6 * log2p1(snr.hi)), 1e-13);
      const double want_lo = c.rat.tx_power * std::pow(c.part.lower(k), 2) /
                             (c.budget.noise_power * std::pow(c.tl.dist_max(n), 2));
      EXPECT_LT(rel_err(snr.lo, want_lo), 1e-13);
    }
  }
  EXPECT_THROW(rat_snr_bounds(c.budget, c.rat, c.part, c.tl, 0, 1), Error);
  EXPECT_THROW(rat_snr_bounds(c.budget, c.rat, c.part, c.tl, 2, c.tl.n_slots + 1), Error);
}

TEST(RatBounds, SecondStateLowerEdgeHitsMinimumAtCoverageEdge) {
  auto c = rat_case(30.0);
  geometry::PassTimeline tl;
  tl.n_slots = 1;
  tl.slot_len = 1.0;
  tl.service_time = 1.0;
  tl.slot_dist_min = {c.d_max};
  tl.slot_dist_max = {c.d_max};
  const auto snr = rat_snr_bounds(c.budget, c.rat, c.part, tl, 2, 1);
  EXPECT_LT(rel_err(snr.lo, c.rat.min_snr), 1e-12);
}

TEST(RatMetrics, ThroughputPowerAndEfficiency) {
  const auto c = rat_case(36.0);
  double lo = 0.0, hi = 0.0, power = 0.0;
  for (int n = 1; n <= c.tl.n_slots; ++n) {
    for (int k = 2; k <= c.part.states(); ++k) {
      const double p = c.probs(k, n);
      const double a = c.part.lower(k);
      lo += p * 60e6 * log2p1(c.rat.tx_power * a * a / (c.budget.noise_power * std::pow(c.tl.dist_max(n), 2)));
      hi += p * 60e6 *
            log2p1(c.rat.tx_power * c.part.gain_ceiling(k) / (c.budget.noise_power * std::pow(c.tl.dist_min(n), 2)));
      power += p * c.rat.tx_power;
    }
  }
  const double n = c.tl.n_slots;
  const auto thr = rat_throughput_bounds(c.budget, c.rat, c.part, c.tl, c.probs);
  EXPECT_LT(rel_err(thr.lo, lo / n), 1e-12);
  EXPECT_LT(rel_err(thr.hi, hi / n), 1e-12);
  EXPECT_LT(rel_err(rat_avg_power(c.rat, c.probs), power / n), 1e-12);
  const auto ee = rat_ee_bounds(c.budget, c.rat, c.part, c.tl, c.probs);
  EXPECT_LT(rel_err(ee.lo, lo / power), 1e-12);
  EXPECT_LT(rel_err(ee.hi, hi / power), 1e-12);
  const double p_expected = c.rat.tx_power * (1.0 - channel::sr_cdf(c.fading, std::pow(c.part.lower(2), 2)));
  EXPECT_LT(rel_err(rat_avg_power(c.rat, c.probs), p_expected), 1e-9);
}

TEST(RatMetrics, ZeroPowerWhenNothingTransmits) {
  const auto c = rat_case(30.0, 500e3, 3);
  channel::StateProbMatrix silent(3, c.tl.n_slots);
  for (int n = 1; n <= c.tl.n_slots; ++n) silent(1, n) = 1.0;
  try {
    rat_ee_bounds(c.budget, c.rat, c.part, c.tl, silent);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroPower);
  }
  EXPECT_EQ(rat_avg_power(c.rat, silent), 0.0);
}

TEST(RatMetrics, DimensionMismatch) {
  const auto c = rat_case(30.0);
  const channel::StateProbMatrix wrong(c.part.states(), c.tl.n_slots + 1);
  try {
    rat_throughput_bounds(c.budget, c.rat, c.part, c.tl, wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(RatDor, Limits) {
  const auto c = rat_case(45.0);
  EXPECT_EQ(rat_dor(c.budget, c.rat, c.part, c.tl, c.probs, traffic(0.0), c.lambda), 1.0);
  EXPECT_LT(rat_dor(c.budget, c.rat, c.part, c.tl, c.probs, traffic(1e9), c.lambda), 1e-12);
  testkit::Gen gen(53);
  for (int i = 0; i < 50; ++i) {
    const double dor =
        rat_dor(c.budget, c.rat, c.part, c.tl, c.probs, traffic(gen.uniform(0.0, 0.01)), c.lambda);
    EXPECT_GE(dor, 0.0);
    EXPECT_LE(dor, 1.0);
  }
}

TEST(RatDor, ClosedFormEqualsDirectIntegral) {
  for (double tx : {40.0, 45.0, 50.0}) {
    const auto c = rat_case(tx);
    for (double th : {0.2e-3, 0.5e-3, 1.0e-3, 5e-3}) {
      SCOPED_TRACE(testing::Message() << "tx=" << tx << " th=" << th);
      const double closed = rat_dor(c.budget, c.rat, c.part, c.tl, c.probs, traffic(th), c.lambda);
      const double direct =
          validation::rat_dor_direct(c.budget, c.rat, c.part, c.tl, c.probs, traffic(th), c.lambda);
      EXPECT_NEAR(closed, direct, 1e-9);
    }
  }
}

TEST(RatDor, NonIncreasingInThresholdAndPower) {
  const auto c = rat_case(45.0);
  double prev = 1.0;
  for (int i = 0; i <= 20; ++i) {
    const double dor = rat_dor(c.budget, c.rat, c.part, c.tl, c.probs, traffic(i * 0.25e-3), c.lambda);
    EXPECT_LE(dor, prev + 1e-15);
    prev = dor;
  }
  prev = 1.0;
  for (double tx = 30.0; tx <= 54.0; tx += 3.0) {
    const auto ct = rat_case(tx);
    const double dor = rat_dor(ct.budget, ct.rat, ct.part, ct.tl, ct.probs, traffic(1e-3), ct.lambda);
    EXPECT_LE(dor, prev + 1e-15) << tx;
    prev = dor;
  }
}

TEST(RatReport, CollectsTheParts) {
  const auto c = rat_case(40.0);
  const auto rep = rat_report(c.budget, c.rat, c.part, c.tl, c.probs, traffic(1e-3), c.lambda);
  const auto thr = rat_throughput_bounds(c.budget, c.rat, c.part, c.tl, c.probs);
  EXPECT_EQ(rep.throughput_lo, thr.lo);
  EXPECT_EQ(rep.throughput_hi, thr.hi);
  EXPECT_EQ(rep.avg_power_lo, rep.avg_power_hi);
  EXPECT_EQ(rep.lambda, c.lambda);
  EXPECT_LE(rep.ee_lo, rep.ee_hi);
}

TEST(PatPower, UpperEdgeIsMaxPowerAtCoverageEdge) {
  auto c = pat_case(50.0);
  geometry::PassTimeline tl;
  tl.n_slots = 2;
  tl.slot_len = 1.0;
  tl.service_time = 2.0;
  tl.slot_dist_min = {c.d_max * 0.9, c.d_max * 0.8};
  tl.slot_dist_max = {c.d_max, c.d_max};
  for (int n = 1; n <= 2; ++n) {
    const auto p = pat_power_bounds(c.budget, c.pat, c.part, tl, 2, n);
    EXPECT_LT(rel_err(p.hi, c.pat.max_power), 1e-12);
    EXPECT_LE(p.lo, p.hi);
  }
}

TEST(PatPower, OrderedCappedAndMonotoneInState) {
  const auto c = pat_case(50.0);
  for (int n = 1; n <= c.tl.n_slots; n += 5) {
    EXPECT_EQ(pat_power_bounds(c.budget, c.pat, c.part, c.tl, 1, n).hi, 0.0);
    double prev_hi = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= c.part.states(); ++k) {
      const auto p = pat_power_bounds(c.budget, c.pat, c.part, c.tl, k, n);
      EXPECT_LE(p.lo, p.hi);
      EXPECT_LE(p.hi, c.pat.max_power);
      EXPECT_GT(p.lo, 0.0);
      EXPECT_LE(p.hi, prev_hi);
      prev_hi = p.hi;
    }
  }
}

TEST(PatReport, ThroughputAndPowers) {
  const auto c = pat_case(50.0);
  const auto rep = pat_report(c.budget, c.pat, c.part, c.tl, c.probs, traffic(1e-3), c.lambda, c.d_max);
  const double pi1 = c.probs(1, 1);
  EXPECT_LT(rel_err(rep.throughput_lo, c.pat.fixed_rate * (1.0 - pi1)), 1e-12);
  EXPECT_EQ(rep.throughput_lo, rep.throughput_hi);
  EXPECT_LE(rep.avg_power_lo, rep.avg_power_hi);
  EXPECT_LE(rep.ee_lo, rep.ee_hi);
  EXPECT_LT(rel_err(rep.ee_lo, rep.throughput_lo / rep.avg_power_hi), 1e-12);
}

TEST(PatReport, RejectsForeignPartition) {
  const auto c = pat_case(50.0);
  const auto other = channel::equal_probability_partition(c.fading, c.part.lower(2) * 1.1, 8);
  EXPECT_THROW(pat_report(c.budget, c.pat, other, c.tl, c.probs, traffic(1e-3), c.lambda, c.d_max), Error);
}

TEST(PatDor, PiecewiseLaw) {
  const auto c = pat_case(50.0);
  const double knee = 500e3 / 600e6;
  double pi1 = 0.0;
  for (int n = 1; n <= c.probs.slots(); ++n) pi1 += c.probs(1, n);
  pi1 /= c.probs.slots();
  EXPECT_EQ(pat_dor(c.pat, c.probs, traffic(knee * 0.999), c.lambda), 1.0);
  EXPECT_EQ(pat_dor(c.pat, c.probs, traffic(0.0), c.lambda), 1.0);
  EXPECT_LT(rel_err(pat_dor(c.pat, c.probs, traffic(knee), c.lambda), pi1), 1e-12);
  for (double th : {1e-3, 0.1, 10.0, 1e4}) {
    EXPECT_LT(rel_err(pat_dor(c.pat, c.probs, traffic(th), c.lambda), pi1 * std::exp(-(th - knee) / c.lambda)),
              1e-12);
    EXPECT_NEAR(pat_dor(c.pat, c.probs, traffic(th), c.lambda),
                validation::pat_dor_direct(c.pat, c.tl, c.probs, traffic(th), c.lambda), 1e-9);
  }
}

TEST(PatDor, NonIncreasingInMaxPower) {
  double prev = 1.0;
  for (double p = 40.0; p <= 58.0; p += 3.0) {
    const auto c = pat_case(p);
    const double dor = pat_dor(c.pat, c.probs, traffic(1e-3), c.lambda);
    EXPECT_LE(dor, prev + 1e-15) << p;
    prev = dor;
  }
}

TEST(ConfigValidation, RejectsNonsense) {
  EXPECT_THROW((LinkBudget{0.0, 1e-9, 2.0}.validate()), Error);
  EXPECT_THROW((LinkBudget{1e6, 1e-9, 1.5}.validate()), Error);
  EXPECT_THROW((RatConfig{-1.0, 1.0}.validate()), Error);
  EXPECT_THROW((PatConfig{1.0, 0.0}.validate()), Error);
  EXPECT_THROW((TrafficSpec{0.0, 1e-3}.validate()), Error);
  EXPECT_THROW((TrafficSpec{1.0, -1e-3}.validate()), Error);
}
