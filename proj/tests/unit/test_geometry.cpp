#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "leolink/error.hpp"
#include "leolink/geometry.hpp"
#include "testkit.hpp"

using namespace leolink;
using namespace leolink::geometry;
using testkit::rel_err;

namespace {

PassGeometry reference() {
  PassGeometry g;
  g.earth_radius = 6371e3;
  g.orbit_height = 500e3;
  g.coverage_radius = 500e3;
  g.half_track = 1000e3;
  g.sat_speed = 7600.0;
  g.terminal_offset = 0.0;
  return g;
}

PassGeometry random_geometry(testkit::Gen& gen) {
  PassGeometry g;
  g.earth_radius = gen.uniform(6.0e6, 6.5e6);
  g.orbit_height = gen.uniform(300e3, 2000e3);
  g.coverage_radius = gen.uniform(200e3, 1500e3);
  g.half_track = gen.uniform(50e3, g.coverage_radius);
  g.terminal_offset = gen.coin() ? 0.0 : gen.uniform(0.0, 300e3);
  g.sat_speed = gen.uniform(6500.0, 8000.0);
  return g;
}

}  // namespace

TEST(SubPointSpeed, LowOrbitLimit) {
  auto g = reference();
  g.orbit_height = 1e-6;
  EXPECT_NEAR(sub_point_speed(g), 7600.0, 1e-6);
}

TEST(SubPointSpeed, ReferenceOrbit) {
  EXPECT_LT(rel_err(sub_point_speed(reference()), 7600.0 * 6371.0 / 6871.0), 1e-15);
  EXPECT_NEAR(sub_point_speed(reference()), 7046.95, 0.01);
}

TEST(SubPointSpeed, StationarySatellite) {
  auto g = reference();
  g.sat_speed = 0.0;
  EXPECT_EQ(sub_point_speed(g), 0.0);
}

TEST(ServiceDuration, UnitIdentity) {
  auto g = reference();
  g.half_track = sub_point_speed(g) / 2.0;
  EXPECT_NEAR(service_duration(g), 1.0, 1e-15);
}

TEST(ServiceDuration, ReferencePass) {
  EXPECT_NEAR(service_duration(reference()), 283.81, 0.01);
}

TEST(ServiceDuration, LinearInHalfTrackAndFreeOfOffset) {
  testkit::Gen gen(21);
  for (int i = 0; i < testkit::kCases; ++i) {
    auto g = random_geometry(gen);
    const double ts = service_duration(g);
    auto doubled = g;
    doubled.half_track *= 2.0;
    EXPECT_LT(rel_err(service_duration(doubled), 2.0 * ts), 1e-15);
    auto moved = g;
    moved.terminal_offset = gen.uniform(0.0, 400e3);
    EXPECT_EQ(service_duration(moved), ts);
  }
}

TEST(Distance, ClosestApproachIsOrbitHeight) {
  const auto g = reference();
  EXPECT_LT(rel_err(distance_at(g, service_duration(g) / 2.0), g.orbit_height), 1e-12);
}

TEST(Distance, EdgeOfCoverage) {
  auto g = reference();
  g.half_track = g.coverage_radius;  // sqrt(d_delta^2 + H^2) = sqrt(H^2 + R^2)
  const double edge = std::hypot(g.orbit_height, g.coverage_radius);
  EXPECT_LT(rel_err(distance_at(g, 0.0), edge), 1e-15);
  EXPECT_LT(rel_err(distance_at(g, service_duration(g)), edge), 1e-12);
}

TEST(Distance, QuarterPassFormula) {
  auto g = reference();
  g.terminal_offset = 100e3;
  const double v = 7600.0 * 6371e3 / 6871e3;
  const double t = (2.0 * 1000e3 / v) / 4.0;
  const double want = std::sqrt(std::pow(1000e3 - v * t, 2) + 100e3 * 100e3 + 500e3 * 500e3);
  EXPECT_LT(rel_err(distance_at(g, t), want), 1e-14);
}

TEST(Distance, OutsidePassThrows) {
  const auto g = reference();
  for (double t : {-1e-9, service_duration(g) * (1.0 + 1e-12) + 1e-9}) {
    try {
      distance_at(g, t);
      FAIL() << "expected OutOfPass at t=" << t;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OutOfPass);
    }
  }
}

TEST(Distance, SymmetricWithInteriorMinimum) {
  testkit::Gen gen(22);
  for (int i = 0; i < testkit::kCases; ++i) {
    const auto g = random_geometry(gen);
    const double ts = service_duration(g);
    const double t_min = g.half_track / sub_point_speed(g);
    EXPECT_LT(rel_err(distance_at(g, 0.0), distance_at(g, ts)), 1e-12);
    const double d_min = distance_at(g, t_min);
    for (int j = 0; j < 20; ++j) {
      const double t = gen.uniform(0.0, ts);
      EXPECT_GE(distance_at(g, t), d_min * (1.0 - 1e-15));
      // continuity: nearby times give nearby ranges
      const double dt = std::min(1e-3, ts - t);
      EXPECT_LE(std::fabs(distance_at(g, t + dt) - distance_at(g, t)), g.sat_speed * dt * 1.0001);
    }
  }
}

TEST(DistanceRange, DegeneratePass) {
  auto g = reference();
  g.half_track = 1e-6;
  const auto [lo, hi] = distance_range(g);
  EXPECT_NEAR(lo, g.orbit_height, 1e-6);
  EXPECT_NEAR(hi, g.orbit_height, 1e-6);
}

TEST(DistanceRange, AllTerminalEnvelope) {
  const auto g = reference();
  const auto [lo, hi] = distance_range(g, true);
  EXPECT_EQ(lo, g.orbit_height);
  EXPECT_EQ(hi, std::sqrt(g.orbit_height * g.orbit_height + g.coverage_radius * g.coverage_radius));
  EXPECT_NEAR(hi, 707106.78, 0.01);
  EXPECT_EQ(coverage_max_distance(g), hi);
}

TEST(DistanceRange, FixedTerminal) {
  auto g = reference();
  g.terminal_offset = 120e3;
  const auto [lo, hi] = distance_range(g);
  EXPECT_EQ(lo, std::sqrt(120e3 * 120e3 + 500e3 * 500e3));
  EXPECT_EQ(hi, std::sqrt(1000e3 * 1000e3 + 120e3 * 120e3 + 500e3 * 500e3));
}

TEST(Timeline, SingleSlotCoversExtremes) {
  auto g = reference();
  g.terminal_offset = 50e3;
  const auto tl = build_timeline(g, service_duration(g));
  ASSERT_EQ(tl.n_slots, 1);
  const auto [lo, hi] = distance_range(g);
  EXPECT_LT(rel_err(tl.dist_min(1), lo), 1e-12);
  EXPECT_LT(rel_err(tl.dist_max(1), hi), 1e-12);
}

TEST(Timeline, SlotTooLong) {
  const auto g = reference();
  try {
    build_timeline(g, service_duration(g) * 1.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SlotTooLong);
  }
  EXPECT_THROW(build_timeline(g, 0.0), Error);
  EXPECT_THROW(build_timeline(g, -1.0), Error);
}

TEST(Timeline, SymmetricSlotsOnExactDivision) {
  auto g = reference();
  g.half_track = sub_point_speed(g) * 50.0;  // T_s = 100 s
  const auto tl = build_timeline(g, 2.0);
  ASSERT_EQ(tl.n_slots, 50);
  for (int n = 1; n <= tl.n_slots; ++n) {
    EXPECT_LT(rel_err(tl.dist_min(n), tl.dist_min(tl.n_slots + 1 - n)), 1e-9);
    EXPECT_LT(rel_err(tl.dist_max(n), tl.dist_max(tl.n_slots + 1 - n)), 1e-9);
  }
}

TEST(Timeline, DenseGridOracle) {
  const auto g = reference();
  const auto tl = build_timeline(g, 1.0);
  ASSERT_EQ(tl.n_slots, static_cast<int>(std::floor(service_duration(g))));
  for (int n = 1; n <= tl.n_slots; ++n) {
    double lo = INFINITY, hi = 0.0;
    for (int j = 0; j <= 1000; ++j) {
      const double d = distance_at(g, (n - 1) + j / 1000.0);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    SCOPED_TRACE(n);
    EXPECT_LE(tl.dist_min(n), lo * (1.0 + 1e-15));
    EXPECT_LT(rel_err(tl.dist_min(n), lo), 1e-9);
    EXPECT_LT(rel_err(tl.dist_max(n), hi), 1e-14);
  }
}

TEST(Timeline, InvariantsOnRandomPasses) {
  testkit::Gen gen(23);
  for (int i = 0; i < testkit::kCases; ++i) {
    const auto g = random_geometry(gen);
    const double ts = service_duration(g);
    const double slot = gen.uniform(ts / 300.0, ts);
    const auto tl = build_timeline(g, slot);
    SCOPED_TRACE(testing::Message() << "case " << i << " N=" << tl.n_slots);
    EXPECT_LE(tl.n_slots * tl.slot_len, ts);
    EXPECT_GT((tl.n_slots + 1) * tl.slot_len, ts);
    EXPECT_GE(tl.remainder(), 0.0);
    const double envelope = std::sqrt(g.half_track * g.half_track +
                                      g.terminal_offset * g.terminal_offset +
                                      g.orbit_height * g.orbit_height);
    for (int n = 1; n <= tl.n_slots; ++n) {
      EXPECT_GE(tl.dist_min(n), g.orbit_height);
      EXPECT_LE(tl.dist_min(n), tl.dist_max(n));
      EXPECT_LE(tl.dist_max(n), envelope * (1.0 + 1e-15));
      for (int j = 0; j < 100; ++j) {
        const double t = gen.uniform((n - 1) * slot, n * slot);
        const double d = distance_at(g, t);
        EXPECT_GE(d, tl.dist_min(n) * (1.0 - 1e-14));
        EXPECT_LE(d, tl.dist_max(n) * (1.0 + 1e-14));
      }
    }
  }
}

TEST(Timeline, IndexChecks) {
  const auto tl = build_timeline(reference(), 1.0);
  EXPECT_THROW(tl.dist_min(0), Error);
  EXPECT_THROW(tl.dist_max(tl.n_slots + 1), Error);
}

TEST(Helpers, CircularOrbitAndPlaneSpacing) {
  EXPECT_LT(rel_err(circular_orbit_speed(6371e3, 500e3), std::sqrt(398600.4418e9 / 6871e3)), 1e-15);
  EXPECT_NEAR(circular_orbit_speed(6371e3, 500e3), 7616.5, 0.1);
  EXPECT_LT(rel_err(half_track_from_plane(6371e3, 20), std::numbers::pi * 6371e3 / 20.0), 1e-15);
  EXPECT_THROW(half_track_from_plane(6371e3, 0), Error);
}

TEST(PassGeometry, Validation) {
  auto g = reference();
  EXPECT_NO_THROW(g.validate());
  g.path_loss_exp = 1.5;
  EXPECT_THROW(g.validate(), Error);
  g = reference();
  g.terminal_offset = -1.0;
  EXPECT_THROW(g.validate(), Error);
  g = reference();
  g.sat_speed = 0.0;
  EXPECT_THROW(g.validate(), Error);
}
