#include "leolink/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "leolink/error.hpp"

namespace leolink::geometry {

using detail::require;

void PassGeometry::validate() const {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  require(earth_radius > 0.0, kCode, "geometry: earth_radius must be > 0");
  require(orbit_height > 0.0, kCode, "geometry: orbit_height must be > 0");
  require(coverage_radius > 0.0, kCode, "geometry: coverage_radius must be > 0");
  require(half_track > 0.0, kCode, "geometry: half_track must be > 0");
  require(sat_speed > 0.0, kCode, "geometry: sat_speed must be > 0");
  require(terminal_offset >= 0.0, kCode, "geometry: terminal_offset must be >= 0");
  require(path_loss_exp >= 2.0, kCode, "geometry: path_loss_exp must be >= 2");
}

double PassTimeline::dist_min(int n) const {
  require(n >= 1 && n <= n_slots, ErrorCode::IndexOutOfRange, "timeline: slot index out of range");
  return slot_dist_min[static_cast<std::size_t>(n - 1)];
}

double PassTimeline::dist_max(int n) const {
  require(n >= 1 && n <= n_slots, ErrorCode::IndexOutOfRange, "timeline: slot index out of range");
  return slot_dist_max[static_cast<std::size_t>(n - 1)];
}

double circular_orbit_speed(double earth_radius, double orbit_height) {
  require(earth_radius + orbit_height > 0.0, ErrorCode::InvalidArgument,
          "circular_orbit_speed: orbit radius must be > 0");
  return std::sqrt(kEarthMu / (earth_radius + orbit_height));
}

double half_track_from_plane(double earth_radius, int sats_per_plane) {
  require(sats_per_plane > 0, ErrorCode::InvalidArgument,
          "half_track_from_plane: sats_per_plane must be > 0");
  return std::numbers::pi * earth_radius / sats_per_plane;
}

double sub_point_speed(const PassGeometry& geo) {
  return geo.sat_speed * geo.earth_radius / (geo.earth_radius + geo.orbit_height);
}

double service_duration(const PassGeometry& geo) {
  return 2.0 * geo.half_track / sub_point_speed(geo);
}

namespace {

// No range check; callers clamp t into the pass.
double slant_range(const PassGeometry& geo, double v, double t) {
  const double along = geo.half_track - v * t;
  return std::sqrt(along * along + geo.terminal_offset * geo.terminal_offset +
                   geo.orbit_height * geo.orbit_height);
}

}  // namespace

double distance_at(const PassGeometry& geo, double t) {
  const double ts = service_duration(geo);
  if (!(t >= 0.0 && t <= ts)) {
    detail::fail(ErrorCode::OutOfPass, "distance_at: t=" + std::to_string(t) +
                                           " s lies outside the pass [0, " + std::to_string(ts) +
                                           "] s");
  }
  return slant_range(geo, sub_point_speed(geo), t);
}

std::pair<double, double> distance_range(const PassGeometry& geo, bool all_terminals) {
  const double h2 = geo.orbit_height * geo.orbit_height;
  if (all_terminals) return {geo.orbit_height, coverage_max_distance(geo)};
  const double p2 = geo.terminal_offset * geo.terminal_offset;
  return {std::sqrt(p2 + h2), std::sqrt(geo.half_track * geo.half_track + p2 + h2)};
}

double coverage_max_distance(const PassGeometry& geo) {
  return std::hypot(geo.orbit_height, geo.coverage_radius);
}

PassTimeline build_timeline(const PassGeometry& geo, double slot_len) {
  geo.validate();
  require(slot_len > 0.0, ErrorCode::InvalidArgument, "build_timeline: slot length must be > 0");
  const double ts = service_duration(geo);
  if (slot_len > ts) {
    detail::fail(ErrorCode::SlotTooLong, "build_timeline: slot length " + std::to_string(slot_len) +
                                             " s exceeds the service time " + std::to_string(ts) +
                                             " s");
  }

  PassTimeline tl;
  tl.service_time = ts;
  tl.slot_len = slot_len;
  auto n = static_cast<int>(std::floor(ts / slot_len));
  // guard floor() against a quotient that rounded across an integer
  while (n > 1 && n * slot_len > ts) --n;
  while ((n + 1) * slot_len <= ts) ++n;
  tl.n_slots = std::max(n, 1);

  const double v = sub_point_speed(geo);
  const double t_closest = geo.half_track / v;
  const double closest = slant_range(geo, v, t_closest);
  tl.slot_dist_min.reserve(static_cast<std::size_t>(tl.n_slots));
  tl.slot_dist_max.reserve(static_cast<std::size_t>(tl.n_slots));
  for (int i = 0; i < tl.n_slots; ++i) {
    const double t0 = i * slot_len;
    const double t1 = std::min((i + 1) * slot_len, ts);
    const double d0 = slant_range(geo, v, t0);
    const double d1 = slant_range(geo, v, t1);
    double lo = std::min(d0, d1);
    if (t_closest > t0 && t_closest < t1) lo = closest;
    tl.slot_dist_min.push_back(lo);
    tl.slot_dist_max.push_back(std::max(d0, d1));
  }
  return tl;
}

}  // namespace leolink::geometry
