#pragma once

#include <utility>
#include <vector>

namespace leolink::geometry {

/// Standard gravitational parameter of the Earth, m^3/s^2.
inline constexpr double kEarthMu = 398600.4418e9;

/// Planar pass geometry for one satellite crossing a fixed terminal. The
/// sub-satellite point moves along a straight track; the terminal sits
/// `terminal_offset` metres off that track and sees the satellite for the
/// time it takes the sub-satellite point to cover `2 * half_track`.
struct PassGeometry {
  double earth_radius = 6371e3;    // m
  double orbit_height = 500e3;     // m
  double coverage_radius = 500e3;  // m
  double half_track = 400e3;       // m
  double sat_speed = 0.0;          // m/s, orbital speed of the satellite
  double terminal_offset = 0.0;    // m
  double path_loss_exp = 2.0;

  /// Throws InvalidArgument on any violated field constraint.
  void validate() const;

  friend bool operator==(const PassGeometry&, const PassGeometry&) = default;
};

/// Per-slot discretisation of a pass. Slots are 1-based in the API but
/// stored 0-based; slot n covers [(n-1) T_slot, n T_slot].
struct PassTimeline {
  double service_time = 0.0;  // T_s, s
  double slot_len = 0.0;      // T_slot, s
  int n_slots = 0;            // N = floor(T_s / T_slot)
  std::vector<double> slot_dist_min;
  std::vector<double> slot_dist_max;

  /// Time discarded at the end of the pass because T_s is not a multiple
  /// of T_slot.
  double remainder() const { return service_time - n_slots * slot_len; }
  double dist_min(int n) const;  // 1-based
  double dist_max(int n) const;  // 1-based
};

/// Circular-orbit speed sqrt(mu / (Re + H)).
double circular_orbit_speed(double earth_radius, double orbit_height);

/// Half of the along-track spacing between neighbouring satellites of one
/// plane, pi * Re / sats_per_plane, measured on the ground.
double half_track_from_plane(double earth_radius, int sats_per_plane);

double sub_point_speed(const PassGeometry& geo);
double service_duration(const PassGeometry& geo);

/// Slant range at time t after the terminal enters coverage.
/// Throws OutOfPass outside [0, T_s].
double distance_at(const PassGeometry& geo, double t);

/// (min, max) slant range over the pass for this terminal or, with
/// `all_terminals`, over every terminal inside the coverage disc.
std::pair<double, double> distance_range(const PassGeometry& geo, bool all_terminals = false);

/// Largest slant range anywhere in coverage, sqrt(H^2 + R^2).
double coverage_max_distance(const PassGeometry& geo);

/// Throws SlotTooLong if slot_len > T_s and InvalidArgument if slot_len <= 0.
PassTimeline build_timeline(const PassGeometry& geo, double slot_len);

}  // namespace leolink::geometry
