#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leolink/channel.hpp"
#include "leolink/geometry.hpp"
#include "leolink/montecarlo.hpp"
#include "leolink/schemes.hpp"

namespace leolink::cli {

struct GeometrySection {
  double earth_radius = 6371e3;
  double orbit_height = 500e3;
  double coverage_radius = 500e3;
  double half_track = 400e3;
  double terminal_offset = 0.0;
  double sat_speed = 0.0;  // 0 selects the circular-orbit speed for orbit_height
  double slot_length = 1.0;

  friend bool operator==(const GeometrySection&, const GeometrySection&) = default;
};

enum class ThresholdPolicy { EqualProbability, Explicit };

struct PartitionSection {
  int states = 8;
  ThresholdPolicy policy = ThresholdPolicy::EqualProbability;
  /// Explicit policy only: amplitudes mu_2..mu_{K-1}; mu_1 always comes
  /// from the scheme's first threshold.
  std::vector<double> thresholds;

  friend bool operator==(const PartitionSection&, const PartitionSection&) = default;
};

struct SimSection {
  std::int64_t samples = 10'000;
  std::uint64_t seed = 1;

  friend bool operator==(const SimSection&, const SimSection&) = default;
};

/// A complete analysis scenario as read from a scenario file. All values
/// are SI / linear.
struct Scenario {
  GeometrySection geometry;
  channel::SrFading fading;
  channel::DopplerSpec doppler;
  PartitionSection partition;
  schemes::LinkBudget link;
  std::variant<schemes::RatConfig, schemes::PatConfig> transmit;
  schemes::TrafficSpec traffic;
  SimSection sim;

  bool is_rat() const { return std::holds_alternative<schemes::RatConfig>(transmit); }
  montecarlo::SimConfig sim_config() const;
  /// Resolved pass geometry (circular-orbit speed filled in, path-loss
  /// exponent taken from the link section).
  geometry::PassGeometry pass_geometry() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses sectioned `key = value` text. Values may carry a unit suffix
/// (km, m, s, ms, Hz, kHz, MHz, GHz, W, mW, dBW, dBm, dB, bits, Kbits,
/// Mbits, bps, Kbps, Mbps, Gbps, deg, rad, m/s, km/s). Throws ParseError,
/// UnknownKey or ValidationError; messages name the key path and line.
Scenario parse_scenario(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& scn);

/// Sets one numeric key ("section.key") from a value string with optional
/// unit, exactly as the parser would. Throws UnknownKey / ParseError.
void set_value(Scenario& scn, std::string_view key, std::string_view value);

/// Checks every cross-field invariant. Throws ValidationError naming the
/// offending key.
void validate(const Scenario& scn);

/// Converts `text` ("-66 dBm", "500km", "1.55") for the dimension of `key`.
double parse_quantity(std::string_view key, std::string_view text);

}  // namespace leolink::cli
