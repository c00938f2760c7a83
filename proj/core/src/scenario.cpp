#include "leolink/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "leolink/error.hpp"
#include "text_util.hpp"

namespace leolink::cli {
namespace {

using schemes::PatConfig;
using schemes::RatConfig;

enum class Dim { Plain, Ratio, Power, Length, Time, Frequency, Bits, BitRate, Angle, Speed };

struct Unit {
  std::string_view name;
  double scale;
  enum class Kind { Linear, Decibel } kind = Kind::Linear;
  double db_offset = 0.0;  // subtracted before converting, e.g. 30 for dBm
};

constexpr Unit kDb{"dB", 1.0, Unit::Kind::Decibel, 0.0};

std::vector<Unit> units_for(Dim dim) {
  switch (dim) {
    case Dim::Plain: return {{"", 1.0}};
    case Dim::Ratio: return {{"", 1.0}, kDb};
    case Dim::Power:
      return {{"", 1.0}, {"W", 1.0}, {"mW", 1e-3}, {"kW", 1e3},
              {"dBW", 1.0, Unit::Kind::Decibel, 0.0}, {"dBm", 1.0, Unit::Kind::Decibel, 30.0}};
    case Dim::Length: return {{"", 1.0}, {"m", 1.0}, {"km", 1e3}};
    case Dim::Time: return {{"", 1.0}, {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}};
    case Dim::Frequency:
      return {{"", 1.0}, {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    case Dim::Bits:
      return {{"", 1.0}, {"bit", 1.0}, {"bits", 1.0}, {"Kbit", 1e3}, {"Kbits", 1e3},
              {"kbits", 1e3}, {"Mbit", 1e6}, {"Mbits", 1e6}};
    case Dim::BitRate:
      return {{"", 1.0},      {"bps", 1.0},      {"bit/s", 1.0}, {"Kbps", 1e3},
              {"kbps", 1e3},  {"Kbit/s", 1e3},   {"Mbps", 1e6},  {"Mbit/s", 1e6},
              {"Gbps", 1e9},  {"Gbit/s", 1e9}};
    case Dim::Angle: return {{"", 1.0}, {"rad", 1.0}, {"deg", std::numbers::pi / 180.0}};
    case Dim::Speed: return {{"", 1.0}, {"m/s", 1.0}, {"km/s", 1e3}};
  }
  return {};
}

struct NumericKey {
  std::string_view key;
  Dim dim;
  std::function<void(Scenario&, double)> set;
  std::function<double(const Scenario&)> get;
};

RatConfig& rat_of(Scenario& s, std::string_view key) {
  auto* r = std::get_if<RatConfig>(&s.transmit);
  if (!r) detail::fail(ErrorCode::UnknownKey, std::string(key) + ": scenario has no [rat] section");
  return *r;
}

PatConfig& pat_of(Scenario& s, std::string_view key) {
  auto* p = std::get_if<PatConfig>(&s.transmit);
  if (!p) detail::fail(ErrorCode::UnknownKey, std::string(key) + ": scenario has no [pat] section");
  return *p;
}

#define LEOLINK_FIELD(KEY, DIM, EXPR)                                          \
  NumericKey {                                                                 \
    KEY, DIM, [](Scenario& s, double v) { s.EXPR = v; },                       \
        [](const Scenario& s) { return static_cast<double>(s.EXPR); }          \
  }

const std::vector<NumericKey>& numeric_keys() {
  static const std::vector<NumericKey> keys = {
      LEOLINK_FIELD("geometry.earth_radius", Dim::Length, geometry.earth_radius),
      LEOLINK_FIELD("geometry.orbit_height", Dim::Length, geometry.orbit_height),
      LEOLINK_FIELD("geometry.coverage_radius", Dim::Length, geometry.coverage_radius),
      LEOLINK_FIELD("geometry.half_track", Dim::Length, geometry.half_track),
      LEOLINK_FIELD("geometry.terminal_offset", Dim::Length, geometry.terminal_offset),
      LEOLINK_FIELD("geometry.sat_speed", Dim::Speed, geometry.sat_speed),
      LEOLINK_FIELD("geometry.slot_length", Dim::Time, geometry.slot_length),
      LEOLINK_FIELD("fading.m", Dim::Plain, fading.m),
      LEOLINK_FIELD("fading.b0", Dim::Plain, fading.b0),
      LEOLINK_FIELD("fading.omega", Dim::Plain, fading.omega),
      LEOLINK_FIELD("fading.f_scatter_max", Dim::Frequency, doppler.f_scatter_max),
      LEOLINK_FIELD("fading.mean_aoa", Dim::Angle, doppler.mean_aoa),
      LEOLINK_FIELD("fading.aoa_width", Dim::Plain, doppler.aoa_width),
      LEOLINK_FIELD("link.bandwidth", Dim::Frequency, link.bandwidth),
      LEOLINK_FIELD("link.noise_power", Dim::Power, link.noise_power),
      LEOLINK_FIELD("link.path_loss_exp", Dim::Plain, link.path_loss_exp),
      NumericKey{"rat.tx_power", Dim::Power,
                 [](Scenario& s, double v) { rat_of(s, "rat.tx_power").tx_power = v; },
                 [](const Scenario& s) { return std::get<RatConfig>(s.transmit).tx_power; }},
      NumericKey{"rat.min_snr", Dim::Ratio,
                 [](Scenario& s, double v) { rat_of(s, "rat.min_snr").min_snr = v; },
                 [](const Scenario& s) { return std::get<RatConfig>(s.transmit).min_snr; }},
      NumericKey{"pat.max_power", Dim::Power,
                 [](Scenario& s, double v) { pat_of(s, "pat.max_power").max_power = v; },
                 [](const Scenario& s) { return std::get<PatConfig>(s.transmit).max_power; }},
      NumericKey{"pat.fixed_rate", Dim::BitRate,
                 [](Scenario& s, double v) { pat_of(s, "pat.fixed_rate").fixed_rate = v; },
                 [](const Scenario& s) { return std::get<PatConfig>(s.transmit).fixed_rate; }},
      LEOLINK_FIELD("traffic.packet_bits", Dim::Bits, traffic.packet_bits),
      LEOLINK_FIELD("traffic.delay_threshold", Dim::Time, traffic.delay_threshold),
  };
  return keys;
}

#undef LEOLINK_FIELD

const NumericKey* find_numeric(std::string_view key) {
  for (const auto& k : numeric_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

// Keys that are not plain quantities.
constexpr std::array<std::string_view, 7> kSpecialKeys = {
    "fading.xi_exponent", "partition.states", "partition.policy", "partition.thresholds",
    "geometry.sats_per_plane", "sim.samples", "sim.seed"};

bool is_special(std::string_view key) {
  return std::find(kSpecialKeys.begin(), kSpecialKeys.end(), key) != kSpecialKeys.end();
}

std::string where(std::string_view key, int line) {
  std::string out(key);
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  return out;
}

[[noreturn]] void parse_fail(std::string_view key, int line, const std::string& what) {
  detail::fail(ErrorCode::ParseError, where(key, line) + ": " + what);
}

double convert(Dim dim, std::string_view key, std::string_view text, int line) {
  const std::string norm = text::replace_unicode_minus(text::trim(text));
  const char* first = norm.data();
  const char* last = norm.data() + norm.size();
  double number = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, number);
  if (ec != std::errc{} || ptr == first) parse_fail(key, line, "expected a number, got '" + norm + "'");
  const std::string_view unit = text::trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  for (const auto& u : units_for(dim)) {
    if (u.name != unit) continue;
    if (u.kind == Unit::Kind::Decibel) return std::pow(10.0, (number - u.db_offset) / 10.0);
    return number * u.scale;
  }
  parse_fail(key, line, "unit '" + std::string(unit) + "' is not valid here");
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view text, int line) {
  const std::string_view t = text::trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    parse_fail(key, line, "expected an integer, got '" + std::string(t) + "'");
  }
  return value;
}

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

using LineMap = std::map<std::string, int, std::less<>>;

void apply_entry(Scenario& scn, const Entry& e) {
  const std::string_view key = e.key;
  if (key == "geometry.sat_speed" && text::trim(e.value) == "auto") {
    scn.geometry.sat_speed = 0.0;
    return;
  }
  if (const auto* nk = find_numeric(key)) {
    nk->set(scn, convert(nk->dim, key, e.value, e.line));
    return;
  }
  const std::string_view v = text::trim(e.value);
  if (key == "fading.xi_exponent") {
    if (v == "square") {
      scn.doppler.xi_exponent = channel::XiExponent::Square;
    } else if (v == "per_term") {
      scn.doppler.xi_exponent = channel::XiExponent::PerTerm;
    } else {
      parse_fail(key, e.line, "expected 'square' or 'per_term'");
    }
  } else if (key == "partition.states") {
    scn.partition.states = parse_integer<int>(key, v, e.line);
  } else if (key == "partition.policy") {
    if (v == "equal_probability") {
      scn.partition.policy = ThresholdPolicy::EqualProbability;
    } else if (v == "explicit") {
      scn.partition.policy = ThresholdPolicy::Explicit;
    } else {
      parse_fail(key, e.line, "expected 'equal_probability' or 'explicit'");
    }
  } else if (key == "partition.thresholds") {
    scn.partition.thresholds.clear();
    for (const auto& item : text::split(v, ',')) {
      if (text::trim(item).empty()) continue;
      scn.partition.thresholds.push_back(convert(Dim::Plain, key, item, e.line));
    }
  } else if (key == "geometry.sats_per_plane") {
    const int sats = parse_integer<int>(key, v, e.line);
    if (sats <= 0) {
      detail::fail(ErrorCode::ValidationError, where(key, e.line) + ": must be > 0");
    }
    scn.geometry.half_track = geometry::half_track_from_plane(scn.geometry.earth_radius, sats);
  } else if (key == "sim.samples") {
    scn.sim.samples = parse_integer<std::int64_t>(key, v, e.line);
  } else if (key == "sim.seed") {
    scn.sim.seed = parse_integer<std::uint64_t>(key, v, e.line);
  } else {
    detail::fail(ErrorCode::UnknownKey, where(key, e.line) + ": unknown key");
  }
}

void validate_with_lines(const Scenario& scn, const LineMap* lines) {
  auto check = [&](bool ok, std::string_view key, std::string_view msg) {
    if (ok) return;
    int line = 0;
    if (lines) {
      if (auto it = lines->find(key); it != lines->end()) line = it->second;
    }
    detail::fail(ErrorCode::ValidationError, where(key, line) + ": " + std::string(msg));
  };
  auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };

  const auto& g = scn.geometry;
  check(finite_pos(g.earth_radius), "geometry.earth_radius", "must be > 0");
  check(finite_pos(g.orbit_height), "geometry.orbit_height", "must be > 0");
  check(finite_pos(g.coverage_radius), "geometry.coverage_radius", "must be > 0");
  check(finite_pos(g.half_track), "geometry.half_track", "must be > 0");
  check(std::isfinite(g.terminal_offset) && g.terminal_offset >= 0.0, "geometry.terminal_offset",
        "must be >= 0");
  check(std::isfinite(g.sat_speed) && g.sat_speed >= 0.0, "geometry.sat_speed",
        "must be > 0 (or 'auto')");
  check(finite_pos(g.slot_length), "geometry.slot_length", "must be > 0");
  check(std::hypot(g.half_track, g.terminal_offset) <= g.coverage_radius * (1.0 + 1e-12),
        "geometry.half_track",
        "terminal leaves the coverage disc: half_track^2 + terminal_offset^2 must not exceed "
        "coverage_radius^2");

  const auto& f = scn.fading;
  check(std::isfinite(f.m) && f.m >= 0.5, "fading.m", "must be >= 0.5");
  check(finite_pos(f.b0), "fading.b0", "must be > 0");
  check(std::isfinite(f.omega) && f.omega >= 0.0, "fading.omega", "must be >= 0");
  const auto& d = scn.doppler;
  check(finite_pos(d.f_scatter_max), "fading.f_scatter_max", "must be > 0");
  check(d.mean_aoa >= -std::numbers::pi && d.mean_aoa < std::numbers::pi, "fading.mean_aoa",
        "must lie in [-pi, pi)");
  check(std::isfinite(d.aoa_width) && d.aoa_width >= 0.0, "fading.aoa_width", "must be >= 0");
  {
    bool moments_ok = true;
    try {
      channel::spectral_moments(f, d);
    } catch (const Error&) {
      moments_ok = false;
    }
    check(moments_ok, "fading.mean_aoa", "spectral moments violate b0*b2 - b1^2 > 0");
  }

  const auto& p = scn.partition;
  check(p.states >= 2, "partition.states", "must be >= 2");
  if (p.policy == ThresholdPolicy::Explicit) {
    check(static_cast<int>(p.thresholds.size()) == p.states - 2, "partition.thresholds",
          "explicit policy needs states - 2 amplitudes (mu_2 .. mu_{K-1})");
    for (std::size_t i = 0; i < p.thresholds.size(); ++i) {
      check(finite_pos(p.thresholds[i]), "partition.thresholds", "amplitudes must be > 0");
      if (i > 0) {
        check(p.thresholds[i] > p.thresholds[i - 1], "partition.thresholds",
              "amplitudes must be strictly increasing");
      }
    }
  } else {
    check(p.thresholds.empty(), "partition.thresholds",
          "only allowed with policy = explicit");
  }

  const auto& l = scn.link;
  check(finite_pos(l.bandwidth), "link.bandwidth", "must be > 0");
  check(finite_pos(l.noise_power), "link.noise_power", "must be > 0");
  check(std::isfinite(l.path_loss_exp) && l.path_loss_exp >= 2.0, "link.path_loss_exp",
        "must be >= 2");

  if (const auto* r = std::get_if<RatConfig>(&scn.transmit)) {
    check(finite_pos(r->tx_power), "rat.tx_power", "must be > 0");
    check(finite_pos(r->min_snr), "rat.min_snr", "must be > 0");
  } else {
    const auto& pt = std::get<PatConfig>(scn.transmit);
    check(finite_pos(pt.max_power), "pat.max_power", "must be > 0");
    check(finite_pos(pt.fixed_rate), "pat.fixed_rate", "must be > 0");
  }

  check(finite_pos(scn.traffic.packet_bits), "traffic.packet_bits", "must be > 0");
  check(std::isfinite(scn.traffic.delay_threshold) && scn.traffic.delay_threshold >= 0.0,
        "traffic.delay_threshold", "must be >= 0");
  check(scn.sim.samples >= 1, "sim.samples", "must be >= 1");

  const double ts = geometry::service_duration(scn.pass_geometry());
  check(g.slot_length <= ts, "geometry.slot_length",
        "exceeds the service time of the pass (" + std::to_string(ts) + " s)");
}

std::string format_number(double v) { return text::format_double(v); }

}  // namespace

montecarlo::SimConfig Scenario::sim_config() const {
  montecarlo::SimConfig cfg;
  cfg.n_samples = sim.samples;
  cfg.seed = sim.seed;
  cfg.scheme = is_rat() ? montecarlo::Scheme::Rat : montecarlo::Scheme::Pat;
  return cfg;
}

geometry::PassGeometry Scenario::pass_geometry() const {
  geometry::PassGeometry geo;
  geo.earth_radius = geometry.earth_radius;
  geo.orbit_height = geometry.orbit_height;
  geo.coverage_radius = geometry.coverage_radius;
  geo.half_track = geometry.half_track;
  geo.terminal_offset = geometry.terminal_offset;
  geo.sat_speed = geometry.sat_speed > 0.0
                      ? geometry.sat_speed
                      : geometry::circular_orbit_speed(geometry.earth_radius, geometry.orbit_height);
  geo.path_loss_exp = link.path_loss_exp;
  return geo;
}

double parse_quantity(std::string_view key, std::string_view text) {
  const auto* nk = find_numeric(key);
  if (!nk) detail::fail(ErrorCode::UnknownKey, std::string(key) + ": not a numeric key");
  return convert(nk->dim, key, text, 0);
}

void set_value(Scenario& scn, std::string_view key, std::string_view value) {
  if (!find_numeric(key)) {
    detail::fail(ErrorCode::UnknownKey, std::string(key) + ": not a sweepable numeric key");
  }
  apply_entry(scn, Entry{std::string(key), std::string(value), 0});
}

void validate(const Scenario& scn) { validate_with_lines(scn, nullptr); }

Scenario parse_scenario(std::string_view input) {
  std::vector<Entry> entries;
  LineMap lines;
  std::string section;
  int line_no = 0;
  bool has_rat = false;
  bool has_pat = false;

  for (const auto& raw : text::split(input, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail("[section]", line_no, "unterminated section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      if (section == "rat") has_rat = true;
      if (section == "pat") has_pat = true;
      static constexpr std::array<std::string_view, 8> kSections = {
          "geometry", "fading", "partition", "link", "rat", "pat", "traffic", "sim"};
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        detail::fail(ErrorCode::UnknownKey,
                     where("[" + section + "]", line_no) + ": unknown section");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(section.empty() ? "?" : section, line_no, "expected 'key = value'");
    if (section.empty()) parse_fail(text::trim(line.substr(0, eq)), line_no, "key outside of any section");
    const std::string key = section + "." + std::string(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (value.empty()) parse_fail(key, line_no, "missing value");
    if (!find_numeric(key) && !is_special(key)) {
      detail::fail(ErrorCode::UnknownKey, where(key, line_no) + ": unknown key");
    }
    if (lines.contains(key)) parse_fail(key, line_no, "duplicate key");
    lines.emplace(key, line_no);
    entries.push_back({key, value, line_no});
  }

  if (has_rat == has_pat) {
    detail::fail(ErrorCode::ValidationError,
                 "scenario: exactly one of the [rat] and [pat] sections is required");
  }

  Scenario scn;
  if (has_pat) scn.transmit = PatConfig{};
  // earth_radius first so sats_per_plane sees the final radius
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return (a.key == "geometry.earth_radius") > (b.key == "geometry.earth_radius");
  });
  if (lines.contains("geometry.half_track") && lines.contains("geometry.sats_per_plane")) {
    detail::fail(ErrorCode::ValidationError,
                 where("geometry.sats_per_plane", lines["geometry.sats_per_plane"]) +
                     ": give either half_track or sats_per_plane, not both");
  }
  for (const auto& e : entries) apply_entry(scn, e);
  validate_with_lines(scn, &lines);
  return scn;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::fail(ErrorCode::IoError, "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string render_scenario(const Scenario& scn) {
  std::ostringstream out;
  auto put = [&](std::string_view key) {
    const auto* nk = find_numeric(key);
    out << key.substr(key.find('.') + 1) << " = " << format_number(nk->get(scn)) << '\n';
  };

  out << "[geometry]\n";
  for (auto k : {"geometry.earth_radius", "geometry.orbit_height", "geometry.coverage_radius",
                 "geometry.half_track", "geometry.terminal_offset"}) {
    put(k);
  }
  if (scn.geometry.sat_speed > 0.0) {
    put("geometry.sat_speed");
  } else {
    out << "sat_speed = auto\n";
  }
  put("geometry.slot_length");

  out << "\n[fading]\n";
  for (auto k : {"fading.m", "fading.b0", "fading.omega", "fading.f_scatter_max",
                 "fading.mean_aoa", "fading.aoa_width"}) {
    put(k);
  }
  out << "xi_exponent = "
      << (scn.doppler.xi_exponent == channel::XiExponent::Square ? "square" : "per_term") << '\n';

  out << "\n[partition]\nstates = " << scn.partition.states << "\npolicy = "
      << (scn.partition.policy == ThresholdPolicy::Explicit ? "explicit" : "equal_probability")
      << '\n';
  if (!scn.partition.thresholds.empty()) {
    out << "thresholds = ";
    for (std::size_t i = 0; i < scn.partition.thresholds.size(); ++i) {
      out << (i ? ", " : "") << format_number(scn.partition.thresholds[i]);
    }
    out << '\n';
  }

  out << "\n[link]\n";
  for (auto k : {"link.bandwidth", "link.noise_power", "link.path_loss_exp"}) put(k);

  if (scn.is_rat()) {
    out << "\n[rat]\n";
    put("rat.tx_power");
    put("rat.min_snr");
  } else {
    out << "\n[pat]\n";
    put("pat.max_power");
    put("pat.fixed_rate");
  }

  out << "\n[traffic]\n";
  put("traffic.packet_bits");
  put("traffic.delay_threshold");

  out << "\n[sim]\nsamples = " << scn.sim.samples << "\nseed = " << scn.sim.seed << '\n';
  return out.str();
}

}  // namespace leolink::cli
