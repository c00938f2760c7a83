#include "leolink/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "leolink/error.hpp"
#include "leolink/geometry.hpp"
#include "text_util.hpp"

namespace leolink::cli {
namespace {

channel::GainPartition build_partition(const Scenario& scn, double first) {
  if (scn.partition.policy == ThresholdPolicy::EqualProbability) {
    return channel::equal_probability_partition(scn.fading, first, scn.partition.states);
  }
  std::vector<double> thr{0.0, first};
  thr.insert(thr.end(), scn.partition.thresholds.begin(), scn.partition.thresholds.end());
  if (thr.size() > 2 && thr[2] <= first) {
    detail::fail(ErrorCode::ValidationError,
                 "partition.thresholds: first amplitude must exceed the scheme threshold mu_1 = " +
                     text::format_double(first));
  }
  return channel::make_partition(scn.fading, std::move(thr));
}

}  // namespace

Prepared prepare(const Scenario& scn) {
  validate(scn);
  const auto geo = scn.pass_geometry();
  auto tl = geometry::build_timeline(geo, scn.geometry.slot_length);
  const double d_max = geometry::coverage_max_distance(geo);

  const double first =
      scn.is_rat()
          ? schemes::rat_first_threshold(scn.link, std::get<schemes::RatConfig>(scn.transmit), d_max)
          : schemes::pat_first_threshold(scn.link, std::get<schemes::PatConfig>(scn.transmit), d_max);
  auto part = build_partition(scn, first);
  auto probs = channel::state_prob_matrix(scn.fading, part, tl.n_slots);
  const double lambda = channel::afd(scn.fading, scn.doppler, first);

  return Prepared{
      montecarlo::LinkScenario{geo, std::move(tl), scn.fading, std::move(part), scn.link,
                               scn.transmit},
      std::move(probs), d_max, first, lambda};
}

schemes::SchemeReport report_of(const Scenario& scn, const Prepared& prep) {
  const auto& l = prep.link;
  if (const auto* rat = std::get_if<schemes::RatConfig>(&scn.transmit)) {
    return schemes::rat_report(l.budget, *rat, l.partition, l.timeline, prep.probs, scn.traffic,
                               prep.lambda);
  }
  return schemes::pat_report(l.budget, std::get<schemes::PatConfig>(scn.transmit), l.partition,
                             l.timeline, prep.probs, scn.traffic, prep.lambda, prep.d_max);
}

schemes::SchemeReport run_analyze(const Scenario& scn) { return report_of(scn, prepare(scn)); }

// --- CSV -------------------------------------------------------------------

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<double> row) {
  detail::require(row.size() == header_.size(), ErrorCode::DimensionMismatch,
                  "csv: row width differs from header");
  rows_.push_back(std::move(row));
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) {
    detail::fail(ErrorCode::IndexOutOfRange, "csv: no column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - header_.begin());
}

void CsvTable::write(std::ostream& out) const {
  for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << text::format_double(row[i]);
    }
    out << '\n';
  }
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

// --- sweeps ----------------------------------------------------------------

std::string sweep_column_name(std::string_view key) {
  static constexpr std::pair<std::string_view, std::string_view> kNames[] = {
      {"geometry.earth_radius", "re_m"},
      {"geometry.orbit_height", "h_m"},
      {"geometry.coverage_radius", "r_m"},
      {"geometry.half_track", "d_delta_m"},
      {"geometry.terminal_offset", "d_p_m"},
      {"geometry.sat_speed", "v_mps"},
      {"geometry.slot_length", "t_slot_s"},
      {"fading.m", "m"},
      {"fading.b0", "b0"},
      {"fading.omega", "omega"},
      {"fading.f_scatter_max", "f_scatter_hz"},
      {"fading.mean_aoa", "aoa_rad"},
      {"fading.aoa_width", "kappa"},
      {"link.bandwidth", "bandwidth_hz"},
      {"link.noise_power", "noise_w"},
      {"link.path_loss_exp", "rho"},
      {"rat.tx_power", "pt_w"},
      {"rat.min_snr", "gamma_min"},
      {"pat.max_power", "pmax_w"},
      {"pat.fixed_rate", "rfix_bps"},
      {"traffic.packet_bits", "d_bits"},
      {"traffic.delay_threshold", "tth_s"},
  };
  for (const auto& [k, name] : kNames) {
    if (k == key) return std::string(name);
  }
  detail::fail(ErrorCode::UnknownKey, std::string(key) + ": not a sweepable numeric key");
}

std::vector<std::string> sweep_header(std::string_view key, bool with_sim) {
  std::vector<std::string> h{sweep_column_name(key), "throughput_lo_bps", "throughput_hi_bps",
                             "ee_lo_bpj", "ee_hi_bpj", "dor"};
  if (with_sim) {
    for (const char* c : {"sim_rate_bps", "sim_rate_se", "sim_dor", "sim_dor_se"}) h.emplace_back(c);
  }
  return h;
}

namespace {

/// Splits "30dBW" into ("30", "dBW").
std::pair<std::string, std::string> split_number(std::string_view text, std::string_view key) {
  const std::string norm = text::replace_unicode_minus(text::trim(text));
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(norm.data(), norm.data() + norm.size(), v);
  if (ec != std::errc{} || ptr == norm.data()) {
    detail::fail(ErrorCode::ParseError,
                 "--sweep " + std::string(key) + ": expected a number, got '" + norm + "'");
  }
  const auto pos = static_cast<std::size_t>(ptr - norm.data());
  return {norm.substr(0, pos), std::string(text::trim(std::string_view(norm).substr(pos)))};
}

}  // namespace

SweepSpec parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    detail::fail(ErrorCode::ParseError, "--sweep: expected KEY=START:STOP:STEPS or KEY=V1,V2,...");
  }
  SweepSpec spec;
  spec.key = std::string(text::trim(text.substr(0, eq)));
  sweep_column_name(spec.key);  // rejects non-numeric keys
  const std::string_view rhs = text::trim(text.substr(eq + 1));
  if (rhs.empty()) detail::fail(ErrorCode::ParseError, "--sweep " + spec.key + ": no values");

  const auto parts = text::split(rhs, ':');
  if (parts.size() == 3) {
    const auto [start_num, start_unit] = split_number(parts[0], spec.key);
    const auto [stop_num, stop_unit] = split_number(parts[1], spec.key);
    const std::string unit = stop_unit.empty() ? start_unit : stop_unit;
    if (!start_unit.empty() && !stop_unit.empty() && start_unit != stop_unit) {
      detail::fail(ErrorCode::ParseError,
                   "--sweep " + spec.key + ": START and STOP must use the same unit");
    }
    const std::string_view steps_text = text::trim(parts[2]);
    int steps = 0;
    const auto [ptr, ec] =
        std::from_chars(steps_text.data(), steps_text.data() + steps_text.size(), steps);
    if (ec != std::errc{} || ptr != steps_text.data() + steps_text.size() || steps < 1) {
      detail::fail(ErrorCode::ParseError, "--sweep " + spec.key + ": STEPS must be an integer >= 1");
    }
    const double a = std::stod(start_num);
    const double b = std::stod(stop_num);
    for (int i = 0; i < steps; ++i) {
      const double x = steps == 1 ? a : (i == steps - 1 ? b : a + (b - a) * i / (steps - 1));
      spec.texts.push_back(text::format_double(x) + unit);
    }
  } else if (parts.size() == 1) {
    for (const auto& item : text::split(rhs, ',')) {
      const auto t = text::trim(item);
      if (t.empty()) detail::fail(ErrorCode::ParseError, "--sweep " + spec.key + ": empty value");
      spec.texts.emplace_back(t);
    }
  } else {
    detail::fail(ErrorCode::ParseError, "--sweep " + spec.key + ": expected START:STOP:STEPS");
  }
  for (const auto& t : spec.texts) spec.values.push_back(parse_quantity(spec.key, t));
  return spec;
}

namespace {

std::vector<double> sweep_point(const Scenario& base, const SweepSpec& sweep, std::size_t i,
                                bool with_sim) {
  Scenario scn = base;
  set_value(scn, sweep.key, sweep.texts[i]);
  const auto prep = prepare(scn);
  const auto rep = report_of(scn, prep);
  std::vector<double> row{sweep.values[i], rep.throughput_lo, rep.throughput_hi,
                          rep.ee_lo,       rep.ee_hi,         rep.dor};
  if (with_sim) {
    const auto cfg = scn.sim_config();
    const auto rp = montecarlo::simulate_rate_power(prep.link, cfg);
    const auto dr = montecarlo::simulate_dor(prep.link, scn.traffic, prep.lambda, cfg);
    row.insert(row.end(), {rp.rate.mean, rp.rate.se, dr.dor.mean, dr.dor.se});
  }
  return row;
}

}  // namespace

CsvTable run_sweep(const Scenario& scn, const SweepSpec& sweep, bool with_sim, unsigned threads) {
  detail::require(!sweep.texts.empty() && sweep.texts.size() == sweep.values.size(),
                  ErrorCode::InvalidArgument, "sweep: empty value list");
  const std::size_t n = sweep.texts.size();
  std::vector<std::vector<double>> rows(n);
  std::vector<std::exception_ptr> errors(n);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = sweep_point(scn, sweep, i, with_sim);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CsvTable table(sweep_header(sweep.key, with_sim));
  for (auto& r : rows) table.add_row(std::move(r));
  return table;
}

CsvTable run_simulate(const Scenario& scn) {
  const auto prep = prepare(scn);
  const auto cfg = scn.sim_config();
  const auto rp = montecarlo::simulate_rate_power(prep.link, cfg);
  const auto dr = montecarlo::simulate_dor(prep.link, scn.traffic, prep.lambda, cfg);
  CsvTable table({"samples", "sim_rate_bps", "sim_rate_se", "sim_power_w", "sim_power_se",
                  "sim_ee_bpj", "sim_ee_se", "sim_dor", "sim_dor_se"});
  table.add_row({static_cast<double>(cfg.n_samples), rp.rate.mean, rp.rate.se, rp.power.mean,
                 rp.power.se, rp.ee.mean, rp.ee.se, dr.dor.mean, dr.dor.se});
  return table;
}

CsvTable analyze_table(const Scenario& scn) {
  const auto prep = prepare(scn);
  const auto rep = report_of(scn, prep);
  CsvTable table({"n_slots", "mu1", "lambda_s", "throughput_lo_bps", "throughput_hi_bps",
                  "power_lo_w", "power_hi_w", "ee_lo_bpj", "ee_hi_bpj", "dor"});
  table.add_row({static_cast<double>(prep.link.timeline.n_slots), prep.first_threshold,
                 rep.lambda, rep.throughput_lo, rep.throughput_hi, rep.avg_power_lo,
                 rep.avg_power_hi, rep.ee_lo, rep.ee_hi, rep.dor});
  return table;
}

}  // namespace leolink::cli
