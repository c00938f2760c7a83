#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "leolink/channel.hpp"
#include "leolink/montecarlo.hpp"
#include "leolink/scenario.hpp"
#include "leolink/schemes.hpp"

namespace leolink::cli {

/// A scenario wired through geometry and channel, ready for the schemes.
struct Prepared {
  montecarlo::LinkScenario link;
  channel::StateProbMatrix probs;
  double d_max = 0.0;            // m
  double first_threshold = 0.0;  // amplitude mu_1
  double lambda = 0.0;           // s, mean fade duration below mu_1
};

Prepared prepare(const Scenario& scn);

schemes::SchemeReport run_analyze(const Scenario& scn);
schemes::SchemeReport report_of(const Scenario& scn, const Prepared& prep);

/// Rows of numbers under a fixed header; written with shortest round-trip
/// formatting and LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<double> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t column(std::string_view name) const;

  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

struct SweepSpec {
  std::string key;                 // dotted scenario key
  std::vector<std::string> texts;  // value text as handed to set_value
  std::vector<double> values;      // same values in SI / linear
};

/// "KEY=START:STOP:STEPS" (STEPS points, ends included, optional common
/// unit suffix on START and STOP) or "KEY=V1,V2,...". Throws ParseError /
/// UnknownKey.
SweepSpec parse_sweep(std::string_view text);

/// Name of the first CSV column for a swept key, e.g. h_m for
/// geometry.orbit_height.
std::string sweep_column_name(std::string_view key);

std::vector<std::string> sweep_header(std::string_view key, bool with_sim);

/// One row per sweep value in input order. Points are evaluated
/// concurrently; output does not depend on the thread count.
CsvTable run_sweep(const Scenario& scn, const SweepSpec& sweep, bool with_sim,
                   unsigned threads = 0);

/// Monte-Carlo estimates of rate, power, EE and DOR for the scenario.
CsvTable run_simulate(const Scenario& scn);

/// One-row table of the analytic report.
CsvTable analyze_table(const Scenario& scn);

}  // namespace leolink::cli
