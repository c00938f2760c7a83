// leolink: analytic and Monte-Carlo evaluation of LEO downlink scenarios.

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "leolink/error.hpp"
#include "leolink/geometry.hpp"
#include "leolink/pipeline.hpp"
#include "leolink/scenario.hpp"
#include "leolink/validation.hpp"

namespace {

using leolink::Error;
using leolink::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitChecksFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string scenario;
  std::string sweep;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  bool with_sim = false;
};

// Printed only once the command has succeeded, so a failure stays one line.
std::string pending_warning;

leolink::cli::Scenario load(const Options& opt) {
  auto scn = leolink::cli::load_scenario(opt.scenario);
  if (opt.seed) scn.sim.seed = *opt.seed;
  if (opt.samples) {
    if (*opt.samples < 1) {
      throw Error(ErrorCode::ValidationError, "--samples: must be >= 1");
    }
    scn.sim.samples = *opt.samples;
  }
  const auto tl = leolink::geometry::build_timeline(scn.pass_geometry(), scn.geometry.slot_length);
  if (tl.remainder() > 0.0) {
    std::ostringstream msg;
    msg << "warning: last " << tl.remainder() << " s of the " << tl.service_time
        << " s pass is shorter than a slot and is ignored\n";
    pending_warning = msg.str();
  }
  return scn;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty() || opt.out == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(opt.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoError, "cannot open '" + opt.out + "' for writing");
  file << text;
  file.close();
  if (!file) throw Error(ErrorCode::IoError, "failed writing '" + opt.out + "'");
}

int run_validate(const Options& opt) {
  const auto scn = load(opt);
  const auto report = leolink::validation::validate_scenario(scn);
  std::string text;
  for (const auto& c : report.checks) {
    text += (c.passed ? "PASS " : "FAIL ") + c.name + " measured=" + num(c.measured) + " limit=" + num(c.limit);
    if (!c.note.empty()) text += " (" + c.note + ")";
    text += '\n';
  }
  text += report.passed() ? "all checks passed\n" : "some checks failed\n";
  emit(opt, text);
  return report.passed() ? kExitOk : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Throughput, energy efficiency and delay outage of a LEO satellite-to-terminal link"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opt.scenario, "Scenario file")->required();
    sub->add_option("--out", opt.out, "Output path (default: standard output)");
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "Override sim.seed");
    sub->add_option("--samples", opt.samples, "Override sim.samples");
  };

  auto* analyze = app.add_subcommand("analyze", "Closed-form report as a one-row CSV");
  add_common(analyze);

  auto* sweep = app.add_subcommand("sweep", "Closed-form metrics over a parameter sweep");
  add_common(sweep);
  add_seed(sweep);
  sweep->add_option("--sweep", opt.sweep, "KEY=START:STOP:STEPS or KEY=V1,V2,...")->required();
  sweep->add_flag("--with-sim", opt.with_sim, "Add Monte-Carlo columns");

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimates as a one-row CSV");
  add_common(simulate);
  add_seed(simulate);

  auto* validate = app.add_subcommand("validate", "Cross-check every closed form against its oracle");
  add_common(validate);
  add_seed(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "ParseError: " << msg << '\n';
    return kExitInput;
  }

  try {
    if (analyze->parsed()) {
      emit(opt, leolink::cli::analyze_table(load(opt)).str());
    } else if (sweep->parsed()) {
      const auto scn = load(opt);
      const auto spec = leolink::cli::parse_sweep(opt.sweep);
      emit(opt, leolink::cli::run_sweep(scn, spec, opt.with_sim).str());
    } else if (simulate->parsed()) {
      emit(opt, leolink::cli::run_simulate(load(opt)).str());
    } else if (validate->parsed()) {
      const int status = run_validate(opt);
      std::cerr << pending_warning;
      return status;
    }
  } catch (const Error& e) {
    std::cerr << leolink::to_string(e.code()) << ": " << e.what() << '\n';
    return e.is_input_error() ? kExitInput : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << '\n';
    return kExitNumeric;
  }
  std::cerr << pending_warning;
  return kExitOk;
}
