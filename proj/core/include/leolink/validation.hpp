#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leolink/channel.hpp"
#include "leolink/geometry.hpp"
#include "leolink/montecarlo.hpp"
#include "leolink/scenario.hpp"
#include "leolink/schemes.hpp"

namespace leolink::validation {

/// CDF by adaptive quadrature of the PDF over [0, x].
double cdf_by_quadrature(const channel::SrFading& fading, double x);

/// Largest |closed form - quadrature| of the CDF over `grid`. Integer m only.
double max_cdf_discrepancy(const channel::SrFading& fading, const std::vector<double>& grid);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  std::int64_t n = 0;
  bool passed() const { return statistic <= critical; }
};

/// One-sample Kolmogorov-Smirnov test of the gain sampler against the
/// analytic CDF, asymptotic critical value sqrt(-ln(alpha/2) / 2) / sqrt(n).
KsResult ks_test(const channel::SrFading& fading, std::int64_t n, std::uint64_t seed,
                 double alpha = 0.01);

struct FrequencyResult {
  std::vector<double> expected;   // pi_k
  std::vector<double> observed;   // empirical frequency
  std::vector<double> z;          // (observed - expected) / binomial se
  std::int64_t n = 0;
  double max_abs_z() const;
};

FrequencyResult state_frequency_check(const channel::SrFading& fading,
                                      const channel::GainPartition& part, std::int64_t n,
                                      std::uint64_t seed);

/// max_n |sum_k pi_{k,n} - 1|
double max_column_sum_error(const channel::StateProbMatrix& probs);

/// True when value lies in [lo - nsigma*se, hi + nsigma*se] (with a 1e-12
/// relative allowance for rounding).
bool within_bracket(double value, double se, double lo, double hi, double nsigma = 3.0);

/// RAT outage averaged over arrival time by quadrature, with the slot after
/// the wait uniform over the pass and the wait integrated numerically.
double rat_dor_direct(const schemes::LinkBudget& budget, const schemes::RatConfig& rat,
                      const channel::GainPartition& part, const geometry::PassTimeline& tl,
                      const channel::StateProbMatrix& probs, const schemes::TrafficSpec& traffic,
                      double lambda);

/// RAT outage with the slot after the wait taken as ceil((t + T_W)/T_slot)
/// wrapped into 1..N, integrated exactly over the wait and numerically over
/// the arrival time. This is the quantity simulate_dor estimates.
double rat_dor_wrapped(const schemes::LinkBudget& budget, const schemes::RatConfig& rat,
                       const channel::GainPartition& part, const geometry::PassTimeline& tl,
                       const channel::StateProbMatrix& probs,
                       const schemes::TrafficSpec& traffic, double lambda);

/// PAT outage averaged over arrival time, wait integrated numerically.
double pat_dor_direct(const schemes::PatConfig& pat, const geometry::PassTimeline& tl,
                      const channel::StateProbMatrix& probs, const schemes::TrafficSpec& traffic,
                      double lambda);

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string note;
};

struct Report {
  std::vector<Check> checks;
  bool passed() const;
};

struct Options {
  std::int64_t samples = 0;  // 0 takes the scenario's sim.samples
  std::uint64_t seed = 0;    // 0 takes the scenario's sim.seed
};

/// Runs every analytic-versus-oracle cross check on one scenario.
Report validate_scenario(const cli::Scenario& scn, const Options& opts = {});

}  // namespace leolink::validation
