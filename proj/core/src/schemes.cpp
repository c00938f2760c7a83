#include "leolink/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "leolink/error.hpp"

namespace leolink::schemes {

using detail::require;

void LinkBudget::validate() const {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  require(std::isfinite(bandwidth) && bandwidth > 0.0, kCode, "link: bandwidth must be > 0");
  require(std::isfinite(noise_power) && noise_power > 0.0, kCode,
          "link: noise_power must be > 0");
  require(path_loss_exp >= 2.0, kCode, "link: path_loss_exp must be >= 2");
}

void RatConfig::validate() const {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  require(std::isfinite(tx_power) && tx_power > 0.0, kCode, "rat: tx_power must be > 0");
  require(std::isfinite(min_snr) && min_snr > 0.0, kCode, "rat: min_snr must be > 0");
}

void PatConfig::validate() const {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  require(std::isfinite(max_power) && max_power > 0.0, kCode, "pat: max_power must be > 0");
  require(std::isfinite(fixed_rate) && fixed_rate > 0.0, kCode, "pat: fixed_rate must be > 0");
}

void TrafficSpec::validate() const {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  require(std::isfinite(packet_bits) && packet_bits > 0.0, kCode,
          "traffic: packet_bits must be > 0");
  require(delay_threshold >= 0.0, kCode, "traffic: delay_threshold must be >= 0");
}

namespace {

void check_dims(const GainPartition& part, const PassTimeline& tl, const StateProbMatrix& probs) {
  if (probs.states() != part.states() || probs.slots() != tl.n_slots) {
    detail::fail(ErrorCode::DimensionMismatch,
                 "state probability matrix is " + std::to_string(probs.states()) + "x" +
                     std::to_string(probs.slots()) + " but the partition has " +
                     std::to_string(part.states()) + " states and the timeline " +
                     std::to_string(tl.n_slots) + " slots");
  }
}

void check_indices(const GainPartition& part, const PassTimeline& tl, int k, int n) {
  require(k >= 1 && k <= part.states(), ErrorCode::IndexOutOfRange, "state index out of range");
  require(n >= 1 && n <= tl.n_slots, ErrorCode::IndexOutOfRange, "slot index out of range");
}

double shannon_rate(double bandwidth, double snr) { return bandwidth * std::log2(1.0 + snr); }

// Unit step with U(0) = 1: delivering exactly at the threshold succeeds.
bool in_time(double threshold, double delivery) { return threshold - delivery >= 0.0; }

double delivery_time(double bits, double rate) {
  return rate > 0.0 ? bits / rate : std::numeric_limits<double>::infinity();
}

}  // namespace

// --- RAT -------------------------------------------------------------------

double rat_first_threshold(const LinkBudget& budget, const RatConfig& rat, double d_max) {
  require(d_max > 0.0, ErrorCode::InvalidArgument, "rat_first_threshold: d_max must be > 0");
  return std::sqrt(budget.noise_power * rat.min_snr * std::pow(d_max, budget.path_loss_exp) /
                   rat.tx_power);
}

Bounds rat_snr_bounds(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                      const PassTimeline& tl, int k, int n) {
  check_indices(part, tl, k, n);
  if (k == 1) return {};
  const double scale = rat.tx_power / budget.noise_power;
  const double floor_amp = part.lower(k);
  return {scale * floor_amp * floor_amp / std::pow(tl.dist_max(n), budget.path_loss_exp),
          scale * part.gain_ceiling(k) / std::pow(tl.dist_min(n), budget.path_loss_exp)};
}

Bounds rat_rate_bounds(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                       const PassTimeline& tl, int k, int n) {
  const Bounds snr = rat_snr_bounds(budget, rat, part, tl, k, n);
  return {shannon_rate(budget.bandwidth, snr.lo), shannon_rate(budget.bandwidth, snr.hi)};
}

namespace {

// sum_n sum_k pi_{k,n} R_{k,n} for both rate edges
Bounds rat_rate_mass(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                     const PassTimeline& tl, const StateProbMatrix& probs) {
  check_dims(part, tl, probs);
  Bounds sum;
  for (int n = 1; n <= tl.n_slots; ++n) {
    for (int k = 2; k <= part.states(); ++k) {
      const double pi = probs(k, n);
      if (pi == 0.0) continue;
      const Bounds r = rat_rate_bounds(budget, rat, part, tl, k, n);
      sum.lo += pi * r.lo;
      sum.hi += pi * r.hi;
    }
  }
  return sum;
}

double rat_power_mass(const RatConfig& rat, const StateProbMatrix& probs) {
  double sum = 0.0;
  for (int n = 1; n <= probs.slots(); ++n) {
    for (int k = 2; k <= probs.states(); ++k) sum += probs(k, n) * rat.tx_power;
  }
  return sum;
}

}  // namespace

Bounds rat_throughput_bounds(const LinkBudget& budget, const RatConfig& rat,
                             const GainPartition& part, const PassTimeline& tl,
                             const StateProbMatrix& probs) {
  const Bounds sum = rat_rate_mass(budget, rat, part, tl, probs);
  const double n = tl.n_slots;
  return {sum.lo / n, sum.hi / n};
}

double rat_avg_power(const RatConfig& rat, const StateProbMatrix& probs) {
  return rat_power_mass(rat, probs) / probs.slots();
}

Bounds rat_ee_bounds(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                     const PassTimeline& tl, const StateProbMatrix& probs) {
  const Bounds rates = rat_rate_mass(budget, rat, part, tl, probs);
  const double power = rat_power_mass(rat, probs);
  if (!(power > 0.0)) {
    detail::fail(ErrorCode::ZeroPower, "rat_ee_bounds: no state transmits, average power is 0");
  }
  return {rates.lo / power, rates.hi / power};
}

double rat_dor(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
               const PassTimeline& tl, const StateProbMatrix& probs, const TrafficSpec& traffic,
               double lambda) {
  check_dims(part, tl, probs);
  traffic.validate();
  require(lambda > 0.0, ErrorCode::InvalidArgument, "rat_dor: lambda must be > 0");
  const double bits = traffic.packet_bits;
  const double th = traffic.delay_threshold;

  double immediate = 0.0;  // served on arrival, states 2..K
  double waited = 0.0;     // state 1, served at the state-2 rate after the wait
  for (int n = 1; n <= tl.n_slots; ++n) {
    for (int k = 2; k <= part.states(); ++k) {
      const double dt = delivery_time(bits, rat_rate_bounds(budget, rat, part, tl, k, n).lo);
      if (in_time(th, dt)) immediate += probs(k, n);
    }
    const double dt2 = delivery_time(bits, rat_rate_bounds(budget, rat, part, tl, 2, n).lo);
    if (in_time(th, dt2)) waited += probs(1, n) * -std::expm1(-(th - dt2) / lambda);
  }
  const double dor = 1.0 - (immediate + waited) / tl.n_slots;
  return std::clamp(dor, 0.0, 1.0);
}

SchemeReport rat_report(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                        const PassTimeline& tl, const StateProbMatrix& probs,
                        const TrafficSpec& traffic, double lambda) {
  budget.validate();
  rat.validate();
  SchemeReport rep;
  const Bounds thr = rat_throughput_bounds(budget, rat, part, tl, probs);
  const Bounds ee = rat_ee_bounds(budget, rat, part, tl, probs);
  rep.throughput_lo = thr.lo;
  rep.throughput_hi = thr.hi;
  rep.avg_power_lo = rep.avg_power_hi = rat_avg_power(rat, probs);
  rep.ee_lo = ee.lo;
  rep.ee_hi = ee.hi;
  rep.dor = rat_dor(budget, rat, part, tl, probs, traffic, lambda);
  rep.lambda = lambda;
  return rep;
}

// --- PAT -------------------------------------------------------------------

namespace {

// 2^{R/B} - 1, the SNR needed for the fixed rate
double required_snr(const LinkBudget& budget, const PatConfig& pat) {
  return std::exp2(pat.fixed_rate / budget.bandwidth) - 1.0;
}

// Rounding slack so the state-2 power at d_max does not trip the cap.
constexpr double kCapSlack = 1e-9;

double capped(double power, double max_power) {
  if (power > max_power * (1.0 + kCapSlack)) return 0.0;
  return std::min(power, max_power);
}

}  // namespace

double pat_first_threshold(const LinkBudget& budget, const PatConfig& pat, double d_max) {
  require(d_max > 0.0, ErrorCode::InvalidArgument, "pat_first_threshold: d_max must be > 0");
  return std::sqrt(budget.noise_power * required_snr(budget, pat) *
                   std::pow(d_max, budget.path_loss_exp) / pat.max_power);
}

Bounds pat_power_bounds(const LinkBudget& budget, const PatConfig& pat, const GainPartition& part,
                        const PassTimeline& tl, int k, int n) {
  check_indices(part, tl, k, n);
  if (k == 1) return {};
  const double need =
      budget.noise_power * std::pow(tl.dist_max(n), budget.path_loss_exp) *
      required_snr(budget, pat);
  const double floor_amp = part.lower(k);
  const double upper = floor_amp > 0.0 ? need / (floor_amp * floor_amp)
                                       : std::numeric_limits<double>::infinity();
  const double lower = need / part.gain_ceiling(k);
  return {capped(lower, pat.max_power), capped(upper, pat.max_power)};
}

double pat_dor(const PatConfig& pat, const StateProbMatrix& probs, const TrafficSpec& traffic,
               double lambda) {
  traffic.validate();
  require(lambda > 0.0, ErrorCode::InvalidArgument, "pat_dor: lambda must be > 0");
  const double knee = traffic.packet_bits / pat.fixed_rate;
  const double th = traffic.delay_threshold;
  if (!in_time(th, knee)) return 1.0;
  double waiting_mass = 0.0;
  for (int n = 1; n <= probs.slots(); ++n) waiting_mass += probs(1, n);
  const double dor = waiting_mass / probs.slots() * std::exp(-(th - knee) / lambda);
  return std::clamp(dor, 0.0, 1.0);
}

SchemeReport pat_report(const LinkBudget& budget, const PatConfig& pat, const GainPartition& part,
                        const PassTimeline& tl, const StateProbMatrix& probs,
                        const TrafficSpec& traffic, double lambda, double d_max) {
  budget.validate();
  pat.validate();
  check_dims(part, tl, probs);
  const double u1 = pat_first_threshold(budget, pat, d_max);
  require(std::fabs(part.lower(2) - u1) <= 1e-9 * std::max(u1, 1e-300),
          ErrorCode::InvalidArgument,
          "pat_report: the partition's first threshold must equal the PAT threshold");

  double rate_mass = 0.0;
  Bounds power_mass;
  for (int n = 1; n <= tl.n_slots; ++n) {
    for (int k = 2; k <= part.states(); ++k) {
      const double pi = probs(k, n);
      rate_mass += pi * pat.fixed_rate;
      const Bounds p = pat_power_bounds(budget, pat, part, tl, k, n);
      power_mass.lo += pi * p.lo;
      power_mass.hi += pi * p.hi;
    }
  }
  if (!(power_mass.hi > 0.0)) {
    detail::fail(ErrorCode::ZeroPower, "pat_report: no state transmits, average power is 0");
  }

  SchemeReport rep;
  const double n = tl.n_slots;
  rep.throughput_lo = rep.throughput_hi = rate_mass / n;
  rep.avg_power_lo = power_mass.lo / n;
  rep.avg_power_hi = power_mass.hi / n;
  rep.ee_lo = rate_mass / power_mass.hi;
  rep.ee_hi = power_mass.lo > 0.0 ? rate_mass / power_mass.lo
                                  : std::numeric_limits<double>::infinity();
  rep.dor = pat_dor(pat, probs, traffic, lambda);
  rep.lambda = lambda;
  return rep;
}

}  // namespace leolink::schemes
