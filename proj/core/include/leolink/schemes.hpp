#pragma once

#include "leolink/channel.hpp"
#include "leolink/geometry.hpp"

namespace leolink::schemes {

using channel::GainPartition;
using channel::StateProbMatrix;
using geometry::PassTimeline;

struct LinkBudget {
  double bandwidth = 60e6;       // Hz
  double noise_power = 0.0;      // W
  double path_loss_exp = 2.0;

  void validate() const;
  friend bool operator==(const LinkBudget&, const LinkBudget&) = default;
};

/// Rate-adaptive transmission: fixed transmit power, rate follows the state.
struct RatConfig {
  double tx_power = 1000.0;  // W
  double min_snr = 1.0;      // linear

  void validate() const;
  friend bool operator==(const RatConfig&, const RatConfig&) = default;
};

/// Power-adaptive transmission: fixed rate, power inverted against the
/// channel and limited to max_power.
struct PatConfig {
  double max_power = 1000.0;  // W
  double fixed_rate = 100e6;  // bit/s

  void validate() const;
  friend bool operator==(const PatConfig&, const PatConfig&) = default;
};

struct TrafficSpec {
  double packet_bits = 500e3;
  double delay_threshold = 1e-3;  // s

  void validate() const;
  friend bool operator==(const TrafficSpec&, const TrafficSpec&) = default;
};

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Throughput, power and EE of one scheme. For RAT the power is exact
/// (lo == hi); for PAT the throughput is exact.
struct SchemeReport {
  double throughput_lo = 0.0;  // bit/s
  double throughput_hi = 0.0;
  double avg_power_lo = 0.0;   // W
  double avg_power_hi = 0.0;
  double ee_lo = 0.0;          // bit/J
  double ee_hi = 0.0;
  double dor = 1.0;
  double lambda = 0.0;         // s, mean waiting time in state 1
};

// --- RAT -------------------------------------------------------------------

/// Amplitude at which the SNR at distance d_max equals min_snr.
double rat_first_threshold(const LinkBudget& budget, const RatConfig& rat, double d_max);

/// SNR bracket of state k in slot n (both 1-based). The lower edge uses the
/// slot's largest distance and mu_{k-1}; the upper edge the slot's smallest
/// distance and the state's gain ceiling. State 1 does not transmit.
Bounds rat_snr_bounds(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                      const PassTimeline& tl, int k, int n);

/// B log2(1 + snr) applied to rat_snr_bounds.
Bounds rat_rate_bounds(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                       const PassTimeline& tl, int k, int n);

Bounds rat_throughput_bounds(const LinkBudget& budget, const RatConfig& rat,
                             const GainPartition& part, const PassTimeline& tl,
                             const StateProbMatrix& probs);

double rat_avg_power(const RatConfig& rat, const StateProbMatrix& probs);

/// Throws ZeroPower when every slot has all mass in state 1.
Bounds rat_ee_bounds(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                     const PassTimeline& tl, const StateProbMatrix& probs);

/// Average delay outage rate over the pass for a packet of
/// `traffic.packet_bits`. A packet that meets state 1 waits an exponential
/// time with mean `lambda` and then leaves at the state-2 rate of the slot
/// it ends up in; any other state serves it at once at its lower-edge rate.
double rat_dor(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
               const PassTimeline& tl, const StateProbMatrix& probs, const TrafficSpec& traffic,
               double lambda);

SchemeReport rat_report(const LinkBudget& budget, const RatConfig& rat, const GainPartition& part,
                        const PassTimeline& tl, const StateProbMatrix& probs,
                        const TrafficSpec& traffic, double lambda);

// --- PAT -------------------------------------------------------------------

/// Amplitude below which sustaining fixed_rate at d_max needs more than
/// max_power.
double pat_first_threshold(const LinkBudget& budget, const PatConfig& pat, double d_max);

/// Transmit power bracket of state k in slot n, using the slot's largest
/// distance. Lower uses the state's gain ceiling, upper its floor. A
/// required power above max_power means no transmission (0 W).
Bounds pat_power_bounds(const LinkBudget& budget, const PatConfig& pat, const GainPartition& part,
                        const PassTimeline& tl, int k, int n);

/// Throws InvalidArgument if the partition's first threshold is not the
/// PAT threshold for d_max, ZeroPower if no state ever transmits.
SchemeReport pat_report(const LinkBudget& budget, const PatConfig& pat, const GainPartition& part,
                        const PassTimeline& tl, const StateProbMatrix& probs,
                        const TrafficSpec& traffic, double lambda, double d_max);

/// Piecewise delay outage rate of PAT; 1 below the knee D/R_fix.
double pat_dor(const PatConfig& pat, const StateProbMatrix& probs, const TrafficSpec& traffic,
               double lambda);

}  // namespace leolink::schemes
