#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "leolink/channel.hpp"
#include "leolink/geometry.hpp"
#include "leolink/schemes.hpp"

namespace leolink::montecarlo {

using Rng = std::mt19937_64;

enum class Scheme { Rat, Pat };

struct SimConfig {
  std::int64_t n_samples = 10'000;
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::Rat;

  void validate() const;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

struct SimResult {
  Estimate rate;   // bit/s
  Estimate power;  // W
  Estimate ee;     // bit/J, ratio of means with a delta-method error
  Estimate dor;
  std::int64_t n_samples = 0;
  std::string rng;
};

/// Everything a scheme needs to run over one pass.
struct LinkScenario {
  geometry::PassGeometry geometry;
  geometry::PassTimeline timeline;
  channel::SrFading fading;
  channel::GainPartition partition;
  schemes::LinkBudget budget;
  std::variant<schemes::RatConfig, schemes::PatConfig> transmit;
};

/// Name of the generator and stream-splitting scheme used by every
/// simulation, recorded in SimResult::rng.
std::string rng_description();

/// Samples per independently seeded block. Blocks are the unit of
/// parallelism and are always reduced in index order.
inline constexpr std::int64_t kBlockSize = 8192;

/// Seed of block `index` derived from the master seed.
std::uint64_t block_seed(std::uint64_t master, std::uint64_t index);

/// Draws |h|^2 of shadowed-Rician fading: Nakagami-m LOS amplitude (power
/// ~ Gamma(m, omega/m)) with uniform phase plus a complex Gaussian scattered
/// part of variance b0 per dimension.
class SrGainSampler {
 public:
  explicit SrGainSampler(const channel::SrFading& fading);
  double operator()(Rng& rng);

 private:
  bool has_los_;
  std::gamma_distribution<double> los_power_;
  std::normal_distribution<double> scatter_;
  std::uniform_real_distribution<double> phase_;
};

double sample_sr_gain(const channel::SrFading& fading, Rng& rng);

/// FSMC state (1-based) of a power gain.
int classify_state(const channel::GainPartition& part, double gain);

/// Occupancy counts of each state over n_samples gain draws.
std::vector<std::int64_t> state_frequencies(const channel::SrFading& fading,
                                            const channel::GainPartition& part,
                                            std::int64_t n_samples, std::uint64_t seed);

/// Mean rate and transmit power over uniformly drawn instants of the
/// discretised pass, with the scheme applied to the exact gain. RAT uses the
/// true slant range at the drawn instant; PAT sets power for the slot's
/// largest range, as the scheme prescribes.
SimResult simulate_rate_power(const LinkScenario& scn, const SimConfig& cfg);

/// Empirical delay outage: packets arrive uniformly over the discretised
/// pass; in state 1 they wait Exp(lambda) and leave at the state-2 rate of
/// the slot reached after the wait (slot index wraps modulo N).
SimResult simulate_dor(const LinkScenario& scn, const schemes::TrafficSpec& traffic,
                       double lambda, const SimConfig& cfg);

}  // namespace leolink::montecarlo
