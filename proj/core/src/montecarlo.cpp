#include "leolink/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "leolink/error.hpp"

namespace leolink::montecarlo {

using detail::require;

void SimConfig::validate() const {
  require(n_samples >= 1, ErrorCode::InvalidArgument, "sim: n_samples must be >= 1");
}

std::string rng_description() {
  return "mt19937_64/splitmix64-blocks-" + std::to_string(kBlockSize);
}

std::uint64_t block_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finaliser over a Weyl sequence
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SrGainSampler::SrGainSampler(const channel::SrFading& fading)
    : has_los_(fading.omega > 0.0),
      los_power_(fading.m, has_los_ ? fading.omega / fading.m : 1.0),
      scatter_(0.0, std::sqrt(fading.b0)),
      phase_(0.0, 2.0 * std::numbers::pi) {
  fading.validate();
}

double SrGainSampler::operator()(Rng& rng) {
  double re = scatter_(rng);
  double im = scatter_(rng);
  if (has_los_) {
    const double amp = std::sqrt(los_power_(rng));
    const double ph = phase_(rng);
    re += amp * std::cos(ph);
    im += amp * std::sin(ph);
  }
  return re * re + im * im;
}

double sample_sr_gain(const channel::SrFading& fading, Rng& rng) {
  SrGainSampler sampler(fading);
  return sampler(rng);
}

int classify_state(const channel::GainPartition& part, double gain) {
  const auto& mu = part.thresholds();
  int state = 1;
  for (std::size_t j = 1; j < mu.size(); ++j) {
    if (gain >= mu[j] * mu[j]) state = static_cast<int>(j) + 1;
  }
  return state;
}

namespace {

struct Moments {
  std::int64_t count = 0;
  long double rate = 0, rate2 = 0;
  long double power = 0, power2 = 0;
  long double cross = 0;
  std::int64_t outages = 0;

  void add(double r, double p) {
    ++count;
    rate += r;
    rate2 += static_cast<long double>(r) * r;
    power += p;
    power2 += static_cast<long double>(p) * p;
    cross += static_cast<long double>(r) * p;
  }

  void merge(const Moments& o) {
    count += o.count;
    rate += o.rate;
    rate2 += o.rate2;
    power += o.power;
    power2 += o.power2;
    cross += o.cross;
    outages += o.outages;
  }
};

// Runs `body(block, first, count)` over fixed-size blocks on all hardware
// threads and returns the per-block results in block order.
template <class Acc, class Body>
std::vector<Acc> run_blocks(std::int64_t n_samples, Body&& body) {
  const std::int64_t n_blocks = (n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<Acc> out(static_cast<std::size_t>(n_blocks));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next++; b < n_blocks; b = next++) {
      const std::int64_t count = std::min(kBlockSize, n_samples - b * kBlockSize);
      out[static_cast<std::size_t>(b)] = body(static_cast<std::uint64_t>(b), count);
    }
  };
  const auto hw = std::max(1u, std::thread::hardware_concurrency());
  const auto n_threads = static_cast<unsigned>(std::min<std::int64_t>(hw, n_blocks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  return out;
}

Estimate mean_and_se(long double sum, long double sum2, std::int64_t n) {
  const long double mean = sum / n;
  if (n < 2) return {static_cast<double>(mean), 0.0};
  const long double var = std::max(0.0L, (sum2 - n * mean * mean) / (n - 1));
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

SimResult summarize(const Moments& m) {
  SimResult res;
  res.n_samples = m.count;
  res.rng = rng_description();
  res.rate = mean_and_se(m.rate, m.rate2, m.count);
  res.power = mean_and_se(m.power, m.power2, m.count);
  const double p = static_cast<double>(m.outages) / m.count;
  res.dor = {p, std::sqrt(p * (1.0 - p) / m.count)};

  const long double n = m.count;
  const long double r = m.rate / n;
  const long double w = m.power / n;
  if (w > 0.0L) {
    res.ee.mean = static_cast<double>(r / w);
    if (m.count >= 2) {
      const long double var_r = (m.rate2 - n * r * r) / (n - 1);
      const long double var_w = (m.power2 - n * w * w) / (n - 1);
      const long double cov = (m.cross - n * r * w) / (n - 1);
      const long double var =
          (var_r / (w * w) + r * r * var_w / (w * w * w * w) - 2.0L * r * cov / (w * w * w)) / n;
      res.ee.se = static_cast<double>(std::sqrt(std::max(var, 0.0L)));
    }
  }
  return res;
}

void check_scheme(const LinkScenario& scn, const SimConfig& cfg) {
  cfg.validate();
  const bool is_rat = std::holds_alternative<schemes::RatConfig>(scn.transmit);
  require(is_rat == (cfg.scheme == Scheme::Rat), ErrorCode::InvalidArgument,
          "sim: configured scheme does not match the scenario's transmit section");
  require(scn.timeline.n_slots >= 1, ErrorCode::InvalidArgument, "sim: empty timeline");
}

// Slot (1-based) containing t within the discretised pass.
int slot_of(const geometry::PassTimeline& tl, double t) {
  const auto n = static_cast<int>(std::floor(t / tl.slot_len)) + 1;
  return std::clamp(n, 1, tl.n_slots);
}

}  // namespace

std::vector<std::int64_t> state_frequencies(const channel::SrFading& fading,
                                            const channel::GainPartition& part,
                                            std::int64_t n_samples, std::uint64_t seed) {
  require(n_samples >= 1, ErrorCode::InvalidArgument, "state_frequencies: n_samples must be >= 1");
  const auto k = static_cast<std::size_t>(part.states());
  auto blocks = run_blocks<std::vector<std::int64_t>>(
      n_samples, [&](std::uint64_t b, std::int64_t count) {
        Rng rng(block_seed(seed, b));
        SrGainSampler sampler(fading);
        std::vector<std::int64_t> hist(k, 0);
        for (std::int64_t i = 0; i < count; ++i) {
          ++hist[static_cast<std::size_t>(classify_state(part, sampler(rng)) - 1)];
        }
        return hist;
      });
  std::vector<std::int64_t> total(k, 0);
  for (const auto& h : blocks) {
    for (std::size_t i = 0; i < k; ++i) total[i] += h[i];
  }
  return total;
}

SimResult simulate_rate_power(const LinkScenario& scn, const SimConfig& cfg) {
  check_scheme(scn, cfg);
  const auto& tl = scn.timeline;
  const auto& budget = scn.budget;
  const double horizon = tl.n_slots * tl.slot_len;

  auto blocks = run_blocks<Moments>(cfg.n_samples, [&](std::uint64_t b, std::int64_t count) {
    Rng rng(block_seed(cfg.seed, b));
    SrGainSampler gain(scn.fading);
    std::uniform_real_distribution<double> when(0.0, horizon);
    Moments acc;
    for (std::int64_t i = 0; i < count; ++i) {
      const double t = when(rng);
      const double g = gain(rng);
      const int n = slot_of(tl, t);
      if (classify_state(scn.partition, g) == 1) {
        acc.add(0.0, 0.0);
        continue;
      }
      if (const auto* rat = std::get_if<schemes::RatConfig>(&scn.transmit)) {
        const double d = geometry::distance_at(scn.geometry, t);
        const double snr =
            rat->tx_power * g / (budget.noise_power * std::pow(d, budget.path_loss_exp));
        acc.add(budget.bandwidth * std::log2(1.0 + snr), rat->tx_power);
      } else {
        const auto& pat = std::get<schemes::PatConfig>(scn.transmit);
        const double need = budget.noise_power *
                            std::pow(tl.dist_max(n), budget.path_loss_exp) *
                            (std::exp2(pat.fixed_rate / budget.bandwidth) - 1.0) / g;
        if (need > pat.max_power * (1.0 + 1e-9)) {
          acc.add(0.0, 0.0);
        } else {
          acc.add(pat.fixed_rate, std::min(need, pat.max_power));
        }
      }
    }
    return acc;
  });

  Moments total;
  for (const auto& m : blocks) total.merge(m);
  return summarize(total);
}

SimResult simulate_dor(const LinkScenario& scn, const schemes::TrafficSpec& traffic,
                       double lambda, const SimConfig& cfg) {
  check_scheme(scn, cfg);
  traffic.validate();
  require(lambda > 0.0, ErrorCode::InvalidArgument, "simulate_dor: lambda must be > 0");
  const auto& tl = scn.timeline;
  const auto& budget = scn.budget;
  const auto& part = scn.partition;
  const int states = part.states();
  const double horizon = tl.n_slots * tl.slot_len;

  // Service rate of state k in slot n: the discrete rate the scheme assigns
  // to the state, i.e. the one its lower SNR edge supports.
  std::vector<double> rate(static_cast<std::size_t>(states * tl.n_slots), 0.0);
  auto rate_at = [&](int k, int n) -> double& {
    return rate[static_cast<std::size_t>((n - 1) * states + (k - 1))];
  };
  for (int n = 1; n <= tl.n_slots; ++n) {
    for (int k = 2; k <= states; ++k) {
      if (const auto* rat = std::get_if<schemes::RatConfig>(&scn.transmit)) {
        const double floor_amp = part.thresholds()[static_cast<std::size_t>(k - 1)];
        const double snr = rat->tx_power * floor_amp * floor_amp /
                           (budget.noise_power * std::pow(tl.dist_max(n), budget.path_loss_exp));
        rate_at(k, n) = budget.bandwidth * std::log2(1.0 + snr);
      } else {
        rate_at(k, n) = std::get<schemes::PatConfig>(scn.transmit).fixed_rate;
      }
    }
  }

  const double bits = traffic.packet_bits;
  const double th = traffic.delay_threshold;
  auto blocks = run_blocks<Moments>(cfg.n_samples, [&](std::uint64_t b, std::int64_t count) {
    Rng rng(block_seed(cfg.seed, b));
    SrGainSampler gain(scn.fading);
    std::uniform_real_distribution<double> when(0.0, horizon);
    std::exponential_distribution<double> wait(1.0 / lambda);
    Moments acc;
    for (std::int64_t i = 0; i < count; ++i) {
      const double t = when(rng);
      const int k = classify_state(part, gain(rng));
      double delivery = 0.0;
      if (k == 1) {
        const double tw = wait(rng);
        // slot after the wait, wrapped into 1..N
        auto m = static_cast<long long>(std::ceil((tw + t) / tl.slot_len)) % tl.n_slots;
        if (m == 0) m = tl.n_slots;
        const double r = rate_at(2, static_cast<int>(m));
        delivery = tw + (r > 0.0 ? bits / r : std::numeric_limits<double>::infinity());
      } else {
        const double r = rate_at(k, slot_of(tl, t));
        delivery = r > 0.0 ? bits / r : std::numeric_limits<double>::infinity();
      }
      ++acc.count;
      if (delivery > th) ++acc.outages;
    }
    return acc;
  });

  Moments total;
  for (const auto& m : blocks) total.merge(m);
  SimResult res;
  res.n_samples = total.count;
  res.rng = rng_description();
  const double p = static_cast<double>(total.outages) / total.count;
  res.dor = {p, std::sqrt(p * (1.0 - p) / total.count)};
  return res;
}

}  // namespace leolink::montecarlo
