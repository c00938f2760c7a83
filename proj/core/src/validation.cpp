#include "leolink/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "leolink/error.hpp"
#include "leolink/pipeline.hpp"
#include "quadrature.hpp"
#include "text_util.hpp"

namespace leolink::validation {

using channel::GainPartition;
using channel::SrFading;
using channel::StateProbMatrix;
using geometry::PassTimeline;

double cdf_by_quadrature(const SrFading& fading, double x) {
  if (x <= 0.0) return 0.0;
  auto pdf = [&](double y) { return channel::sr_pdf(fading, y); };
  // split near the mean so the peak is resolved
  const double mid = std::min(x, fading.mean_gain());
  double sum = detail::integrate(pdf, 0.0, mid);
  if (x > mid) sum += detail::integrate(pdf, mid, x);
  return sum;
}

double max_cdf_discrepancy(const SrFading& fading, const std::vector<double>& grid) {
  double worst = 0.0;
  for (const double x : grid) {
    worst = std::max(worst,
                     std::fabs(channel::sr_cdf_closed_form(fading, x) - cdf_by_quadrature(fading, x)));
  }
  return worst;
}

KsResult ks_test(const SrFading& fading, std::int64_t n, std::uint64_t seed, double alpha) {
  detail::require(n >= 1, ErrorCode::InvalidArgument, "ks_test: n must be >= 1");
  detail::require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
                  "ks_test: alpha must lie in (0, 1)");
  std::vector<double> draws(static_cast<std::size_t>(n));
  // same block layout as the simulators so the draws are reproducible
  for (std::int64_t start = 0, b = 0; start < n; start += montecarlo::kBlockSize, ++b) {
    montecarlo::Rng rng(montecarlo::block_seed(seed, static_cast<std::uint64_t>(b)));
    montecarlo::SrGainSampler gain(fading);
    const std::int64_t end = std::min(n, start + montecarlo::kBlockSize);
    for (std::int64_t i = start; i < end; ++i) draws[static_cast<std::size_t>(i)] = gain(rng);
  }
  std::sort(draws.begin(), draws.end());

  // CDF along the sorted draws, accumulated interval by interval
  const bool closed = fading.integer_m();
  auto pdf = [&](double y) { return channel::sr_pdf(fading, y); };
  double cdf = 0.0;
  double prev = 0.0;
  double d = 0.0;
  const double nn = static_cast<double>(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = draws[static_cast<std::size_t>(i)];
    if (closed) {
      cdf = channel::sr_cdf_closed_form(fading, x);
    } else if (x > prev) {
      // neighbouring draws are close; a fixed rule is exact to rounding there
      cdf += x - prev < 1e-2 ? boost::math::quadrature::gauss<double, 15>::integrate(pdf, prev, x)
                             : detail::integrate(pdf, prev, x);
      prev = x;
    }
    const double f = std::clamp(cdf, 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / nn - f, f - static_cast<double>(i) / nn});
  }
  return {d, std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(nn), n};
}

double FrequencyResult::max_abs_z() const {
  double m = 0.0;
  for (const double v : z) m = std::max(m, std::fabs(v));
  return m;
}

FrequencyResult state_frequency_check(const SrFading& fading, const GainPartition& part,
                                      std::int64_t n, std::uint64_t seed) {
  FrequencyResult res;
  res.n = n;
  res.expected = channel::state_probs(fading, part);
  const auto counts = montecarlo::state_frequencies(fading, part, n, seed);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double p = res.expected[k];
    const double f = static_cast<double>(counts[k]) / nn;
    const double se = std::sqrt(p * (1.0 - p) / nn);
    res.observed.push_back(f);
    res.z.push_back(se > 0.0 ? (f - p) / se : (f == p ? 0.0 : std::numeric_limits<double>::infinity()));
  }
  return res;
}

double max_column_sum_error(const StateProbMatrix& probs) {
  double worst = 0.0;
  for (int n = 1; n <= probs.slots(); ++n) worst = std::max(worst, std::fabs(probs.column_sum(n) - 1.0));
  return worst;
}

bool within_bracket(double value, double se, double lo, double hi, double nsigma) {
  const double slack = 1e-12 * std::max({std::fabs(lo), std::fabs(hi), std::fabs(value)});
  return value >= lo - nsigma * se - slack && value <= hi + nsigma * se + slack;
}

namespace {

// Lower-edge rate of state k >= 2 in slot n, from the link budget directly.
double edge_rate(const schemes::LinkBudget& budget, const schemes::RatConfig& rat,
                 const GainPartition& part, const PassTimeline& tl, int k, int n) {
  const double mu = part.thresholds()[static_cast<std::size_t>(k - 1)];
  const double snr = rat.tx_power * mu * mu /
                     (budget.noise_power * std::pow(tl.dist_max(n), budget.path_loss_exp));
  return budget.bandwidth * std::log2(1.0 + snr);
}

// P(T_W <= limit) for T_W ~ Exp(lambda), by quadrature of the density.
double wait_cdf(double limit, double lambda) {
  if (limit <= 0.0) return 0.0;
  auto density = [lambda](double w) { return std::exp(-w / lambda) / lambda; };
  // piecewise over multiples of lambda so the quadrature sees a smooth decay
  double sum = 0.0;
  double a = 0.0;
  while (a < limit) {
    const double b = std::min(limit, a + 4.0 * lambda);
    sum += detail::integrate(density, a, b, 1e-14);
    if (sum >= 1.0 - 1e-17) break;
    a = b;
  }
  return std::min(sum, 1.0);
}

bool served(double threshold, double delivery) { return threshold - delivery >= 0.0; }

}  // namespace

double rat_dor_direct(const schemes::LinkBudget& budget, const schemes::RatConfig& rat,
                      const GainPartition& part, const PassTimeline& tl,
                      const StateProbMatrix& probs, const schemes::TrafficSpec& traffic,
                      double lambda) {
  const int N = tl.n_slots;
  const double bits = traffic.packet_bits;
  const double th = traffic.delay_threshold;

  // outage given an arrival in slot n (m_t uniform and independent of t)
  std::vector<double> waited(static_cast<std::size_t>(N));
  double waited_mean = 0.0;
  for (int m = 1; m <= N; ++m) {
    const double slack = th - bits / edge_rate(budget, rat, part, tl, 2, m);
    waited_mean += probs(1, m) * (slack >= 0.0 ? wait_cdf(slack, lambda) : 0.0) / N;
  }
  // states >= 2 are served at once in the arrival slot
  double served_states = 0.0;
  for (int n = 1; n <= N; ++n) {
    for (int k = 2; k <= part.states(); ++k) {
      if (served(th, bits / edge_rate(budget, rat, part, tl, k, n))) served_states += probs(k, n) / N;
    }
  }
  const double horizon = N * tl.slot_len;
  auto integrand = [&](double) { return 1.0 - waited_mean - served_states; };
  const double dor = detail::integrate(integrand, 0.0, horizon) / horizon;
  return std::clamp(dor, 0.0, 1.0);
}

double rat_dor_wrapped(const schemes::LinkBudget& budget, const schemes::RatConfig& rat,
                       const GainPartition& part, const PassTimeline& tl,
                       const StateProbMatrix& probs, const schemes::TrafficSpec& traffic,
                       double lambda) {
  const int N = tl.n_slots;
  const double T = tl.slot_len;
  const double bits = traffic.packet_bits;
  const double th = traffic.delay_threshold;
  std::vector<double> slack2(static_cast<std::size_t>(N) + 1);
  for (int m = 1; m <= N; ++m) slack2[static_cast<std::size_t>(m)] = th - bits / edge_rate(budget, rat, part, tl, 2, m);

  // P(wait ends in a slot whose state-2 rate still meets the deadline), for
  // an arrival at time t
  auto wait_success = [&](double t) {
    double p = 0.0;
    long long j = static_cast<long long>(std::floor(t / T)) + 1;  // slot index before wrap
    double w0 = 0.0;
    while (w0 < th) {
      const double w1 = j * T - t;  // the wait leaves slot j at w1
      int m = static_cast<int>(j % N);
      if (m == 0) m = N;
      const double hi = std::min(w1, slack2[static_cast<std::size_t>(m)]);
      if (hi > w0) p += std::exp(-w0 / lambda) - std::exp(-hi / lambda);
      w0 = w1;
      ++j;
    }
    return p;
  };

  double total = 0.0;
  for (int n = 1; n <= N; ++n) {
    double immediate = 0.0;
    for (int k = 2; k <= part.states(); ++k) {
      if (served(th, bits / edge_rate(budget, rat, part, tl, k, n))) immediate += probs(k, n);
    }
    auto integrand = [&](double t) { return 1.0 - immediate - probs(1, n) * wait_success(t); };
    // the success probability has kinks where the deadline reaches the
    // slot boundary; split there
    const double a = (n - 1) * T;
    const double b = n * T;
    std::vector<double> cuts{a, b};
    std::vector<double> offsets{th};
    for (int m = 1; m <= N; ++m) {
      if (slack2[static_cast<std::size_t>(m)] > 0.0) offsets.push_back(slack2[static_cast<std::size_t>(m)]);
    }
    for (const double s : offsets) {
      for (double c = b - s; c < b; c += T) {
        if (c > a) cuts.push_back(c);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += detail::integrate(integrand, cuts[i], cuts[i + 1], 1e-12);
    }
  }
  return std::clamp(total / (N * T), 0.0, 1.0);
}

double pat_dor_direct(const schemes::PatConfig& pat, const PassTimeline& tl,
                      const StateProbMatrix& probs, const schemes::TrafficSpec& traffic,
                      double lambda) {
  const int N = tl.n_slots;
  const double knee = traffic.packet_bits / pat.fixed_rate;
  const double slack = traffic.delay_threshold - knee;
  if (slack < 0.0) return 1.0;
  double waiting_mass = 0.0;
  for (int n = 1; n <= N; ++n) waiting_mass += probs(1, n) / N;
  const double late = 1.0 - wait_cdf(slack, lambda);
  const double horizon = N * tl.slot_len;
  auto integrand = [&](double) { return waiting_mass * late; };
  return std::clamp(detail::integrate(integrand, 0.0, horizon) / horizon, 0.0, 1.0);
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

Check make_check(std::string name, double measured, double limit, bool passed,
                 std::string note = {}) {
  return Check{std::move(name), passed, measured, limit, std::move(note)};
}

double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
}

std::string bracket_note(double value, double se, double lo, double hi) {
  return "value " + text::format_double(value) + " +- " + text::format_double(se) + " in [" +
         text::format_double(lo) + ", " + text::format_double(hi) + "]";
}

}  // namespace

Report validate_scenario(const cli::Scenario& scn, const Options& opts) {
  Report rep;
  auto& out = rep.checks;
  const std::int64_t samples = opts.samples > 0 ? opts.samples : scn.sim.samples;
  const std::uint64_t seed = opts.seed != 0 ? opts.seed : scn.sim.seed;

  const auto prep = cli::prepare(scn);
  const auto& link = prep.link;
  const auto& geo = link.geometry;
  const auto& tl = link.timeline;

  // geometry
  {
    const double ts = tl.service_time;
    const double mid = geometry::distance_at(geo, ts / 2.0);
    const double expect = std::hypot(geo.orbit_height, geo.terminal_offset);
    const double e1 = rel_diff(mid, expect);
    out.push_back(make_check("geometry.closest_approach", e1, 1e-12, e1 <= 1e-12));
    const double e2 = rel_diff(geometry::distance_at(geo, 0.0), geometry::distance_at(geo, ts));
    out.push_back(make_check("geometry.symmetric_pass", e2, 1e-12, e2 <= 1e-12));
    const auto [lo, hi] = geometry::distance_range(geo, true);
    const double e3 = std::max(rel_diff(lo, geo.orbit_height), rel_diff(hi, prep.d_max));
    out.push_back(make_check("geometry.coverage_envelope", e3, 1e-12, e3 <= 1e-12));
  }

  // gain distribution
  if (scn.fading.integer_m()) {
    std::vector<double> grid;
    const double top = channel::sr_quantile(scn.fading, 1.0 - 1e-9);
    for (int i = 1; i <= 100; ++i) grid.push_back(top * i / 100.0);
    const double e = max_cdf_discrepancy(scn.fading, grid);
    out.push_back(make_check("channel.cdf_closed_vs_quadrature", e, 1e-8, e <= 1e-8));
  }
  {
    const auto ks = ks_test(scn.fading, samples, seed);
    out.push_back(make_check("channel.ks_sampler", ks.statistic, ks.critical, ks.passed(),
                             "alpha = 0.01, n = " + std::to_string(ks.n)));
  }

  // FSMC
  {
    const double e = max_column_sum_error(prep.probs);
    out.push_back(make_check("fsmc.column_sums", e, 1e-9, e <= 1e-9));
    const auto fr = state_frequency_check(scn.fading, link.partition, samples, seed);
    out.push_back(make_check("fsmc.state_frequencies", fr.max_abs_z(), 3.0, fr.max_abs_z() <= 3.0,
                             "max |z| over states"));
  }

  // brackets
  const auto report = cli::report_of(scn, prep);
  const auto cfg = montecarlo::SimConfig{samples, seed, scn.sim_config().scheme};
  const auto rp = montecarlo::simulate_rate_power(link, cfg);
  {
    const bool ok = within_bracket(rp.rate.mean, rp.rate.se, report.throughput_lo, report.throughput_hi);
    out.push_back(make_check("schemes.rate_bracket", rp.rate.mean, report.throughput_hi, ok,
                             bracket_note(rp.rate.mean, rp.rate.se, report.throughput_lo,
                                          report.throughput_hi)));
    const bool okp = within_bracket(rp.power.mean, rp.power.se, report.avg_power_lo, report.avg_power_hi);
    out.push_back(make_check("schemes.power_bracket", rp.power.mean, report.avg_power_hi, okp,
                             bracket_note(rp.power.mean, rp.power.se, report.avg_power_lo,
                                          report.avg_power_hi)));
    const bool oke = within_bracket(rp.ee.mean, rp.ee.se, report.ee_lo, report.ee_hi);
    out.push_back(make_check("schemes.ee_bracket", rp.ee.mean, report.ee_hi, oke,
                             bracket_note(rp.ee.mean, rp.ee.se, report.ee_lo, report.ee_hi)));
  }

  // delay outage
  {
    double direct = 0.0;
    if (const auto* rat = std::get_if<schemes::RatConfig>(&scn.transmit)) {
      direct = rat_dor_direct(link.budget, *rat, link.partition, tl, prep.probs, scn.traffic,
                              prep.lambda);
    } else {
      direct = pat_dor_direct(std::get<schemes::PatConfig>(scn.transmit), tl, prep.probs,
                              scn.traffic, prep.lambda);
    }
    const double e = std::fabs(direct - report.dor);
    out.push_back(make_check("schemes.dor_closed_vs_integral", e, 1e-9, e <= 1e-9));

    const auto dr = montecarlo::simulate_dor(link, scn.traffic, prep.lambda, cfg);
    const double p = report.dor;
    const double se = std::max(std::sqrt(p * (1.0 - p) / static_cast<double>(dr.n_samples)), dr.dor.se);
    const double z = se > 0.0 ? std::fabs(dr.dor.mean - p) / se : (dr.dor.mean == p ? 0.0 : 1e300);
    out.push_back(make_check("schemes.dor_vs_simulation", z, 3.0, z <= 3.0,
                             "simulated " + text::format_double(dr.dor.mean) + ", analytic " +
                                 text::format_double(p)));
  }
  return rep;
}

}  // namespace leolink::validation
