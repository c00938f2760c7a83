#include "leolink/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "leolink/error.hpp"
#include "quadrature.hpp"

namespace leolink::channel {

using detail::require;

// ---------------------------------------------------------------------------
// SrFading

void SrFading::validate() const {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  require(std::isfinite(m) && m >= 0.5, kCode, "fading: m must be >= 0.5");
  require(std::isfinite(b0) && b0 > 0.0, kCode, "fading: b0 must be > 0");
  require(std::isfinite(omega) && omega >= 0.0, kCode, "fading: omega must be >= 0");
}

double SrFading::alpha() const {
  const double two_b0m = 2.0 * b0 * m;
  return std::pow(two_b0m / (two_b0m + omega), m) / (2.0 * b0);
}

double SrFading::beta() const { return 1.0 / (2.0 * b0); }

double SrFading::delta() const { return omega / (2.0 * b0 * (2.0 * b0 * m + omega)); }

bool SrFading::integer_m() const { return std::floor(m) == m; }

// ---------------------------------------------------------------------------
// Doppler

void DopplerSpec::validate() const {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  require(std::isfinite(f_scatter_max) && f_scatter_max > 0.0, kCode,
          "doppler: f_scatter_max must be > 0");
  require(mean_aoa >= -std::numbers::pi && mean_aoa < std::numbers::pi, kCode,
          "doppler: mean_aoa must lie in [-pi, pi)");
  require(std::isfinite(aoa_width) && aoa_width >= 0.0, kCode, "doppler: aoa_width must be >= 0");
}

SpectralMoments spectral_moments(const SrFading& fading, const DopplerSpec& dop) {
  fading.validate();
  dop.validate();
  const double i0 = special::bessel_i(0, dop.aoa_width);
  const double i1 = special::bessel_i(1, dop.aoa_width);
  const double i2 = special::bessel_i(2, dop.aoa_width);
  const double c = std::cos(dop.mean_aoa);
  const double fd = dop.f_scatter_max;
  constexpr double pi = std::numbers::pi;

  SpectralMoments mom;
  mom.b0 = fading.b0;
  mom.b1 = fading.b0 * 2.0 * pi * fd * c * i1 / i0;
  mom.b2 = fading.b0 * 2.0 * pi * pi * fd * fd * (i0 + c * i2) / i0;
  require(mom.discriminant() > 0.0, ErrorCode::InvalidArgument,
          "doppler: spectral moments violate b0*b2 - b1^2 > 0");
  return mom;
}

// ---------------------------------------------------------------------------
// GainPartition / StateProbMatrix

GainPartition::GainPartition(std::vector<double> thresholds, double top_gain_cap)
    : thresholds_(std::move(thresholds)) {
  constexpr auto kCode = ErrorCode::InvalidArgument;
  require(thresholds_.size() >= 2, kCode, "partition: at least two states are required");
  require(thresholds_.front() == 0.0, kCode, "partition: mu_0 must be 0");
  for (std::size_t i = 1; i < thresholds_.size(); ++i) {
    require(std::isfinite(thresholds_[i]), kCode, "partition: thresholds must be finite");
    require(thresholds_[i] >= thresholds_[i - 1], kCode,
            "partition: thresholds must be non-decreasing");
  }
  const double last = thresholds_.back();
  top_gain_cap_ = std::max(top_gain_cap, last * last);
}

double GainPartition::lower(int k) const {
  require(k >= 1 && k <= states(), ErrorCode::IndexOutOfRange, "partition: state out of range");
  return thresholds_[static_cast<std::size_t>(k - 1)];
}

double GainPartition::upper(int k) const {
  require(k >= 1 && k <= states(), ErrorCode::IndexOutOfRange, "partition: state out of range");
  if (k == states()) return std::numeric_limits<double>::infinity();
  return thresholds_[static_cast<std::size_t>(k)];
}

double GainPartition::gain_ceiling(int k) const {
  if (k == states()) {
    require(k >= 1, ErrorCode::IndexOutOfRange, "partition: state out of range");
    return top_gain_cap_;
  }
  const double u = upper(k);
  return u * u;
}

StateProbMatrix::StateProbMatrix(int states, int slots)
    : states_(states), slots_(slots),
      probs_(static_cast<std::size_t>(states) * static_cast<std::size_t>(slots), 0.0) {
  require(states >= 1 && slots >= 1, ErrorCode::InvalidArgument,
          "StateProbMatrix: dimensions must be positive");
}

std::size_t StateProbMatrix::index(int k, int n) const {
  require(k >= 1 && k <= states_ && n >= 1 && n <= slots_, ErrorCode::IndexOutOfRange,
          "StateProbMatrix: index out of range");
  return static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(states_) +
         static_cast<std::size_t>(k - 1);
}

double StateProbMatrix::operator()(int k, int n) const { return probs_[index(k, n)]; }
double& StateProbMatrix::operator()(int k, int n) { return probs_[index(k, n)]; }

double StateProbMatrix::column_sum(int n) const {
  double s = 0.0;
  for (int k = 1; k <= states_; ++k) s += (*this)(k, n);
  return s;
}

// ---------------------------------------------------------------------------
// Distribution

namespace {

// varsigma(k) of the finite expansion, for integer m.
long double expansion_coeff(const SrFading& f, int k) {
  long double c = special::pochhammer(1.0 - f.m, k);
  c *= std::pow(static_cast<long double>(f.delta()), k);
  long double fact = 1.0L;
  for (int i = 2; i <= k; ++i) fact *= i;
  c /= fact * fact;
  return (k % 2 == 0) ? c : -c;
}

double pdf_closed(const SrFading& f, double y) {
  const int terms = static_cast<int>(f.m);
  const long double decay = f.beta() - f.delta();
  const long double envelope = std::exp(-decay * y);
  if (envelope == 0.0L) return 0.0;
  long double sum = 0.0L;
  long double ypow = 1.0L;
  for (int k = 0; k < terms; ++k) {
    sum += expansion_coeff(f, k) * ypow;
    ypow *= y;
  }
  return static_cast<double>(f.alpha() * sum * envelope);
}

// Quadrature pieces for the non-integer CDF and the tail integrals; split
// at the mean so the peak and the exponential tail are handled apart.
template <class F>
double integrate_split(const SrFading& f, F&& g, double a, double b) {
  const double mid = f.mean_gain();
  if (b <= a) return 0.0;
  if (a < mid && mid < b) {
    return detail::integrate(g, a, mid) + detail::integrate(g, mid, b);
  }
  return detail::integrate(g, a, b);
}

}  // namespace

namespace {

// log 1F1(m; 1; z) for large z >= 0 without overflow.
long double log_1f1_unit_b(double m, double z) {
  const long double lm = m;
  const long double lz = z;
  if (z > 20.0 * m * m) {
    // e^z z^(m-1) / Gamma(m) * sum_s ((1-m)_s)^2 / (s! z^s)
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int s = 0; s < 200; ++s) {
      const long double next = term * (1.0L - lm + s) * (1.0L - lm + s) / ((s + 1) * lz);
      if (std::fabs(next) >= std::fabs(term) || std::fabs(next) < 1e-19L * std::fabs(sum)) break;
      sum += next;
      term = next;
    }
    return lz + (lm - 1.0L) * std::log(lz) - std::lgamma(lm) + std::log(sum);
  }
  // plain series, renormalised whenever the partial sum grows large
  long double term = 1.0L;
  long double sum = 1.0L;
  long double scale = 0.0L;
  const int max_terms = 10000 + static_cast<int>(4.0 * z);
  for (int n = 0; n < max_terms; ++n) {
    term *= (lm + n) * lz / ((1.0L + n) * (n + 1));
    sum += term;
    if (n > z && term < 1e-19L * sum) return scale + std::log(sum);
    if (sum > 1e300L) {
      scale += std::log(sum);
      term /= sum;
      sum = 1.0L;
    }
  }
  detail::fail(ErrorCode::NonConvergent, "sr_pdf: 1F1 series did not converge");
}

}  // namespace

double sr_pdf_series(const SrFading& fading, double y) {
  if (y < 0.0) return 0.0;
  const double z = fading.delta() * y;
  if (z > 700.0) {
    const long double log_value = std::log(static_cast<long double>(fading.alpha())) -
                                  static_cast<long double>(fading.beta()) * y +
                                  log_1f1_unit_b(fading.m, z);
    return static_cast<double>(std::exp(log_value));
  }
  // summed to long double precision so quadrature sees a smooth integrand
  static const special::SeriesControl kFine{1e-18, 10000};
  const long double hyper = special::confluent_1f1_ld(fading.m, 1.0, z, kFine);
  const long double value = static_cast<long double>(fading.alpha()) *
                            std::exp(-static_cast<long double>(fading.beta()) * y) * hyper;
  return static_cast<double>(value);
}

double sr_pdf(const SrFading& fading, double y) {
  if (y < 0.0) return 0.0;
  return fading.integer_m() ? pdf_closed(fading, y) : sr_pdf_series(fading, y);
}

double sr_cdf_closed_form(const SrFading& fading, double x) {
  require(fading.integer_m(), ErrorCode::InvalidArgument,
          "sr_cdf_closed_form: m must be an integer");
  if (x <= 0.0) return 0.0;
  const int terms = static_cast<int>(fading.m);
  const long double c = fading.beta() - fading.delta();
  const long double lx = x;
  const long double decay = std::exp(-c * lx);
  long double outer = 0.0L;
  for (int k = 0; k < terms; ++k) {
    // sum_{p=0}^{k} k!/p! x^p / c^{k+1-p}, built from p = k downwards
    long double inner = 0.0L;
    long double ratio = 1.0L;  // k!/p!
    long double cp = c;        // c^{k+1-p}
    for (int p = k; p >= 0; --p) {
      inner += ratio * std::pow(lx, p) / cp;
      ratio *= p;
      cp *= c;
    }
    outer += expansion_coeff(fading, k) * inner;
  }
  const long double value = 1.0L - static_cast<long double>(fading.alpha()) * outer * decay;
  return std::clamp(static_cast<double>(value), 0.0, 1.0);
}

double sr_tail_cutoff(const SrFading& fading) {
  const double decay = fading.beta() - fading.delta();
  double y = std::max(fading.mean_gain(), 1.0 / decay);
  for (int i = 0; i < 200; ++i) {
    // the tail beyond y is bounded by pdf(y) / decay up to a polynomial factor
    const double tail = sr_pdf(fading, y) / decay * (1.0 + std::max(fading.m, 1.0) / (decay * y));
    if (tail < 1e-20) return y;
    y *= 1.25;
  }
  return y;
}

double sr_cdf(const SrFading& fading, double x) {
  if (x <= 0.0) return 0.0;
  if (fading.integer_m()) return sr_cdf_closed_form(fading, x);
  const double hi = std::min(x, sr_tail_cutoff(fading));
  const double mass =
      integrate_split(fading, [&](double y) { return sr_pdf_series(fading, y); }, 0.0, hi);
  return std::clamp(mass, 0.0, 1.0);
}

double sr_quantile(const SrFading& fading, double p) {
  require(p >= 0.0 && p < 1.0, ErrorCode::InvalidArgument, "sr_quantile: p must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  const double cut = sr_tail_cutoff(fading);
  if (sr_cdf(fading, cut) <= p) return cut;
  auto g = [&](double y) { return sr_cdf(fading, y) - p; };
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      g, 0.0, cut, -p, sr_cdf(fading, cut) - p, boost::math::tools::eps_tolerance<double>(50),
      iters);
  return 0.5 * (lo + hi);
}

double sr_tail_moment(const SrFading& fading, double a) {
  const double cut = sr_tail_cutoff(fading);
  const double from = std::max(a, 0.0);
  return integrate_split(fading, [&](double y) { return y * sr_pdf(fading, y); }, from, cut);
}

namespace {

double tail_mass(const SrFading& fading, double a) {
  const double cut = sr_tail_cutoff(fading);
  return integrate_split(fading, [&](double y) { return sr_pdf(fading, y); }, std::max(a, 0.0),
                         cut);
}

double top_cap(const SrFading& fading, double top_threshold) {
  const double a = top_threshold * top_threshold;
  const double mass = tail_mass(fading, a);
  if (!(mass > 0.0)) return a;
  return std::max(a, sr_tail_moment(fading, a) / mass);
}

}  // namespace

GainPartition make_partition(const SrFading& fading, std::vector<double> thresholds) {
  fading.validate();
  GainPartition probe(thresholds);  // validates before the cap integral
  return GainPartition(std::move(thresholds), top_cap(fading, probe.thresholds().back()));
}

GainPartition equal_probability_partition(const SrFading& fading, double first_threshold,
                                          int states) {
  fading.validate();
  require(states >= 2, ErrorCode::InvalidArgument, "partition: at least two states are required");
  require(std::isfinite(first_threshold) && first_threshold >= 0.0, ErrorCode::InvalidArgument,
          "partition: first threshold must be finite and >= 0");

  std::vector<double> mu{0.0, first_threshold};
  const double base = sr_cdf(fading, first_threshold * first_threshold);
  const double above = 1.0 - base;
  for (int j = 1; j <= states - 2; ++j) {
    double next = first_threshold;
    if (above > 1e-15) {
      const double p = base + above * j / (states - 1);
      next = std::sqrt(sr_quantile(fading, std::min(p, 1.0 - 1e-16)));
    }
    mu.push_back(std::max(next, mu.back()));
  }
  return make_partition(fading, std::move(mu));
}

std::vector<double> state_probs(const SrFading& fading, const GainPartition& part) {
  fading.validate();
  const int states = part.states();
  std::vector<double> probs(static_cast<std::size_t>(states));
  double prev = 0.0;  // F(mu_0^2) = F(0)
  for (int k = 1; k < states; ++k) {
    const double u = part.upper(k);
    const double cur = sr_cdf(fading, u * u);
    probs[static_cast<std::size_t>(k - 1)] = std::max(cur - prev, 0.0);
    prev = cur;
  }
  probs.back() = std::max(1.0 - prev, 0.0);
  return probs;
}

StateProbMatrix state_prob_matrix(const SrFading& fading, const GainPartition& part, int slots) {
  require(slots >= 1, ErrorCode::InvalidArgument, "state_prob_matrix: slots must be >= 1");
  const auto probs = state_probs(fading, part);
  StateProbMatrix matrix(part.states(), slots);
  for (int n = 1; n <= slots; ++n) {
    for (int k = 1; k <= part.states(); ++k) {
      matrix(k, n) = probs[static_cast<std::size_t>(k - 1)];
    }
  }
  return matrix;
}

// ---------------------------------------------------------------------------
// Second-order statistics

double lcr(const SrFading& fading, const DopplerSpec& dop, double r_th,
           const special::SeriesControl& ctl) {
  ctl.validate();
  require(r_th >= 0.0, ErrorCode::InvalidArgument, "lcr: r_th must be >= 0");
  if (r_th == 0.0) return 0.0;
  const SpectralMoments mom = spectral_moments(fading, dop);

  const double m = fading.m;
  const double b0 = fading.b0;
  const double om = fading.omega;
  const double two_b0m = 2.0 * b0 * m;

  const long double prefactor =
      std::pow(static_cast<long double>(two_b0m / (two_b0m + om)), m) /
      std::sqrt(2.0L * std::numbers::pi_v<long double>) *
      std::sqrt(static_cast<long double>(mom.discriminant() / b0)) * (r_th / b0) *
      std::exp(-static_cast<long double>(r_th) * r_th / b0);

  const long double bracket = mom.b1 * mom.b1 / (b0 * mom.discriminant());
  const long double q = 2.0 * b0 * om / (two_b0m + om);
  const double arg = om * r_th * r_th / (2.0 * b0 * (two_b0m + om));

  // xi_n / Gamma(m) = coeff_n * bracket^e * 1F1(n+m; n+1; arg) with
  // coeff_n = (m)_n q^n / (2^n n!)
  auto xi = [&](int n, long double coeff) {
    const long double power = dop.xi_exponent == XiExponent::Square
                                  ? bracket * bracket
                                  : std::pow(bracket, static_cast<long double>(n));
    return coeff * power * special::confluent_1f1_ld(n + m, n + 1.0, arg, ctl);
  };

  long double coeff = 1.0L;        // coeff_n
  long double weight = 1.0L;       // (1/2)_n / n!
  long double xi_n = xi(0, coeff);
  long double sum = 0.0L;
  for (int n = 0; n < ctl.max_terms; ++n) {
    const long double coeff_next = coeff * (m + n) * q / (2.0L * (n + 1));
    const long double xi_next = xi(n + 1, coeff_next);
    const long double term = ((n % 2 == 0) ? weight : -weight) * (xi_n + xi_next);
    sum += term;
    if (n > 0 && std::fabs(term) < ctl.rel_tol * std::fabs(sum)) {
      const double rate = static_cast<double>(prefactor * sum);
      return std::max(rate, 0.0);
    }
    coeff = coeff_next;
    xi_n = xi_next;
    weight *= (0.5L + n) / (n + 1);
  }
  detail::fail(ErrorCode::NonConvergent, "lcr: series did not converge within " +
                                             std::to_string(ctl.max_terms) + " terms");
}

double afd(const SrFading& fading, const DopplerSpec& dop, double r_th,
           const special::SeriesControl& ctl) {
  if (!(r_th > 0.0)) {
    detail::fail(ErrorCode::ZeroCrossingRate, "afd: threshold must be > 0 (0/0 at r_th = 0)");
  }
  const double rate = lcr(fading, dop, r_th, ctl);
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    detail::fail(ErrorCode::ZeroCrossingRate,
                 "afd: level-crossing rate at r_th=" + std::to_string(r_th) + " is zero");
  }
  return sr_cdf(fading, r_th * r_th) / rate;
}

}  // namespace leolink::channel
