#pragma once

#include <cstddef>
#include <vector>

#include "leolink/special_functions.hpp"

namespace leolink::channel {

/// Shadowed-Rician fading: the LOS amplitude is Nakagami-m with mean power
/// `omega`, the scattered part is zero-mean complex Gaussian with power
/// 2*b0. Parameters are constant over a pass.
struct SrFading {
  double m = 1.0;
  double b0 = 0.5;
  double omega = 0.0;

  /// Throws InvalidArgument unless m >= 0.5, b0 > 0, omega >= 0.
  void validate() const;

  double alpha() const;
  double beta() const;
  double delta() const;
  double mean_gain() const { return 2.0 * b0 + omega; }
  bool integer_m() const;

  friend bool operator==(const SrFading&, const SrFading&) = default;
};

/// How the bracket inside the xi_n coefficients of the crossing-rate series
/// is raised: to a fixed square (default) or to the n-th power.
enum class XiExponent { Square, PerTerm };

/// Scattering Doppler spectrum with a von Mises angle-of-arrival law.
struct DopplerSpec {
  double f_scatter_max = 100.0;  // Hz
  double mean_aoa = 0.0;         // rad, in [-pi, pi)
  double aoa_width = 0.0;        // kappa >= 0
  XiExponent xi_exponent = XiExponent::Square;

  void validate() const;

  friend bool operator==(const DopplerSpec&, const DopplerSpec&) = default;
};

/// Spectral moments b0, b1, b2 of the scattered component.
struct SpectralMoments {
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double discriminant() const { return b0 * b2 - b1 * b1; }
};

/// Throws InvalidArgument if b0*b2 - b1^2 <= 0.
SpectralMoments spectral_moments(const SrFading& fading, const DopplerSpec& dop);

/// FSMC amplitude partition mu_0 = 0 <= mu_1 <= ... <= mu_{K-1}, with
/// mu_K = infinity implicit. State k (1-based) holds |h| in [mu_{k-1}, mu_k).
///
/// The top state is unbounded, so bounds that need a finite ceiling for it
/// use `top_gain_cap()`: the conditional mean power gain E[G | G >= mu_{K-1}^2].
/// By Jensen's inequality it gives a valid upper bound on the mean of any
/// concave function of G (rate) and a lower bound on the mean of any convex
/// decreasing one (inverted power) over that state.
class GainPartition {
 public:
  GainPartition() = default;

  /// `thresholds` = {mu_0, ..., mu_{K-1}}. Throws InvalidArgument unless
  /// K >= 2, mu_0 == 0, the values are finite and non-decreasing.
  explicit GainPartition(std::vector<double> thresholds, double top_gain_cap = 0.0);

  int states() const { return static_cast<int>(thresholds_.size()); }
  const std::vector<double>& thresholds() const { return thresholds_; }

  /// mu_{k-1} for 1-based state k.
  double lower(int k) const;
  /// mu_k for 1-based state k; +infinity for k == K.
  double upper(int k) const;

  /// Finite power-gain ceiling of state k: mu_k^2, or the top cap for k == K.
  double gain_ceiling(int k) const;
  double top_gain_cap() const { return top_gain_cap_; }

 private:
  std::vector<double> thresholds_;
  double top_gain_cap_ = 0.0;
};

/// K x N grid of time-averaged state probabilities, accessed 1-based.
class StateProbMatrix {
 public:
  StateProbMatrix() = default;
  StateProbMatrix(int states, int slots);

  int states() const { return states_; }
  int slots() const { return slots_; }
  double operator()(int k, int n) const;
  double& operator()(int k, int n);
  double column_sum(int n) const;

 private:
  std::size_t index(int k, int n) const;

  int states_ = 0;
  int slots_ = 0;
  std::vector<double> probs_;
};

/// Power-gain density. Integer m uses the finite exponential-polynomial
/// expansion; other m the 1F1 form.
double sr_pdf(const SrFading& fading, double y);

/// The 1F1 form of the density regardless of m.
double sr_pdf_series(const SrFading& fading, double y);

/// Power-gain CDF: closed form for integer m, adaptive Gauss-Kronrod
/// quadrature of the density otherwise.
double sr_cdf(const SrFading& fading, double x);

/// Closed-form CDF; throws InvalidArgument for non-integer m.
double sr_cdf_closed_form(const SrFading& fading, double x);

/// Smallest y with sr_cdf(y) >= p, for p in [0, 1).
double sr_quantile(const SrFading& fading, double p);

/// Integral of y f(y) over [a, infinity).
double sr_tail_moment(const SrFading& fading, double a);

/// Gain beyond which the remaining probability mass is negligible
/// (below ~1e-18).
double sr_tail_cutoff(const SrFading& fading);

/// Partition with explicit thresholds and the top-state cap computed for
/// `fading`.
GainPartition make_partition(const SrFading& fading, std::vector<double> thresholds);

/// mu_1 = first_threshold; mu_2..mu_{K-1} split the probability mass above
/// mu_1^2 into K-1 equal parts.
GainPartition equal_probability_partition(const SrFading& fading, double first_threshold,
                                          int states);

std::vector<double> state_probs(const SrFading& fading, const GainPartition& part);

StateProbMatrix state_prob_matrix(const SrFading& fading, const GainPartition& part, int slots);

/// Level-crossing rate of the fading envelope at amplitude r_th (crossings
/// per second). Throws NonConvergent if the series is not converged within
/// ctl.max_terms.
double lcr(const SrFading& fading, const DopplerSpec& dop, double r_th,
           const special::SeriesControl& ctl = {});

/// Average fade duration below amplitude r_th, F_G(r_th^2) / N_R(r_th).
/// Throws ZeroCrossingRate if the crossing rate is zero or not finite.
double afd(const SrFading& fading, const DopplerSpec& dop, double r_th,
           const special::SeriesControl& ctl = {});

}  // namespace leolink::channel
