#pragma once

// Numerical evaluation of symmetric alpha-stable (SaS) densities.
//
// The family is parameterized by a stability exponent alpha in (0, 2], a
// scale gamma > 0 and a location mu, with characteristic function
//
//     phi(t) = exp(i t mu - |gamma t|^alpha).
//
// Only two members have elementary closed forms: alpha = 1 (Cauchy) and
// alpha = 2 (Gaussian with variance 2 gamma^2). Everything else is computed
// from the Fourier inversion integral
//
//     p(x) = (1/pi) integral_0^inf exp(-(gamma t)^alpha) cos(t (x - mu)) dt
//
// near the mode, and from Bergstrom's asymptotic expansion in the tails.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "sasdp/detail/quadrature.hpp"
#include "sasdp/errors.hpp"

namespace sasdp {

/// Parameters of one SaS density. The skewness of the general stable family
/// is fixed to zero here and not stored.
struct StableParams {
  double alpha;  ///< stability exponent, 0 < alpha <= 2
  double gamma;  ///< scale, > 0
  double mu;     ///< location

  void validate() const {
    if (!(alpha > 0.0) || !(alpha <= 2.0)) {
      throw std::invalid_argument("StableParams: alpha must lie in (0, 2], got " +
                                  std::to_string(alpha));
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw std::invalid_argument("StableParams: gamma must be positive and finite");
    }
    if (!std::isfinite(mu)) {
      throw std::invalid_argument("StableParams: mu must be finite");
    }
  }
};

/// Tolerances and thresholds governing the numerics.
struct EvalConfig {
  double abs_tol = 1e-9;                   ///< target absolute density error
  double rel_tol = 1e-6;                   ///< target relative error
  double tail_crossover = 25.0;            ///< |x-mu|/gamma above which the tail series is used
  int max_series_terms = 16;               ///< cap on tail-series order
  double quadrature_truncation_tol = 1e-14;  ///< tail mass cutoff for the t-integral
  double cdf_tol = 1e-9;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(quadrature_truncation_tol > 0.0) ||
        !(cdf_tol > 0.0)) {
      throw std::invalid_argument("EvalConfig: tolerances must be strictly positive");
    }
    if (!(tail_crossover > 1.0)) {
      throw std::invalid_argument("EvalConfig: tail_crossover must exceed 1");
    }
    if (max_series_terms < 1) {
      throw std::invalid_argument("EvalConfig: max_series_terms must be >= 1");
    }
  }
};

/// Value of an asymptotic-series evaluation together with the magnitude of
/// the first omitted term (the usual asymptotic error convention, with the
/// oscillatory sine factor bounded by 1).
struct TailSeriesResult {
  double value;
  double error_bound;
};

namespace detail {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Hard cap on oscillation-resolving panels per integral; beyond this the
// requested evaluation is reported as non-convergent rather than ground out.
inline constexpr std::size_t kMaxPanels = 400000;

inline double cauchy_pdf(double z, double gamma) {
  return 1.0 / (kPi * gamma * (1.0 + z * z));
}

// alpha = 2 closed form: Gaussian with variance 2 gamma^2.
inline double gaussian2_pdf(double z, double gamma) {
  return std::exp(-0.25 * z * z) / (2.0 * gamma * std::sqrt(kPi));
}

// Truncation point of the t-integral: exp(-T^alpha) < trunc_tol.
inline double quad_truncation(double alpha, double trunc_tol) {
  return std::pow(std::log(1.0 / trunc_tol), 1.0 / alpha);
}

// Panel width that resolves both the stretched-exponential decay and the
// cos(t z) oscillation (period 2 pi / z).
inline std::size_t osc_panel_count(double T, double z, const std::string& op) {
  double w = T / 64.0;
  if (z > 0.0) w = std::min(w, kPi / (4.0 * z));
  const double n = std::ceil(T / w);
  if (!(n <= static_cast<double>(kMaxPanels))) {
    throw NonConvergenceError(op + ": oscillatory integral needs " +
                              std::to_string(n) + " panels (cap " +
                              std::to_string(kMaxPanels) + ")");
  }
  return static_cast<std::size_t>(n);
}

// Standardized density p(z; alpha, 1, 0) by quadrature of the cosine form.
inline double std_density_quad(double z, double alpha, double trunc_tol) {
  const double T = quad_truncation(alpha, trunc_tol);
  const std::size_t n = osc_panel_count(T, z, "density_quadrature");
  const double w = T / static_cast<double>(n);
  auto f = [alpha, z](double s) {
    return std::exp(-std::pow(s, alpha)) * std::cos(s * z);
  };
  // First panel graded toward 0: exp(-s^alpha) has unbounded higher
  // derivatives at the origin for fractional alpha.
  double sum = gl16_graded_origin(f, w);
  for (std::size_t k = 1; k < n; ++k) {
    sum += gl16_panel(f, w * static_cast<double>(k), w * static_cast<double>(k + 1));
  }
  return sum / kPi;
}

// Standardized F(z) - 1/2 = (1/pi) integral_0^inf exp(-s^alpha) sin(s z)/s ds.
inline double std_cdf_integral(double z, double alpha, double trunc_tol) {
  if (z == 0.0) return 0.0;
  const double T = quad_truncation(alpha, trunc_tol);
  const std::size_t n = osc_panel_count(T, std::abs(z), "cdf");
  const double w = T / static_cast<double>(n);
  auto f = [alpha, z](double s) {
    return std::exp(-std::pow(s, alpha)) * std::sin(s * z) / s;
  };
  double sum = gl16_graded_origin(f, w);
  for (std::size_t k = 1; k < n; ++k) {
    sum += gl16_panel(f, w * static_cast<double>(k), w * static_cast<double>(k + 1));
  }
  return sum / kPi;
}

// Bergstrom expansion of the standardized density at large z > 0:
//
//   p(z; alpha, 1, 0) ~ (1/pi) sum_{k>=1} (-1)^{k+1}
//                       [Gamma(alpha k + 1) / k!] sin(k alpha pi / 2) z^{-alpha k - 1}.
//
// Term k, its sign included.
inline double series_term(double z, double alpha, int k) {
  const double ratio =
      std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(static_cast<double>(k) + 1.0));
  const double mag = ratio * std::pow(z, -(alpha * k + 1.0)) / kPi;
  const double s = std::sin(0.5 * kPi * alpha * static_cast<double>(k));
  return ((k % 2 == 1) ? 1.0 : -1.0) * mag * s;
}

// Sine-free majorant of term k (used both for the decrease check and as the
// first-omitted-term error bound; sin factors can vanish spuriously).
inline double series_majorant(double z, double alpha, int k) {
  const double ratio =
      std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(static_cast<double>(k) + 1.0));
  return ratio * std::pow(z, -(alpha * k + 1.0)) / kPi;
}

// Largest order n <= max_terms whose majorants decrease strictly through the
// first omitted term; 0 when even the two-term comparison fails (z too small).
inline int series_order(double z, double alpha, int max_terms) {
  double prev = series_majorant(z, alpha, 1);
  double next = series_majorant(z, alpha, 2);
  if (!(next < prev)) return 0;
  int n = 1;
  while (n < max_terms) {
    prev = next;
    next = series_majorant(z, alpha, n + 2);
    if (!(next < prev)) break;
    ++n;
  }
  return n;
}

inline double series_value(double z, double alpha, int n_terms) {
  double sum = 0.0;
  for (int k = 1; k <= n_terms; ++k) sum += series_term(z, alpha, k);
  return sum;
}

// Term-by-term integral of the expansion over (z, infinity): the upper tail
// mass 1 - F(z) for z > 0, each power integrating to z^{-alpha k}/(alpha k).
inline double series_tail_term(double z, double alpha, int k) {
  const double ratio =
      std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(static_cast<double>(k) + 1.0));
  const double mag = ratio * std::pow(z, -alpha * k) / (alpha * k * kPi);
  const double s = std::sin(0.5 * kPi * alpha * static_cast<double>(k));
  return ((k % 2 == 1) ? 1.0 : -1.0) * mag * s;
}

inline double series_tail_majorant(double z, double alpha, int k) {
  const double ratio =
      std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(static_cast<double>(k) + 1.0));
  return ratio * std::pow(z, -alpha * k) / (alpha * k * kPi);
}

inline int series_tail_order(double z, double alpha, int max_terms) {
  double prev = series_tail_majorant(z, alpha, 1);
  double next = series_tail_majorant(z, alpha, 2);
  if (!(next < prev)) return 0;
  int n = 1;
  while (n < max_terms) {
    prev = next;
    next = series_tail_majorant(z, alpha, n + 2);
    if (!(next < prev)) break;
    ++n;
  }
  return n;
}

inline double series_tail_mass(double z, double alpha, int n_terms) {
  double sum = 0.0;
  for (int k = 1; k <= n_terms; ++k) sum += series_tail_term(z, alpha, k);
  return sum;
}

}  // namespace detail

namespace detail {

inline void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(who) + ": argument must be finite");
  }
}

}  // namespace detail

/// phi(t) = exp(i t mu - |gamma t|^alpha). Modulus <= 1, with equality iff t = 0.
inline std::complex<double> characteristic_function(double t, const StableParams& params) {
  params.validate();
  detail::require_finite(t, "characteristic_function");
  const double mag = std::exp(-std::pow(std::abs(params.gamma * t), params.alpha));
  return {mag * std::cos(t * params.mu), mag * std::sin(t * params.mu)};
}

/// Density by direct quadrature of the cosine form, any alpha in (0, 2].
inline double density_quadrature(double x, const StableParams& params,
                                 const EvalConfig& config = {}) {
  params.validate();
  config.validate();
  detail::require_finite(x, "density_quadrature");
  const double z = std::abs(x - params.mu) / params.gamma;
  return detail::std_density_quad(z, params.alpha, config.quadrature_truncation_tol) /
         params.gamma;
}

/// Bergstrom tail expansion at fixed order. Requires x != mu; the series is
/// evaluated at the standardized argument |x - mu| / gamma (symmetric
/// extension for x < mu). Throws SeriesDivergenceError when the requested
/// terms are not decreasing at this argument.
inline TailSeriesResult density_tail_series(double x, const StableParams& params,
                                            int n_terms) {
  params.validate();
  if (n_terms < 1) throw std::invalid_argument("density_tail_series: n_terms must be >= 1");
  detail::require_finite(x, "density_tail_series");
  if (x == params.mu) {
    throw std::invalid_argument("density_tail_series: undefined at x == mu");
  }
  const double z = std::abs(x - params.mu) / params.gamma;
  double prev = detail::series_majorant(z, params.alpha, 1);
  for (int k = 1; k <= n_terms; ++k) {
    const double next = detail::series_majorant(z, params.alpha, k + 1);
    if (!(next < prev)) {
      throw SeriesDivergenceError(
          "density_tail_series: term magnitudes non-decreasing at standardized "
          "argument " +
          std::to_string(z) + " (order " + std::to_string(k + 1) + ")");
    }
    prev = next;
  }
  return {detail::series_value(z, params.alpha, n_terms) / params.gamma,
          detail::series_majorant(z, params.alpha, n_terms + 1) / params.gamma};
}

/// Gamma(1/alpha) / (alpha gamma pi): a global bound on the density, attained
/// at x = mu where the cosine factor of the inversion integral is 1.
inline double density_peak_bound(const StableParams& params) {
  params.validate();
  return std::tgamma(1.0 / params.alpha) / (params.alpha * params.gamma * detail::kPi);
}

/// SaS density. Dispatches over the closed forms (alpha = 1, 2), the tail
/// expansion (|x-mu|/gamma beyond the crossover, at the order where its terms
/// stop decreasing) and quadrature everywhere else.
inline double density(double x, const StableParams& params, const EvalConfig& config = {}) {
  params.validate();
  config.validate();
  detail::require_finite(x, "density");
  const double z = std::abs(x - params.mu) / params.gamma;
  if (params.alpha == 1.0) return detail::cauchy_pdf(z, params.gamma);
  if (params.alpha == 2.0) return detail::gaussian2_pdf(z, params.gamma);
  if (z > config.tail_crossover) {
    const int n = detail::series_order(z, params.alpha, config.max_series_terms);
    if (n >= 1) return detail::series_value(z, params.alpha, n) / params.gamma;
  }
  return detail::std_density_quad(z, params.alpha, config.quadrature_truncation_tol) /
         params.gamma;
}

/// ln density. Finite for every finite x (the SaS support is the whole line).
inline double log_density(double x, const StableParams& params,
                          const EvalConfig& config = {}) {
  params.validate();
  config.validate();
  detail::require_finite(x, "log_density");
  const double z = (x - params.mu) / params.gamma;
  if (params.alpha == 1.0) {
    return -std::log(detail::kPi * params.gamma) - std::log1p(z * z);
  }
  if (params.alpha == 2.0) {
    return -0.25 * z * z - std::log(2.0 * params.gamma * std::sqrt(detail::kPi));
  }
  const double az = std::abs(z);
  if (az > config.tail_crossover) {
    const int n = detail::series_order(az, params.alpha, config.max_series_terms);
    if (n >= 1) {
      const double v = detail::series_value(az, params.alpha, n);
      if (v > 0.0) return std::log(v) - std::log(params.gamma);
    }
  }
  return std::log(
      detail::std_density_quad(az, params.alpha, config.quadrature_truncation_tol) /
      params.gamma);
}

/// Distribution function F(x) = 1/2 + integral_mu^x density. F(mu) = 1/2
/// exactly by symmetry. Tail region integrates the series term by term.
inline double cdf(double x, const StableParams& params, const EvalConfig& config = {}) {
  params.validate();
  config.validate();
  detail::require_finite(x, "cdf");
  const double z = (x - params.mu) / params.gamma;
  if (params.alpha == 1.0) return 0.5 + std::atan(z) / detail::kPi;
  if (params.alpha == 2.0) return 0.5 * std::erfc(-0.5 * z);
  const double az = std::abs(z);
  if (az > config.tail_crossover) {
    const int n = detail::series_tail_order(az, params.alpha, config.max_series_terms);
    if (n >= 1) {
      const double tail = detail::series_tail_mass(az, params.alpha, n);
      return z > 0.0 ? 1.0 - tail : tail;
    }
  }
  const double v =
      0.5 + detail::std_cdf_integral(z, params.alpha, config.quadrature_truncation_tol);
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace sasdp
