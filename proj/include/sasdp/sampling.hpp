#pragma once

// SaS, Laplace and Gaussian variate generation on deterministic streams,
// plus the Kolmogorov-Smirnov machinery used to validate the samplers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sasdp/random.hpp"
#include "sasdp/stable.hpp"

namespace sasdp {

/// One draw from the standardized SaS law (gamma = 1, mu = 0) via the
/// Chambers-Mallows-Stuck construction: U uniform on (-pi/2, pi/2), W unit
/// exponential,
///
///   alpha == 1:  tan(U)
///   otherwise:   sin(alpha U) / cos(U)^{1/alpha}
///                  * (cos(U - alpha U) / W)^{(1 - alpha)/alpha}.
///
/// alpha within 1e-9 of 1 routes to the tan branch; the (1-alpha)/alpha
/// exponent loses all precision there while the law is continuous in alpha.
inline double sample_standard_sas(double alpha, RandomStream& stream) {
  if (!(alpha > 0.0) || !(alpha <= 2.0)) {
    throw std::invalid_argument("sample_standard_sas: alpha must lie in (0, 2]");
  }
  const double u = M_PI * (stream.next_uniform_open01() - 0.5);
  const double w = -std::log(stream.next_uniform_open01());
  if (std::abs(alpha - 1.0) < 1e-9) return std::tan(u);
  const double t1 = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
  const double t2 = std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
  return t1 * t2;
}

/// Location-scale draw: gamma * standardized + mu.
inline double sample(const StableParams& params, RandomStream& stream) {
  params.validate();
  return params.gamma * sample_standard_sas(params.alpha, stream) + params.mu;
}

/// m i.i.d. draws; identical to m sequential scalar draws on the same stream.
inline std::vector<double> sample_vector(std::size_t m, const StableParams& params,
                                         RandomStream& stream) {
  if (m < 1) throw std::invalid_argument("sample_vector: m must be >= 1");
  params.validate();
  std::vector<double> out(m);
  for (auto& v : out) v = sample(params, stream);
  return out;
}

/// Laplace(0, b) by inverse CDF.
inline double sample_laplace(double b, RandomStream& stream) {
  if (!(b > 0.0)) throw std::invalid_argument("sample_laplace: b must be positive");
  const double u = stream.next_uniform_open01() - 0.5;  // (-1/2, 1/2)
  const double s = u < 0.0 ? -1.0 : 1.0;
  return -b * s * std::log(1.0 - 2.0 * std::abs(u));
}

/// N(0, sigma^2) by the Box-Muller transform (cosine branch; each draw
/// consumes exactly two uniforms).
inline double sample_gaussian(double sigma, RandomStream& stream) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("sample_gaussian: sigma must be positive");
  }
  const double u1 = stream.next_uniform_open01();
  const double u2 = stream.next_uniform_open01();
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Result of a one-sample Kolmogorov-Smirnov test at the 99% level.
struct KsReport {
  double statistic;
  std::size_t n;
  double critical_value_99;  // 1.63 / sqrt(n), asymptotic, n >= 35
  bool pass;
};

/// D = sup_i max(|i/n - F(x_(i))|, |(i-1)/n - F(x_(i))|) over the sorted
/// sample, compared against the asymptotic 99% critical value.
template <typename CdfFn>
KsReport ks_statistic(std::vector<double> samples, CdfFn&& model_cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = model_cdf(samples[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  const double crit = 1.63 / std::sqrt(n);
  return {d, samples.size(), crit, d < crit};
}

}  // namespace sasdp
