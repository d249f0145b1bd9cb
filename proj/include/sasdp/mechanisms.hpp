#pragma once

// Additive noise mechanisms (SaS, Laplace, Gaussian) applied to query
// responses, their mean-absolute-deviation distortion, and the convolution
// closure rule for aggregated SaS noise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sasdp/random.hpp"
#include "sasdp/sampling.hpp"
#include "sasdp/stable.hpp"

namespace sasdp {

/// Which noise family to inject, with exactly the parameter block for that
/// family. SaS noise is always centered (mu = 0).
struct MechanismSpec {
  enum class Kind { kSas, kLaplace, kGaussian };

  Kind kind = Kind::kSas;
  StableParams sas_params{1.5, 1.0, 0.0};
  double laplace_b = 1.0;
  double gaussian_sigma = 1.0;

  static MechanismSpec sas(double alpha, double gamma) {
    MechanismSpec s;
    s.kind = Kind::kSas;
    s.sas_params = {alpha, gamma, 0.0};
    s.validate();
    return s;
  }
  static MechanismSpec laplace(double b) {
    MechanismSpec s;
    s.kind = Kind::kLaplace;
    s.laplace_b = b;
    s.validate();
    return s;
  }
  static MechanismSpec gaussian(double sigma) {
    MechanismSpec s;
    s.kind = Kind::kGaussian;
    s.gaussian_sigma = sigma;
    s.validate();
    return s;
  }

  void validate() const {
    switch (kind) {
      case Kind::kSas:
        sas_params.validate();
        if (sas_params.mu != 0.0) {
          throw std::invalid_argument("MechanismSpec: SaS noise must be centered (mu = 0)");
        }
        return;
      case Kind::kLaplace:
        if (!(laplace_b > 0.0)) {
          throw std::invalid_argument("MechanismSpec: laplace b must be positive");
        }
        return;
      case Kind::kGaussian:
        if (!(gaussian_sigma > 0.0)) {
          throw std::invalid_argument("MechanismSpec: gaussian sigma must be positive");
        }
        return;
    }
    throw std::invalid_argument("MechanismSpec: unknown kind");
  }
};

/// One noise draw from the configured family.
inline double sample_noise(const MechanismSpec& spec, RandomStream& stream) {
  switch (spec.kind) {
    case MechanismSpec::Kind::kSas:
      return spec.sas_params.gamma * sample_standard_sas(spec.sas_params.alpha, stream);
    case MechanismSpec::Kind::kLaplace:
      return sample_laplace(spec.laplace_b, stream);
    case MechanismSpec::Kind::kGaussian:
      return sample_gaussian(spec.gaussian_sigma, stream);
  }
  throw std::invalid_argument("sample_noise: unknown kind");
}

/// Perturbed query response. clean_values stays empty unless explicitly
/// retained; keeping the unperturbed response next to the release defeats
/// the mechanism in any real pipeline.
struct MechanismOutput {
  std::vector<double> values;
  std::vector<double> clean_values;
  std::uint64_t seed_used = 0;
  std::uint64_t substream_used = 0;
  MechanismSpec spec_used;
};

/// values = query response + i.i.d. noise vector.
inline MechanismOutput apply(std::span<const double> query_values,
                             const MechanismSpec& spec, RandomStream& stream,
                             bool retain_clean = false) {
  spec.validate();
  if (query_values.empty()) {
    throw std::invalid_argument("apply: query response must be non-empty");
  }
  for (double v : query_values) {
    if (!std::isfinite(v)) throw std::invalid_argument("apply: query response must be finite");
  }
  MechanismOutput out;
  out.seed_used = stream.seed();
  out.substream_used = stream.substream();
  out.spec_used = spec;
  out.values.reserve(query_values.size());
  for (double v : query_values) out.values.push_back(v + sample_noise(spec, stream));
  if (retain_clean) out.clean_values.assign(query_values.begin(), query_values.end());
  return out;
}

/// Local mode: every record perturbed with an independent draw before any
/// aggregation, for untrusted-aggregator simulation. Consumes exactly one
/// draw per record, in record order.
inline std::vector<double> apply_local(std::span<const double> record_values,
                                       const MechanismSpec& spec, RandomStream& stream) {
  spec.validate();
  for (double v : record_values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("apply_local: record values must be finite");
    }
  }
  std::vector<double> out;
  out.reserve(record_values.size());
  for (double v : record_values) out.push_back(v + sample_noise(spec, stream));
  return out;
}

/// Mean absolute deviation E|Y| of the injected noise.
///   SaS:      (2 gamma / pi) Gamma(1 - 1/alpha), alpha in (1, 2]
///   Laplace:  b
///   Gaussian: sqrt(2/pi) sigma
/// The SaS value at alpha = 2 is routed through the Gaussian identity
/// (gamma = sigma / sqrt 2) so the endpoint matches it exactly.
inline double mad_analytic(const MechanismSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case MechanismSpec::Kind::kSas: {
      const double alpha = spec.sas_params.alpha;
      if (alpha <= 1.0) {
        throw std::domain_error(
            "mad_analytic: E|Y| undefined for alpha <= 1 (Gamma pole at alpha = 1)");
      }
      if (alpha == 2.0) {
        return std::sqrt(2.0 / M_PI) * (std::sqrt(2.0) * spec.sas_params.gamma);
      }
      return (2.0 * spec.sas_params.gamma / M_PI) * std::tgamma(1.0 - 1.0 / alpha);
    }
    case MechanismSpec::Kind::kLaplace:
      return spec.laplace_b;
    case MechanismSpec::Kind::kGaussian:
      return std::sqrt(2.0 / M_PI) * spec.gaussian_sigma;
  }
  throw std::invalid_argument("mad_analytic: unknown kind");
}

/// Monte Carlo MAD estimate. |Y| has finite mean but infinite variance for
/// SaS alpha < 2, so the CLT standard error is itself noisy; the
/// median-of-means over 32 blocks is reported alongside it as a rank-based
/// cross-check.
struct MadEstimate {
  double estimate;
  double std_error;
  double median_of_means;
};

inline MadEstimate mad_monte_carlo(const MechanismSpec& spec, std::size_t n,
                                   RandomStream& stream) {
  spec.validate();
  if (n < 1000) throw std::invalid_argument("mad_monte_carlo: n must be >= 1000");
  if (spec.kind == MechanismSpec::Kind::kSas && spec.sas_params.alpha <= 1.0) {
    throw std::domain_error("mad_monte_carlo: E|Y| undefined for alpha <= 1");
  }
  constexpr std::size_t kBlocks = 32;
  std::vector<double> block_means(kBlocks, 0.0);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(sample_noise(spec, stream));
    sum += a;
    sum_sq += a * a;
    block_means[i % kBlocks] += a;
  }
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, sum_sq / nn - mean * mean);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    const std::size_t count = n / kBlocks + (b < n % kBlocks ? 1 : 0);
    block_means[b] /= static_cast<double>(count);
  }
  std::nth_element(block_means.begin(), block_means.begin() + kBlocks / 2,
                   block_means.end());
  return {mean, std::sqrt(var / nn), block_means[kBlocks / 2]};
}

/// Law of sum_i a_i Y_i for i.i.d. strictly stable (mu = 0) noise:
/// same alpha, scale (sum_i |a_i|^alpha)^(1/alpha) * gamma, still centered.
inline StableParams aggregate_params(std::span<const double> coefficients,
                                     const StableParams& params) {
  params.validate();
  if (params.mu != 0.0) {
    throw std::invalid_argument(
        "aggregate_params: requires mu = 0 (strictly stable case only)");
  }
  if (coefficients.empty()) {
    throw std::invalid_argument("aggregate_params: coefficients must be non-empty");
  }
  double power_sum = 0.0;
  for (double a : coefficients) power_sum += std::pow(std::abs(a), params.alpha);
  if (!(power_sum > 0.0)) {
    throw std::invalid_argument("aggregate_params: coefficients must not all be zero");
  }
  return {params.alpha, std::pow(power_sum, 1.0 / params.alpha) * params.gamma, 0.0};
}

// JSON wire format: {"kind": "sas"|"laplace"|"gaussian"} plus exactly the
// fields for that kind (alpha+gamma, b, or sigma).
inline void to_json(nlohmann::json& j, const MechanismSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case MechanismSpec::Kind::kSas:
      j = {{"kind", "sas"},
           {"alpha", spec.sas_params.alpha},
           {"gamma", spec.sas_params.gamma}};
      return;
    case MechanismSpec::Kind::kLaplace:
      j = {{"kind", "laplace"}, {"b", spec.laplace_b}};
      return;
    case MechanismSpec::Kind::kGaussian:
      j = {{"kind", "gaussian"}, {"sigma", spec.gaussian_sigma}};
      return;
  }
}

inline void from_json(const nlohmann::json& j, MechanismSpec& spec) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw std::invalid_argument("mechanism spec: expected object with string 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  auto require_keys = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : j.items()) {
      bool known = key == "kind";
      for (const char* k : keys) known = known || key == k;
      if (!known) {
        throw std::invalid_argument("mechanism spec: unexpected field '" + key +
                                    "' for kind '" + kind + "'");
      }
    }
    for (const char* k : keys) {
      if (!j.contains(k) || !j.at(k).is_number()) {
        throw std::invalid_argument("mechanism spec: kind '" + kind +
                                    "' requires numeric field '" + std::string(k) + "'");
      }
    }
  };
  if (kind == "sas") {
    require_keys({"alpha", "gamma"});
    spec = MechanismSpec::sas(j.at("alpha").get<double>(), j.at("gamma").get<double>());
  } else if (kind == "laplace") {
    require_keys({"b"});
    spec = MechanismSpec::laplace(j.at("b").get<double>());
  } else if (kind == "gaussian") {
    require_keys({"sigma"});
    spec = MechanismSpec::gaussian(j.at("sigma").get<double>());
  } else {
    throw std::invalid_argument("mechanism spec: unknown kind '" + kind + "'");
  }
}

}  // namespace sasdp
