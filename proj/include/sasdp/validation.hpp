#pragma once

// Statistical validation suites: sampler goodness of fit, convolution
// closure, MAD bands, and the privacy-budget checks. These back the CLI's
// `validate` command and the acceptance tests.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "sasdp/mechanisms.hpp"
#include "sasdp/privacy.hpp"
#include "sasdp/sampling.hpp"
#include "sasdp/stable.hpp"

namespace sasdp {

/// Tabulated standardized SaS distribution function for cheap repeated
/// evaluation inside Kolmogorov-Smirnov loops. Linear interpolation on a
/// uniform grid over [0, tail_crossover] (symmetry handles z < 0, the series
/// tail handles |z| beyond), with grid error around 1e-6 -- far below any KS
/// critical value used here.
class CdfTable {
 public:
  explicit CdfTable(double alpha, const EvalConfig& config = {})
      : alpha_(alpha), config_(config), z_max_(config.tail_crossover) {
    const std::size_t n = 2501;
    dz_ = z_max_ / static_cast<double>(n - 1);
    table_.resize(n);
    const StableParams params{alpha_, 1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      table_[i] = cdf(dz_ * static_cast<double>(i), params, config_);
    }
  }

  double alpha() const { return alpha_; }

  /// F(z) for the standardized law (gamma = 1, mu = 0).
  double operator()(double z) const {
    if (z < 0.0) return 1.0 - (*this)(-z);
    if (z >= z_max_) {
      return cdf(z, {alpha_, 1.0, 0.0}, config_);  // series branch, cheap
    }
    const double pos = z / dz_;
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return table_[i] + frac * (table_[i + 1] - table_[i]);
  }

 private:
  double alpha_;
  EvalConfig config_;
  double z_max_;
  double dz_;
  std::vector<double> table_;
};

/// One pass/fail check inside a suite.
struct CheckResult {
  std::string name;
  bool pass;
  double statistic;
  double threshold;
  std::string detail;
  std::string seeds;  // seed and substream range the check consumed
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// KS goodness of fit of the SaS sampler against the numerical CDF:
/// for each alpha, 10^4 draws per substream, 100 substreams, requiring at
/// least 95 passes at the 99% level. Laplace gets a KS check against its
/// closed-form CDF and the Gaussian sampler a variance band.
inline SuiteReport run_sampler_suite(std::uint64_t seed) {
  SuiteReport report{"sampler", seed, {}};
  const double alphas[] = {1.0, 1.25, 1.5, 1.75, 2.0};
  const std::size_t n = 10000;
  const int reps = 100;
  const int required = 95;
  for (std::size_t ai = 0; ai < std::size(alphas); ++ai) {
    const double alpha = alphas[ai];
    const CdfTable table(alpha);
    int passes = 0;
    for (int rep = 0; rep < reps; ++rep) {
      RandomStream stream(seed, 1000 * (ai + 1) + static_cast<std::uint64_t>(rep));
      std::vector<double> xs(n);
      for (auto& v : xs) v = sample_standard_sas(alpha, stream);
      if (ks_statistic(std::move(xs), table).pass) ++passes;
    }
    report.checks.push_back({"sas_ks_alpha_" + detail::fmt_double(alpha),
                             passes >= required, static_cast<double>(passes),
                             static_cast<double>(required),
                             std::to_string(passes) + "/100 substreams passed KS at 99%",
                             "seed " + std::to_string(seed) + ", substreams " +
                                 std::to_string(1000 * (ai + 1)) + ".." +
                                 std::to_string(1000 * (ai + 1) + reps - 1)});
  }
  {
    RandomStream stream(seed, 9001);
    std::vector<double> xs(n);
    for (auto& v : xs) v = sample_laplace(1.0, stream);
    const auto ks = ks_statistic(std::move(xs), [](double x) {
      return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
    });
    report.checks.push_back({"laplace_ks", ks.pass, ks.statistic, ks.critical_value_99,
                             "KS vs closed-form Laplace CDF",
                             "seed " + std::to_string(seed) + ", substream 9001"});
  }
  {
    RandomStream stream(seed, 9002);
    const std::size_t m = 100000;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = sample_gaussian(1.0, stream);
      sum_sq += v * v;
    }
    const double var = sum_sq / static_cast<double>(m);
    report.checks.push_back({"gaussian_variance", std::abs(var - 1.0) < 0.02, var, 0.02,
                             "sample variance of 1e5 draws within 1 +- 0.02",
                             "seed " + std::to_string(seed) + ", substream 9002"});
  }
  return report;
}

/// Convolution closure: the empirical law of a X1 + b X2 against the
/// aggregated parameters (same alpha, scale (a^alpha + b^alpha)^(1/alpha)),
/// KS at the 99% level over 20 substreams with at least 18 passes, for
/// (a, b) in {(1,1), (2,1)} and alpha in {1, 1.5, 2}.
inline SuiteReport run_closure_suite(std::uint64_t seed) {
  SuiteReport report{"closure", seed, {}};
  const double alphas[] = {1.0, 1.5, 2.0};
  const double coeff_pairs[][2] = {{1.0, 1.0}, {2.0, 1.0}};
  const std::size_t n = 10000;
  for (std::size_t ai = 0; ai < std::size(alphas); ++ai) {
    const double alpha = alphas[ai];
    const CdfTable table(alpha);
    for (std::size_t ci = 0; ci < std::size(coeff_pairs); ++ci) {
      const double a = coeff_pairs[ci][0];
      const double b = coeff_pairs[ci][1];
      const double coeffs[] = {a, b};
      const StableParams agg = aggregate_params(coeffs, {alpha, 1.0, 0.0});
      int passes = 0;
      for (int rep = 0; rep < 20; ++rep) {
        RandomStream stream(seed, 100 * (10 * (ai + 1) + ci) + static_cast<std::uint64_t>(rep));
        std::vector<double> xs(n);
        for (auto& v : xs) {
          v = a * sample_standard_sas(alpha, stream) +
              b * sample_standard_sas(alpha, stream);
        }
        const auto ks =
            ks_statistic(std::move(xs), [&](double x) { return table(x / agg.gamma); });
        if (ks.pass) ++passes;
      }
      const std::uint64_t sub0 = 100 * (10 * (ai + 1) + ci);
      report.checks.push_back(
          {"closure_alpha_" + detail::fmt_double(alpha) + "_a" + detail::fmt_double(a) +
               "_b" + detail::fmt_double(b),
           passes >= 18, static_cast<double>(passes), 18.0,
           std::to_string(passes) + "/20 substreams passed KS at 99%",
           "seed " + std::to_string(seed) + ", substreams " + std::to_string(sub0) +
               ".." + std::to_string(sub0 + 19)});
    }
  }
  return report;
}

/// Monte Carlo MAD within 1% of the analytic values: SaS for
/// alpha in {1.2, 1.5, 1.8} and the Laplace/Gaussian baselines, n = 10^6.
inline SuiteReport run_mad_suite(std::uint64_t seed) {
  SuiteReport report{"mad", seed, {}};
  const std::size_t n = 1000000;
  auto check = [&](const std::string& name, const MechanismSpec& spec,
                   std::uint64_t substream) {
    RandomStream stream(seed, substream);
    const MadEstimate est = mad_monte_carlo(spec, n, stream);
    const double expected = mad_analytic(spec);
    const double rel = std::abs(est.estimate - expected) / expected;
    report.checks.push_back({name, rel < 0.01, rel, 0.01,
                             "estimate " + detail::fmt_double(est.estimate) + " vs " +
                                 detail::fmt_double(expected) + " (std_err " +
                                 detail::fmt_double(est.std_error) + ", mom " +
                                 detail::fmt_double(est.median_of_means) + ")",
                             "seed " + std::to_string(seed) + ", substream " +
                                 std::to_string(substream)});
  };
  check("mad_sas_alpha_1.2", MechanismSpec::sas(1.2, 1.0), 11);
  check("mad_sas_alpha_1.5", MechanismSpec::sas(1.5, 1.0), 12);
  check("mad_sas_alpha_1.8", MechanismSpec::sas(1.8, 1.0), 13);
  check("mad_laplace", MechanismSpec::laplace(1.0), 14);
  check("mad_gaussian", MechanismSpec::gaussian(1.0), 15);
  return report;
}

/// Numerical privacy checks: finite budgets with bounded loss curves and
/// decaying tails for alpha in [1, 2), the Cauchy closed-form budget pin,
/// Gaussian divergence with linear loss growth, scale invariance of the
/// budget, and monotonicity in the standardized sensitivity.
inline SuiteReport run_privacy_suite(std::uint64_t seed) {
  SuiteReport report{"privacy", seed, {}};
  const EvalConfig config;

  for (double alpha : {1.0, 1.25, 1.5, 1.75}) {
    const auto rep = estimate_epsilon(alpha, 1.0, 1.0);
    double curve_max = 0.0;
    for (const auto& [x, loss] : rep.loss_curve) curve_max = std::max(curve_max, std::abs(loss));
    const bool finite = !rep.unbounded();
    const bool bounded = finite && curve_max <= *rep.epsilon + 1e-6;
    const double l3 = std::abs(privacy_loss_scalar(1e3, {alpha, 1.0, 0.0}, 0.0, 1.0, config));
    const double l4 = std::abs(privacy_loss_scalar(1e4, {alpha, 1.0, 0.0}, 0.0, 1.0, config));
    const bool tail_ok = l4 < 0.05 && l4 < l3;
    report.checks.push_back({"budget_finite_alpha_" + detail::fmt_double(alpha),
                             finite && bounded && tail_ok,
                             finite ? *rep.epsilon : std::numeric_limits<double>::quiet_NaN(),
                             0.0,
                             "epsilon " + (finite ? detail::fmt_double(*rep.epsilon) : "inf") +
                                 ", curve max " + detail::fmt_double(curve_max) +
                                 ", |loss|(1e4) " + detail::fmt_double(l4),
                             "deterministic"});
  }

  {
    const auto rep = estimate_epsilon(1.0, 1.0, 1.0);
    const double expected = 2.0 * std::log((1.0 + std::sqrt(5.0)) / 2.0);
    const double err = std::abs(*rep.epsilon - expected);
    report.checks.push_back({"cauchy_budget_pin", err < 1e-4, err, 1e-4,
                             "epsilon " + detail::fmt_double(*rep.epsilon) + " vs 2 ln phi = " +
                                 detail::fmt_double(expected),
                             "deterministic"});
  }

  {
    const auto rep = estimate_epsilon(2.0, 1.0, 1.0);
    const double l10 = std::abs(privacy_loss_scalar(10.0, {2.0, 1.0, 0.0}, 0.0, 1.0, config));
    const double l100 = std::abs(privacy_loss_scalar(100.0, {2.0, 1.0, 0.0}, 0.0, 1.0, config));
    const double l1000 =
        std::abs(privacy_loss_scalar(1000.0, {2.0, 1.0, 0.0}, 0.0, 1.0, config));
    const bool linear = std::abs(l100 / l10 - 10.0) < 0.5 && std::abs(l1000 / l100 - 10.0) < 0.5;
    report.checks.push_back({"gaussian_divergence", rep.unbounded() && linear,
                             l1000 / l100, 10.0,
                             "unbounded, loss ratios " + detail::fmt_double(l100 / l10) +
                                 " and " + detail::fmt_double(l1000 / l100),
                             "deterministic"});
  }

  for (double alpha : {1.0, 1.5}) {
    const auto base = estimate_epsilon(alpha, 1.0, 1.0);
    double worst = 0.0;
    for (double c : {0.5, 2.0, 10.0}) {
      const auto scaled = estimate_epsilon(alpha, c, c);
      worst = std::max(worst, std::abs(*scaled.epsilon - *base.epsilon));
    }
    report.checks.push_back({"scale_invariance_alpha_" + detail::fmt_double(alpha),
                             worst <= 2e-6, worst, 2e-6,
                             "max |eps(c gamma, c delta) - eps| over c in {0.5, 2, 10}",
                             "deterministic"});
  }

  {
    double prev = 0.0;
    bool increasing = true;
    for (double ratio : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const auto rep = estimate_epsilon(1.5, 1.0, ratio);
      if (!(*rep.epsilon > prev)) increasing = false;
      prev = *rep.epsilon;
    }
    report.checks.push_back({"budget_monotone_in_sensitivity", increasing, prev, 0.0,
                             "epsilon strictly increasing over delta/gamma in "
                             "{0.25, 0.5, 1, 2, 4} at alpha = 1.5",
                             "deterministic"});
  }

  return report;
}

inline SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "sampler") return run_sampler_suite(seed);
  if (name == "closure") return run_closure_suite(seed);
  if (name == "mad") return run_mad_suite(seed);
  if (name == "privacy") return run_privacy_suite(seed);
  throw std::invalid_argument("unknown validation suite '" + name + "'");
}

}  // namespace sasdp
