#pragma once

// Privacy-loss evaluation and numerical privacy-budget estimation for
// additive SaS noise on bounded queries.
//
// The loss of an observation x under neighboring query responses mu1, mu2 is
// the log-ratio of the two output densities; the budget epsilon is the
// supremum of its magnitude over all observations. For alpha in [1, 2) that
// supremum is finite (the tails of the log-ratio decay to zero); at
// alpha = 2 the Gaussian loss is affine in x and the budget diverges, which
// is reported as an explicit "unbounded" outcome rather than a number.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sasdp/errors.hpp"
#include "sasdp/stable.hpp"

namespace sasdp {

/// Expanding-grid search controls for the budget estimator.
struct SearchConfig {
  double initial_radius = 20.0;
  double growth_factor = 4.0;
  int grid_points = 2048;
  double refine_tol = 1e-6;
  double divergence_slope_threshold = 10.0;
  double max_radius = 1e8;

  static SearchConfig defaults(double gamma, double sensitivity) {
    SearchConfig s;
    s.initial_radius = 10.0 * (sensitivity + gamma);
    s.max_radius = 1e8 * gamma;
    return s;
  }

  void validate() const {
    if (!(initial_radius > 0.0) || !(refine_tol > 0.0) ||
        !(divergence_slope_threshold > 0.0) || !(max_radius > 0.0)) {
      throw std::invalid_argument("SearchConfig: all fields must be positive");
    }
    if (!(growth_factor > 1.0)) {
      throw std::invalid_argument("SearchConfig: growth_factor must exceed 1");
    }
    if (grid_points < 16) {
      throw std::invalid_argument("SearchConfig: grid_points must be >= 16");
    }
  }
};

/// Budget-estimation result. epsilon is empty when the loss diverges
/// (no finite budget exists; the mechanism is only approximately private).
struct PrivacyReport {
  std::optional<double> epsilon;
  std::optional<double> argmax_x;
  std::vector<std::pair<double, double>> loss_curve;  // (x, signed loss)
  double search_radius_used = 0.0;

  bool unbounded() const { return !epsilon.has_value(); }
};

/// One affine constraint p_coeff * p + q_coeff * q >= rhs on the adversary's
/// false-positive rate p and false-negative rate q.
struct AffineBound {
  double p_coeff;
  double q_coeff;
  double rhs;
};

/// Wasserman-Zhou hypothesis-testing consequence of an epsilon budget.
struct HypothesisBound {
  double epsilon;
  double p_plus_q_lower;  // p + q >= 2 / (1 + e^epsilon)
  AffineBound single_inequalities[2];
};

/// Log-ratio of the output densities at observation x when the query answered
/// mu1 on one dataset and mu2 on its neighbor. Antisymmetric in (mu1, mu2).
inline double privacy_loss_scalar(double x, const StableParams& params, double mu1,
                                  double mu2, const EvalConfig& config = {}) {
  params.validate();
  if (!std::isfinite(mu1) || !std::isfinite(mu2)) {
    throw std::invalid_argument("privacy_loss_scalar: query responses must be finite");
  }
  const StableParams p1{params.alpha, params.gamma, mu1};
  const StableParams p2{params.alpha, params.gamma, mu2};
  return log_density(x, p1, config) - log_density(x, p2, config);
}

/// Joint i.i.d. loss: the sum of per-coordinate log-ratios.
inline double privacy_loss_vector(std::span<const double> x, const StableParams& params,
                                  std::span<const double> f1, std::span<const double> f2,
                                  const EvalConfig& config = {}) {
  if (x.empty() || x.size() != f1.size() || x.size() != f2.size()) {
    throw std::invalid_argument("privacy_loss_vector: dimension mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += privacy_loss_scalar(x[i], params, f1[i], f2[i], config);
  }
  return total;
}

/// Conservative budget for an m-dimensional release: m times the worst
/// single-coordinate budget. Loose next to the exact additive loss above;
/// kept as the quick upper bound when only the dimension is known.
inline double vector_budget_bound(std::size_t m, double scalar_epsilon) {
  if (m < 1) throw std::invalid_argument("vector_budget_bound: m must be >= 1");
  if (!(scalar_epsilon >= 0.0)) {
    throw std::invalid_argument("vector_budget_bound: scalar budget must be nonnegative");
  }
  return static_cast<double>(m) * scalar_epsilon;
}

namespace detail {

// Signed standardized loss: gamma = 1, neighbor responses 0 and delta_hat.
inline double std_loss(double z, double alpha, double delta_hat,
                       const EvalConfig& config) {
  const StableParams p1{alpha, 1.0, 0.0};
  const StableParams p2{alpha, 1.0, delta_hat};
  return log_density(z, p1, config) - log_density(z, p2, config);
}

// Golden-section maximization of |loss| on [lo, hi].
inline double golden_max_abs_loss(double lo, double hi, double alpha, double delta_hat,
                                  double tol, const EvalConfig& config, double* arg_out) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = std::abs(std_loss(x1, alpha, delta_hat, config));
  double f2 = std::abs(std_loss(x2, alpha, delta_hat, config));
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = std::abs(std_loss(x2, alpha, delta_hat, config));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = std::abs(std_loss(x1, alpha, delta_hat, config));
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = std::abs(std_loss(xm, alpha, delta_hat, config));
  if (arg_out) *arg_out = xm;
  return std::max(fm, std::max(f1, f2));
}

}  // namespace detail

/// Numerical privacy budget of the SaS mechanism for a scalar query of
/// sensitivity `sensitivity`: the maximum of |loss| over observations, with
/// the worst-case neighbor pair (0, sensitivity). The search expands a
/// symmetric grid until the boundary loss is small and decaying (finite
/// budget, then refined by golden section) or grows past the divergence
/// threshold (unbounded, the alpha = 2 case).
inline PrivacyReport estimate_epsilon(double alpha, double gamma, double sensitivity,
                                      const SearchConfig& search, const EvalConfig& config = {}) {
  search.validate();
  config.validate();
  const StableParams probe{alpha, gamma, 0.0};
  probe.validate();
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    throw std::invalid_argument("estimate_epsilon: sensitivity must be positive");
  }

  // Work in standardized units: loss(x; gamma, delta) = loss(x/gamma; 1, delta/gamma).
  const double delta_hat = sensitivity / gamma;
  double radius = search.initial_radius / gamma;
  const double max_radius = search.max_radius / gamma;
  const int n = search.grid_points;

  double initial_boundary = -1.0;
  double prev_boundary = -1.0;

  while (true) {
    std::vector<std::pair<double, double>> curve(static_cast<std::size_t>(n));
    double grid_max = 0.0;
    int max_idx = 0;
    for (int i = 0; i < n; ++i) {
      const double z = -radius + 2.0 * radius * static_cast<double>(i) /
                                     static_cast<double>(n - 1);
      const double loss = detail::std_loss(z, alpha, delta_hat, config);
      curve[static_cast<std::size_t>(i)] = {gamma * z, loss};
      if (std::abs(loss) > grid_max) {
        grid_max = std::abs(loss);
        max_idx = i;
      }
    }
    const double boundary =
        std::max(std::abs(curve.front().second), std::abs(curve.back().second));
    const int inner_off = std::max(1, n / 64);
    const double near_boundary = std::max(
        std::abs(curve[static_cast<std::size_t>(inner_off)].second),
        std::abs(curve[static_cast<std::size_t>(n - 1 - inner_off)].second));
    if (initial_boundary < 0.0) initial_boundary = boundary;

    if (boundary < 0.5 * grid_max && boundary <= near_boundary) {
      // Decayed and decaying: the maximum is interior. Refine around it.
      const double h = 2.0 * radius / static_cast<double>(n - 1);
      const double lo = std::max(-radius, curve[static_cast<std::size_t>(
                                              std::max(0, max_idx - 1))].first / gamma);
      const double hi = std::min(radius, curve[static_cast<std::size_t>(std::min(
                                              n - 1, max_idx + 1))].first / gamma);
      double arg = 0.0;
      const double refined = detail::golden_max_abs_loss(
          lo, hi, alpha, delta_hat, std::min(search.refine_tol, h), config, &arg);
      PrivacyReport report;
      report.epsilon = std::max(refined, grid_max);
      report.argmax_x = gamma * arg;
      report.loss_curve = std::move(curve);
      report.search_radius_used = gamma * radius;
      return report;
    }

    if (prev_boundary >= 0.0 && boundary > prev_boundary &&
        boundary > search.divergence_slope_threshold * initial_boundary) {
      PrivacyReport report;  // unbounded: no epsilon, no argmax
      report.loss_curve = std::move(curve);
      report.search_radius_used = gamma * radius;
      return report;
    }

    prev_boundary = boundary;
    radius *= search.growth_factor;
    if (radius > max_radius) {
      throw SearchExhaustedError(
          "estimate_epsilon: max_radius reached without decay or divergence "
          "(alpha = " +
          std::to_string(alpha) + ")");
    }
  }
}

inline PrivacyReport estimate_epsilon(double alpha, double gamma, double sensitivity,
                                      const EvalConfig& config = {}) {
  return estimate_epsilon(alpha, gamma, sensitivity,
                          SearchConfig::defaults(gamma, sensitivity), config);
}

/// Inverts the budget: finds gamma with estimate_epsilon(alpha, gamma,
/// sensitivity) within tol of target_epsilon. Uses bisection on the
/// standardized ratio sensitivity/gamma, in which the budget is monotone
/// increasing.
inline double calibrate_gamma(double alpha, double sensitivity, double target_epsilon,
                              double tol = 1e-6, const EvalConfig& config = {}) {
  if (!(alpha >= 1.0) || !(alpha < 2.0)) {
    throw std::invalid_argument("calibrate_gamma: alpha must lie in [1, 2)");
  }
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("calibrate_gamma: sensitivity must be positive");
  }
  if (!(target_epsilon > 0.0)) {
    throw std::invalid_argument("calibrate_gamma: target_epsilon must be positive");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("calibrate_gamma: tol must be positive");

  auto eps_at = [&](double ratio) {
    return *estimate_epsilon(alpha, 1.0, ratio, SearchConfig::defaults(1.0, ratio), config)
                .epsilon;
  };

  // Bracket the standardized ratio. Budgets vanish as the ratio does, so only
  // the upper end needs expanding.
  double lo = 0.0;
  double hi = 1.0;
  double eps_hi = eps_at(hi);
  while (eps_hi < target_epsilon) {
    hi *= 4.0;
    if (hi > 1e8) {
      throw BracketError("calibrate_gamma: target epsilon " +
                         std::to_string(target_epsilon) +
                         " not reachable within ratio bracket");
    }
    eps_hi = eps_at(hi);
  }

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = lo > 0.0 ? 0.5 * (lo + hi) : hi * 0.5;
    const double eps_mid = eps_at(mid);
    if (std::abs(eps_mid - target_epsilon) < tol) return sensitivity / mid;
    if (eps_mid < target_epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  throw BracketError("calibrate_gamma: bisection failed to reach tolerance");
}

/// Tightest delta making the approximate-DP inequality hold at budget
/// `epsilon` for the worst-case neighbor pair (0, sensitivity):
/// the positive-part integral of p1 - e^epsilon p2. Zero whenever epsilon
/// is at least the pure budget.
inline double delta_for_epsilon(const StableParams& params, double sensitivity,
                                double epsilon, const EvalConfig& config = {}) {
  params.validate();
  config.validate();
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("delta_for_epsilon: sensitivity must be positive");
  }
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("delta_for_epsilon: epsilon must be nonnegative");
  }
  const double alpha = params.alpha;
  const double delta_hat = sensitivity / params.gamma;
  const StableParams p1{alpha, 1.0, 0.0};
  const StableParams p2{alpha, 1.0, delta_hat};

  if (alpha == 2.0) {
    // Affine loss (delta_hat^2 - 2 delta_hat z) / 4 > epsilon on a half line.
    const double z0 = (delta_hat * delta_hat - 4.0 * epsilon) / (2.0 * delta_hat);
    const double d = cdf(z0, p1, config) - std::exp(epsilon) * cdf(z0, p2, config);
    return std::clamp(d, 0.0, 1.0);
  }

  // The loss is positive exactly on the near side of the midpoint; with
  // epsilon = 0 the whole half line contributes.
  if (epsilon == 0.0) {
    const double mid = 0.5 * delta_hat;
    return std::clamp(cdf(mid, p1, config) - cdf(mid, p2, config), 0.0, 1.0);
  }

  const PrivacyReport report =
      estimate_epsilon(alpha, 1.0, delta_hat, SearchConfig::defaults(1.0, delta_hat), config);
  if (!report.unbounded() && epsilon >= *report.epsilon) return 0.0;
  // The loss is antisymmetric about the midpoint; make sure we sit on the
  // positive peak, not its mirror image.
  double z_star = *report.argmax_x;
  if (detail::std_loss(z_star, alpha, delta_hat, config) < 0.0) {
    z_star = delta_hat - z_star;
  }
  const double peak = std::abs(detail::std_loss(z_star, alpha, delta_hat, config));
  if (epsilon >= peak) return 0.0;

  // {loss > epsilon} is an interval around the argmax; locate its edges by
  // bisection (the integrand vanishes there, so edge error is second order).
  auto loss_at = [&](double z) { return detail::std_loss(z, alpha, delta_hat, config); };
  auto edge = [&](double inside, double outside) {
    double a = inside, b = outside;
    for (int i = 0; i < 200 && std::abs(b - a) > 1e-12 * (1.0 + std::abs(a)); ++i) {
      const double m = 0.5 * (a + b);
      if (loss_at(m) > epsilon) {
        a = m;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };
  double left_out = z_star - 1.0;
  while (loss_at(left_out) > epsilon) left_out = z_star - 2.0 * (z_star - left_out);
  double right_out = 0.5 * delta_hat;  // loss(midpoint) = 0 < epsilon
  const double a = edge(z_star, left_out);
  const double b = edge(z_star, right_out);
  const double d = (cdf(b, p1, config) - cdf(a, p1, config)) -
                   std::exp(epsilon) * (cdf(b, p2, config) - cdf(a, p2, config));
  return std::clamp(d, 0.0, 1.0);
}

/// Wasserman-Zhou bounds at budget epsilon: p + e^eps q >= 1, e^eps p + q >= 1,
/// and their combination p + q >= 2 / (1 + e^eps).
inline HypothesisBound hypothesis_bounds(double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("hypothesis_bounds: epsilon must be nonnegative");
  }
  const double e = std::exp(epsilon);
  return {epsilon,
          2.0 / (1.0 + e),
          {AffineBound{1.0, e, 1.0}, AffineBound{e, 1.0, 1.0}}};
}

}  // namespace sasdp
