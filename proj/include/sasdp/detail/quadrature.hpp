#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace sasdp::detail {

// 16-point Gauss-Legendre rule on [-1, 1], stored as the positive half
// (nodes are symmetric about zero).
inline constexpr std::array<double, 8> kGl16Nodes = {
    0.0950125098376374401853,  0.2816035507792589132305,
    0.4580167776572273863424,  0.6178762444026437484467,
    0.7554044083550030338951,  0.8656312023878317438805,
    0.9445750230732325760780,  0.9894009349916499325962};

inline constexpr std::array<double, 8> kGl16Weights = {
    0.1894506104550684962854,  0.1826034150449235888667,
    0.1691565193950025381893,  0.1495959888165767320815,
    0.1246289712555338720525,  0.0951585116824927848099,
    0.0622535239386478928628,  0.0271524594117540948518};

/// Gauss-Legendre 16 on a single panel [a, b].
template <typename F>
double gl16_panel(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGl16Nodes.size(); ++i) {
    const double dx = h * kGl16Nodes[i];
    sum += kGl16Weights[i] * (f(c - dx) + f(c + dx));
  }
  return h * sum;
}

/// Composite Gauss-Legendre 16 over [a, b] with n equal panels.
template <typename F>
double gl16_composite(F&& f, double a, double b, std::size_t n_panels) {
  const double w = (b - a) / static_cast<double>(n_panels);
  double sum = 0.0;
  for (std::size_t k = 0; k < n_panels; ++k) {
    sum += gl16_panel(f, a + w * static_cast<double>(k),
                      a + w * static_cast<double>(k + 1));
  }
  return sum;
}

/// Integrates f over [0, b] with panels geometrically graded toward 0.
/// Used for integrands whose higher derivatives blow up at the origin
/// (fractional powers t^alpha): each dyadic panel [b*2^-(k+1), b*2^-k]
/// sees a scale-free, analytic integrand.
template <typename F>
double gl16_graded_origin(F&& f, double b, int levels = 48) {
  double hi = b;
  double sum = 0.0;
  for (int k = 0; k < levels; ++k) {
    const double lo = hi * 0.5;
    sum += gl16_panel(f, lo, hi);
    hi = lo;
  }
  sum += gl16_panel(f, 0.0, hi);
  return sum;
}

}  // namespace sasdp::detail
