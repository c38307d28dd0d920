#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "omlab/fourier_field.hpp"

namespace testing {

using omlab::Complex;
using omlab::FourierField;
using omlab::Mode;
using omlab::TorusSpec;

/// Field with independent coefficients of size ~ amplitude * (1+|k|)^-decay.
inline FourierField random_field(const TorusSpec& torus, int cutoff, unsigned seed,
                                 double amplitude = 1.0, double decay = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FourierField f(torus, cutoff);
  const auto& box = f.box();
  for (std::size_t i = 0; i < box.zero_index(); ++i) {
    const Mode k = box.mode(i);
    const double s = amplitude * std::pow(1.0 + std::sqrt(omlab::euclid_norm_sq(k)), -decay);
    f.set_mode(k, Complex(s * normal(rng), s * normal(rng)));
  }
  return f;
}

/// Direct trigonometric sum f(x) = mean + sum_k f_k exp(2 pi i k.x).
inline double evaluate(const FourierField& f, const std::array<double, 3>& x) {
  const auto& box = f.box();
  Complex s = f.mean();
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Complex c = f[i];
    if (c == Complex{}) continue;
    const Mode k = box.mode(i);
    const double phase = 2.0 * std::numbers::pi * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
    s += c * Complex(std::cos(phase), std::sin(phase));
  }
  return s.real();
}

/// Grid point j (axis 0 slowest) of an M^d grid, as coordinates in [0,1)^3.
inline std::array<double, 3> grid_point(int dim, int points, std::size_t j) {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = dim - 1; a >= 0; --a) {
    x[static_cast<std::size_t>(a)] = static_cast<double>(j % points) / points;
    j /= static_cast<std::size_t>(points);
  }
  return x;
}

/// Mean over a uniform M^d grid of g(x).
template <class F>
double grid_average(int dim, int points, F&& g) {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(points);
  double s = 0.0;
  for (std::size_t j = 0; j < total; ++j) s += g(grid_point(dim, points, j));
  return s / static_cast<double>(total);
}

inline double max_abs_diff(const FourierField& a, const FourierField& b) {
  double m = std::abs(a.mean() - b.mean());
  const FourierField& big = a.cutoff() >= b.cutoff() ? a : b;
  const auto& box = big.box();
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Mode k = box.mode(i);
    m = std::max(m, std::abs(a.coeff(k) - b.coeff(k)));
  }
  return m;
}

inline double max_abs(const FourierField& a) {
  double m = std::abs(a.mean());
  for (Complex c : a.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

/// Sample mean and its standard error.
struct Moments {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

inline Moments moments(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  const double m = s / static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size() - 1);
  return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

/// Sample variance with the standard error of the variance estimate, from
/// the fourth central moment.
inline Moments variance_with_error(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += x;
  const double m = s / n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return {m2 * n / (n - 1.0), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

}  // namespace testing
