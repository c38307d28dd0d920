#include "omlab/wick.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "omlab/norms.hpp"

namespace omlab {

namespace {

void check_order(int p) {
  if (p < 0 || p > kMaxWickOrder) {
    throw std::invalid_argument("Wick order must lie in [0, " + std::to_string(kMaxWickOrder) +
                                "], got " + std::to_string(p));
  }
}

double binomial(int p, int m) {
  double b = 1.0;
  for (int i = 1; i <= m; ++i) b = b * static_cast<double>(p - m + i) / static_cast<double>(i);
  return b;
}

}  // namespace

double hermite(int p, double y, double c) {
  if (p < 0) throw std::invalid_argument("hermite: negative order");
  if (p == 0) return 1.0;
  double prev = 1.0;
  double cur = y;
  for (int q = 1; q < p; ++q) {
    const double next = y * cur - static_cast<double>(q) * c * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double variance_constant(const TorusSpec& torus, int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("variance_constant: cutoff must be >= 1");
  const ModeBox box(torus.dim, cutoff);
  const std::size_t zero = box.zero_index();
  double c = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (i != zero) c += 1.0 / torus.eigenvalue(box.mode(i));
  }
  return c;
}

int wick_grid_points(int n, int p) { return fft_size(2 * p * n + 1); }

FourierField wick_power(const FourierField& base, int p, double c) {
  check_order(p);
  const int n = base.cutoff();
  if (p == 0) {
    FourierField one(base.torus(), 0);
    one.set_mean(1.0);
    return one;
  }
  if (p == 1) return base;
  GridField g = synthesize(base, wick_grid_points(n, p));
  for (double& v : g.values) v = hermite(p, v, c);
  return analyze_with_mean(g, p * n);
}

std::vector<double> wick_power_means(const FourierField& base, int p_max, double c) {
  check_order(p_max);
  std::vector<double> means(static_cast<std::size_t>(p_max) + 1, 0.0);
  means[0] = 1.0;
  if (p_max == 0) return means;
  // A degree-p polynomial of a cutoff-n field has exact grid mean once M > p n.
  const int points = fft_size(std::max(2 * base.cutoff() + 1, p_max * base.cutoff() + 1));
  const GridField g = synthesize(base, points);
  for (double y : g.values) {
    double prev = 1.0;
    double cur = y;
    means[1] += cur;
    for (int q = 1; q < p_max; ++q) {
      const double next = y * cur - static_cast<double>(q) * c * prev;
      prev = cur;
      cur = next;
      means[static_cast<std::size_t>(q) + 1] += cur;
    }
  }
  const double inv = 1.0 / static_cast<double>(g.values.size());
  for (std::size_t p = 1; p < means.size(); ++p) means[p] *= inv;
  return means;
}

WickBundle::WickBundle(const FourierField& phi, int n, int p_max)
    : WickBundle(phi, n, p_max, variance_constant(phi.torus(), n)) {}

WickBundle::WickBundle(const FourierField& phi, int n, int p_max, double c) : level_(n), c_(c) {
  check_order(p_max);
  if (p_max < 1) throw std::invalid_argument("WickBundle needs at least the first power");
  const FourierField base = project(phi, n).resized(n);
  powers_.reserve(static_cast<std::size_t>(p_max));
  powers_.push_back(base);
  for (int p = 2; p <= p_max; ++p) powers_.push_back(wick_power(base, p, c));
}

const FourierField& WickBundle::power(int p) const {
  if (p < 1 || p > max_order()) {
    throw std::out_of_range("WickBundle::power: order " + std::to_string(p) + " not available");
  }
  return powers_[static_cast<std::size_t>(p) - 1];
}

double wick_binomial_pairing(const FourierField& phi, const FourierField& z, int n, int p) {
  double total = 0.0;
  for (double t : wick_binomial_terms(phi, z, n, p)) total += t;
  return total;
}

std::vector<double> wick_binomial_terms(const FourierField& phi, const FourierField& z, int n, int p) {
  check_order(p);
  const double c = variance_constant(phi.torus(), n);
  const FourierField phi_n = project(phi, n).resized(n);
  const FourierField z_n = project(z, n).resized(n);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(p) + 1);
  for (int m = 0; m <= p; ++m) {
    const FourierField wm = wick_power(phi_n, m, c);
    // Ordinary power z_n^{p-m} is the Wick power with variance zero.
    const FourierField zq = wick_power(z_n, p - m, 0.0);
    const double sign = ((p - m) % 2 == 0) ? 1.0 : -1.0;
    terms.push_back(sign * binomial(p, m) * pairing(wm, zq));
  }
  return terms;
}

GridField green_kernel(const TorusSpec& torus, int cutoff, int points) {
  FourierField g(torus, cutoff);
  const ModeBox& box = g.box();
  const std::size_t zero = box.zero_index();
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (i != zero) g.raw(i) = Complex(1.0 / torus.eigenvalue(box.mode(i)), 0.0);
  }
  return synthesize(g, points);
}

}  // namespace omlab
