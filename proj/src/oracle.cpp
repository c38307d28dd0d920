#include "omlab/oracle.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "omlab/fft.hpp"
#include "omlab/norms.hpp"
#include "omlab/wick.hpp"

namespace omlab {

namespace {

using boost::math::quadrature::gauss;

constexpr int kMaxDof = 4;

// Coordinates x in R^D (D = 2 * cutoff) with x standard normal under the free field.
struct Coordinates {
  TorusSpec torus;
  int cutoff;
  int dof;
  std::array<double, kMaxDof> scale{};  // coefficient = x / sqrt(2 lambda_k)

  Coordinates(const TorusSpec& t, int n) : torus(t), cutoff(n), dof(2 * n) {
    for (int k = 1; k <= n; ++k) {
      const double s = 1.0 / std::sqrt(2.0 * t.eigenvalue({k, 0, 0}));
      scale[2 * k - 2] = s;
      scale[2 * k - 1] = s;
    }
  }

  FourierField field(const std::array<double, kMaxDof>& x) const {
    FourierField f(torus, cutoff);
    for (int k = 1; k <= cutoff; ++k) {
      f.set_mode({k, 0, 0}, Complex(x[2 * k - 2] * scale[2 * k - 2], x[2 * k - 1] * scale[2 * k - 1]));
    }
    return f;
  }

  std::array<double, kMaxDof> coords(const FourierField& f) const {
    std::array<double, kMaxDof> x{};
    for (int k = 1; k <= cutoff; ++k) {
      const Complex c = f.coeff({k, 0, 0});
      x[2 * k - 2] = c.real() / scale[2 * k - 2];
      x[2 * k - 1] = c.imag() / scale[2 * k - 1];
    }
    return x;
  }
};

// Gaussian mass along the ray c + t u, t in [0, t_max], with the Jacobian t^{D-1}.
double radial_mass(const std::array<double, kMaxDof>& c, const std::array<double, kMaxDof>& u,
                   int dof, double t_max) {
  double cc = 0.0;
  double cu = 0.0;
  for (int i = 0; i < dof; ++i) {
    cc += c[i] * c[i];
    cu += c[i] * u[i];
  }
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * dof);
  auto integrand = [&](double t) {
    return norm * std::exp(-0.5 * (cc + 2.0 * t * cu + t * t)) * std::pow(t, dof - 1);
  };
  // Beyond ~40 standard deviations from the center the density is negligible.
  const double t_end = std::min(t_max, std::sqrt(cc) + 40.0);
  const int pieces = 8;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = t_end * i / pieces;
    const double b = t_end * (i + 1) / pieces;
    total += gauss<double, 30>::integrate(integrand, a, b);
  }
  return total;
}

}  // namespace

double gaussian_ball_prob_lowdim(const TorusSpec& torus, int cutoff, const BallSpec& spec) {
  if (torus.dim != 1 || cutoff < 1 || cutoff > 2) {
    throw std::invalid_argument("low-dimensional oracle needs d = 1 and cutoff 1 or 2");
  }
  if (spec.kind != BallKind::Plain) {
    throw std::invalid_argument("low-dimensional oracle only handles plain balls");
  }
  if (spec.center.dim() != 1 || spec.center.spectral_extent() > cutoff) {
    throw std::invalid_argument("ball center must live in the truncated space");
  }
  const Coordinates coord(torus, cutoff);
  const auto c = coord.coords(spec.center.resized(cutoff));
  const BallSpec at_zero = spec.with_center(FourierField(torus, cutoff));

  auto ray = [&](const std::array<double, kMaxDof>& u) {
    const double g = gauge(at_zero, coord.field(u));
    const double t_max = g > 0.0 ? spec.radius / g : std::numeric_limits<double>::infinity();
    return radial_mass(c, u, coord.dof, t_max);
  };

  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (coord.dof == 2) {
    const int steps = 2048;
    double s = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double th = two_pi * i / steps;
      s += ray({std::cos(th), std::sin(th), 0.0, 0.0});
    }
    return s * two_pi / steps;
  }

  // Hyperspherical coordinates on S^3: dOmega = sin^2(t1) sin(t2) dt1 dt2 dt3.
  const int steps = 96;
  double total = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double t3 = two_pi * i / steps;
    auto over_t2 = [&](double t1) {
      auto inner = [&](double t2) {
        const std::array<double, kMaxDof> u{std::cos(t1), std::sin(t1) * std::cos(t2),
                                            std::sin(t1) * std::sin(t2) * std::cos(t3),
                                            std::sin(t1) * std::sin(t2) * std::sin(t3)};
        return std::sin(t2) * ray(u);
      };
      return std::sin(t1) * std::sin(t1) *
             gauss<double, 40>::integrate(inner, 0.0, std::numbers::pi);
    };
    total += gauss<double, 40>::integrate(over_t2, 0.0, std::numbers::pi);
  }
  return total * two_pi / steps;
}

double wick_pair_moment(int p, const FourierField& f, const FourierField& g, int cutoff) {
  if (p < 1 || p > kMaxWickOrder) throw std::invalid_argument("wick_pair_moment: bad order");
  if (f.dim() != g.dim()) throw std::invalid_argument("wick_pair_moment: dimension mismatch");
  const TorusSpec& torus = f.torus();
  GridField kernel = green_kernel(torus, cutoff, fft_size(2 * p * cutoff + 1));
  for (double& v : kernel.values) v = std::pow(v, p);
  const FourierField kp = analyze_with_mean(kernel, p * cutoff);
  const ModeBox& kb = kp.box();
  double s = f.mean() * g.mean() * kp.mean();
  for (std::size_t i = 0; i < kb.size(); ++i) {
    if (i == kb.zero_index()) continue;
    const Mode k = kb.mode(i);
    s += (f.coeff(k) * std::conj(g.coeff(k))).real() * kp[i].real();
  }
  double factorial = 1.0;
  for (int q = 2; q <= p; ++q) factorial *= q;
  return factorial * s;
}

double binomial_direct_check(const FourierField& phi, const FourierField& z, int n, int p) {
  double expansion = 0.0;
  for (double t : wick_binomial_terms(phi, z, n, p)) expansion += t;
  const double c = variance_constant(phi.torus(), n);
  const FourierField phi_n = project(phi, n).resized(n);
  const FourierField z_n = project(z, n).resized(n);
  // Cauchy-Schwarz bound on the terms; unlike their absolute sum it does not
  // collapse to rounding noise when every term vanishes by symmetry.
  double scale = 0.0;
  for (int m = 0; m <= p; ++m) {
    const FourierField wm = wick_power(phi_n, m, c);
    const FourierField zq = wick_power(z_n, p - m, 0.0);
    scale += boost::math::binomial_coefficient<double>(static_cast<unsigned>(p), static_cast<unsigned>(m)) * std::sqrt(pairing(wm, wm) * pairing(zq, zq));
  }
  const FourierField shifted = phi_n - z_n;
  const double direct = wick_power_means(shifted, p, c)[static_cast<std::size_t>(p)];
  if (scale == 0.0) scale = 1.0;
  return std::abs(expansion - direct) / scale;
}

}  // namespace omlab
