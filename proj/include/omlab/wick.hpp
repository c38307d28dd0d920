#pragma once

#include <vector>

#include "omlab/fft.hpp"
#include "omlab/fourier_field.hpp"

namespace omlab {

inline constexpr int kMaxWickOrder = 6;

/// Hermite polynomial with variance c: H_0 = 1, H_1 = y,
/// H_{p+1} = y H_p - p c H_{p-1}.
double hermite(int p, double y, double c);

/// c_N = sum over the nonzero modes of the box of 1/lambda_k.
double variance_constant(const TorusSpec& torus, int cutoff);

/// Grid size on which the complete degree-p polynomial of a cutoff-n field
/// (support up to p*n) is represented without aliasing.
int wick_grid_points(int n, int p);

/// The Wick power H_p(f(x), c) as a field with support up to p * cutoff(f).
/// The spatial mean is kept as the field's retained mean.
FourierField wick_power(const FourierField& base, int p, double c);

/// Means <H_p(f, c), 1> for p = 0..p_max, from a single grid evaluation.
std::vector<double> wick_power_means(const FourierField& base, int p_max, double c);

/// A truncated field together with its Wick powers 1..p_max at variance c.
class WickBundle {
 public:
  /// Projects phi to level n and uses c_n = variance_constant(torus, n).
  WickBundle(const FourierField& phi, int n, int p_max);
  /// As above with an explicit variance constant (e.g. for a shifted field).
  WickBundle(const FourierField& phi, int n, int p_max, double c);

  int level() const { return level_; }
  int max_order() const { return static_cast<int>(powers_.size()); }
  double variance() const { return c_; }
  const FourierField& base() const { return powers_.front(); }
  /// power(p) for 1 <= p <= max_order().
  const FourierField& power(int p) const;

 private:
  int level_;
  double c_;
  std::vector<FourierField> powers_;
};

/// sum_{m=0}^{p} C(p,m) (-1)^{p-m} <phi_n^{:m:}, z_n^{p-m}> with c = c_n, which
/// equals <(phi - z)_n^{:p:}, 1>. Each pairing is taken spectrally between the
/// exactly represented fields phi_n^{:m:} and z_n^{p-m}.
double wick_binomial_pairing(const FourierField& phi, const FourierField& z, int n, int p);

/// The individual signed terms of wick_binomial_pairing, indexed by m.
std::vector<double> wick_binomial_terms(const FourierField& phi, const FourierField& z, int n, int p);

/// G_N(x) = sum_k e_k(x)/lambda_k on an M^d grid.
GridField green_kernel(const TorusSpec& torus, int cutoff, int points);

}  // namespace omlab
