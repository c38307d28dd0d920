#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "omlab/torus.hpp"

namespace omlab {

using Complex = std::complex<double>;

struct ModeAmplitude {
  Mode k;
  Complex value;
};

/// Band-limited real field on the torus, stored as Hermitian-symmetric Fourier
/// coefficients over the box max_i |k_i| <= cutoff. The zero-mode coefficient is
/// always zero; a separately retained mean carries the constant component that
/// Wick powers produce.
class FourierField {
 public:
  FourierField() = default;
  FourierField(TorusSpec torus, int cutoff);

  /// Builds a field from a list of modes. Each entry sets both k and -k
  /// (the latter to the conjugate value); the zero mode is rejected.
  static FourierField from_modes(TorusSpec torus, int cutoff, std::span<const ModeAmplitude> modes);
  static FourierField from_modes(TorusSpec torus, int cutoff,
                                 std::initializer_list<ModeAmplitude> modes) {
    return from_modes(torus, cutoff, std::span<const ModeAmplitude>(modes.begin(), modes.size()));
  }
  /// Amplitude * sqrt(2) * cos(2 pi k.x): the L2-normalised cosine along k.
  static FourierField cosine(TorusSpec torus, int cutoff, const Mode& k, double amplitude = 1.0);

  const TorusSpec& torus() const { return torus_; }
  int dim() const { return torus_.dim; }
  int cutoff() const { return box_.cutoff(); }
  const ModeBox& box() const { return box_; }
  std::size_t size() const { return coeffs_.size(); }

  Complex coeff(const Mode& k) const;
  Complex operator[](std::size_t idx) const { return coeffs_[idx]; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  double mean() const { return mean_; }

  void set_mode(const Mode& k, Complex value);
  void set_mean(double m) { mean_ = m; }

  /// Direct write to a box slot. Callers are responsible for Hermitian symmetry.
  Complex& raw(std::size_t idx) { return coeffs_[idx]; }

  /// Same field on a different cutoff: zero padding when larger, projection when smaller.
  FourierField resized(int cutoff) const;

  /// Largest max_i|k_i| carrying a nonzero coefficient (0 for a constant field).
  int spectral_extent() const;

  bool is_zero() const;

  FourierField& operator+=(const FourierField& other);
  FourierField& operator-=(const FourierField& other);
  FourierField& operator*=(double s);

  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(FourierField a, double s) { return a *= s; }
  friend FourierField operator*(double s, FourierField a) { return a *= s; }
  friend FourierField operator-(FourierField a) { return a *= -1.0; }

 private:
  void accumulate(const FourierField& other, double sign);

  TorusSpec torus_{};
  ModeBox box_{1, 0};
  std::vector<Complex> coeffs_ = std::vector<Complex>(1);
  double mean_ = 0.0;
};

/// Real samples of a field on the uniform grid x_j = j/M, axis 0 slowest.
struct GridField {
  TorusSpec torus{};
  int points = 1;  // M, grid points per dimension
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// P_n: keep modes with max_i|k_i| <= n (the retained mean is kept). Identity
/// when n is at least the field's cutoff.
FourierField project(const FourierField& f, int n);

}  // namespace omlab
