#include "omlab/fourier_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace omlab {

FourierField::FourierField(TorusSpec torus, int cutoff)
    : torus_(torus), box_(torus.dim, cutoff), coeffs_(box_.size()) {}

FourierField FourierField::from_modes(TorusSpec torus, int cutoff,
                                      std::span<const ModeAmplitude> modes) {
  FourierField f(torus, cutoff);
  for (const auto& m : modes) f.set_mode(m.k, f.coeff(m.k) + m.value);
  return f;
}

FourierField FourierField::cosine(TorusSpec torus, int cutoff, const Mode& k, double amplitude) {
  // sqrt(2) cos(2 pi k.x) = (e_k + e_{-k}) / sqrt(2)
  FourierField f(torus, cutoff);
  f.set_mode(k, Complex(amplitude / std::sqrt(2.0), 0.0));
  return f;
}

Complex FourierField::coeff(const Mode& k) const {
  if (!box_.contains(k)) return {};
  return coeffs_[box_.index(k)];
}

void FourierField::set_mode(const Mode& k, Complex value) {
  if (!box_.contains(k)) {
    throw std::out_of_range("mode outside the truncation box");
  }
  const std::size_t idx = box_.index(k);
  if (idx == box_.zero_index()) {
    throw std::invalid_argument("the zero mode is not a free coefficient; use set_mean");
  }
  coeffs_[idx] = value;
  coeffs_[box_.mirror(idx)] = std::conj(value);
}

FourierField FourierField::resized(int cutoff) const {
  FourierField out(torus_, cutoff);
  out.mean_ = mean_;
  const int n = std::min(cutoff, box_.cutoff());
  const ModeBox small(torus_.dim, n);
  for (std::size_t i = 0; i < small.size(); ++i) {
    const Mode k = small.mode(i);
    out.coeffs_[out.box_.index(k)] = coeffs_[box_.index(k)];
  }
  return out;
}

int FourierField::spectral_extent() const {
  int extent = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != Complex{}) extent = std::max(extent, box_norm(box_.mode(i)));
  }
  return extent;
}

bool FourierField::is_zero() const {
  if (mean_ != 0.0) return false;
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex c) { return c == Complex{}; });
}

void FourierField::accumulate(const FourierField& other, double sign) {
  if (other.torus_.dim != torus_.dim) {
    throw std::invalid_argument("cannot combine fields on tori of different dimension");
  }
  if (other.box_.cutoff() > box_.cutoff()) *this = resized(other.box_.cutoff());
  mean_ += sign * other.mean_;
  if (other.box_.cutoff() == box_.cutoff()) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += sign * other.coeffs_[i];
    return;
  }
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) {
    coeffs_[box_.index(other.box_.mode(i))] += sign * other.coeffs_[i];
  }
}

FourierField& FourierField::operator+=(const FourierField& other) {
  accumulate(other, 1.0);
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& other) {
  accumulate(other, -1.0);
  return *this;
}

FourierField& FourierField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  mean_ *= s;
  return *this;
}

FourierField project(const FourierField& f, int n) {
  if (n < 0) throw std::invalid_argument("project: negative cutoff");
  // Projecting above the field's own cutoff is the identity.
  if (n >= f.cutoff()) return f;
  return f.resized(n);
}

}  // namespace omlab
