#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace omlab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

/// Integer wave vector; components beyond the torus dimension are zero.
using Mode = std::array<int, 3>;

/// Raised when a grid is too coarse to represent a band-limited quantity exactly.
class AliasingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unit-volume torus [0,1)^d with basis e_k(x) = exp(2 pi i k.x).
struct TorusSpec {
  int dim = 1;
  double mass = 0.0;

  TorusSpec() = default;
  TorusSpec(int d, double m = 0.0) : dim(d), mass(m) {
    if (d < 1 || d > 3) {
      throw std::invalid_argument("torus dimension must be 1, 2 or 3, got " + std::to_string(d));
    }
    if (!(m >= 0.0)) throw std::invalid_argument("torus mass must be nonnegative");
  }

  /// Laplacian eigenvalue 4 pi^2 |k|^2 + m.
  double eigenvalue(const Mode& k) const {
    return kFourPiSq * static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) + mass;
  }

  bool operator==(const TorusSpec&) const = default;
};

inline int box_norm(const Mode& k) {
  int m = 0;
  for (int c : k) m = std::max(m, c < 0 ? -c : c);
  return m;
}

inline double euclid_norm_sq(const Mode& k) {
  return static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

inline Mode negate(const Mode& k) { return {-k[0], -k[1], -k[2]}; }

/// Dense index over the box {k : max_i |k_i| <= cutoff} in d dimensions.
/// Axis 0 varies fastest; the zero mode sits at the centre.
class ModeBox {
 public:
  ModeBox() = default;
  ModeBox(int dim, int cutoff) : dim_(dim), cutoff_(cutoff), side_(2 * cutoff + 1) {
    if (cutoff < 0) throw std::invalid_argument("mode cutoff must be nonnegative");
    size_ = 1;
    for (int i = 0; i < dim; ++i) size_ *= static_cast<std::size_t>(side_);
  }

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  int side() const { return side_; }
  std::size_t size() const { return size_; }

  bool contains(const Mode& k) const {
    for (int i = 0; i < 3; ++i) {
      if (i < dim_) {
        if (k[i] < -cutoff_ || k[i] > cutoff_) return false;
      } else if (k[i] != 0) {
        return false;
      }
    }
    return true;
  }

  std::size_t index(const Mode& k) const {
    std::size_t idx = 0;
    for (int i = dim_ - 1; i >= 0; --i) {
      idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(k[i] + cutoff_);
    }
    return idx;
  }

  Mode mode(std::size_t idx) const {
    Mode k{0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
      k[i] = static_cast<int>(idx % static_cast<std::size_t>(side_)) - cutoff_;
      idx /= static_cast<std::size_t>(side_);
    }
    return k;
  }

  std::size_t zero_index() const { return index(Mode{0, 0, 0}); }

  /// Index of -k given the index of k (the box is centrally symmetric).
  std::size_t mirror(std::size_t idx) const { return size_ - 1 - idx; }

 private:
  int dim_ = 1;
  int cutoff_ = 0;
  int side_ = 1;
  std::size_t size_ = 1;
};

}  // namespace omlab
