#pragma once

#include <limits>
#include <string>
#include <vector>

#include "omlab/fourier_field.hpp"
#include "omlab/norms.hpp"

namespace omlab {

enum class BallKind { Plain, EnhancedP, Enhanced3D, FullyRenorm3D };

/// Norm used by plain balls: a Besov-Hoelder norm C^alpha or the sup norm.
enum class PlainNorm { Besov, Sup };

/// A (possibly enhanced) ball {phi : gauge(phi - center) < radius}.
///
/// Every kind is expressed through a gauge: the largest of its norm conditions,
/// each divided by the factor multiplying r in that condition (log n for the
/// cubic conditions of the three-dimensional kinds). The ball is the strict
/// sublevel set of the gauge at the radius.
struct BallSpec {
  BallKind kind = BallKind::Plain;
  double radius = 1.0;
  /// Plain: regularity of C^alpha. EnhancedP: the powers are measured in C^{-alpha}.
  double alpha = 0.0;
  PlainNorm plain_norm = PlainNorm::Besov;
  /// EnhancedP: polynomial degree 2k; powers 1..2k-1 are constrained.
  int degree = 4;
  /// Three-dimensional kinds: regularity loss and the finite level set.
  double kappa = 0.0;
  std::vector<int> levels;
  double counterterm_scale = 1.0;
  PartitionKind partition = PartitionKind::Smooth;
  FourierField center;

  static BallSpec plain(double alpha, double radius, FourierField center,
                        PlainNorm norm = PlainNorm::Besov);
  static BallSpec enhanced_2d(double alpha, double radius, FourierField center);
  static BallSpec enhanced_p(double alpha, double radius, int degree, FourierField center);
  static BallSpec enhanced_3d(double kappa, double radius, std::vector<int> levels,
                              FourierField center);
  static BallSpec fully_renormalized_3d(double kappa, double radius, std::vector<int> levels,
                                        double counterterm_scale, FourierField center);

  BallSpec with_radius(double r) const;
  BallSpec with_center(FourierField c) const;

  /// Throws std::invalid_argument when the spec is malformed.
  void validate() const;
};

std::string to_string(BallKind kind);

/// The ball's gauge of phi - center. Values at or above `cap` are only
/// guaranteed to be >= cap; below the cap the value is exact.
double gauge(const BallSpec& spec, const FourierField& phi,
             double cap = std::numeric_limits<double>::infinity());

/// gauge(spec, phi) < spec.radius.
bool contains(const BallSpec& spec, const FourierField& phi);

}  // namespace omlab
