#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "omlab/fourier_field.hpp"
#include "omlab/parallel.hpp"
#include "omlab/wick.hpp"

namespace omlab {

/// The reference Gaussian free field itself (zero potential).
struct GffModel {};

/// One-dimensional quartic model with the plain potential 1/4 int phi^4.
struct Phi4LineModel {};

/// Wick-ordered polynomial potential sum_j a_j <phi^{:j:}, 1> at the working cutoff.
struct PPhi2Model {
  std::vector<double> coeffs;  // a_0 .. a_{2k}
};

/// Renormalised quartic potential at level n:
/// 1/4 (<phi_n^{:4:}, 1> - C_n <phi_n^{:2:}, 1>) with C_n = -c log n.
struct Phi4LevelModel {
  int level = 2;
  double counterterm_scale = 1.0;
  /// When false the quadratic term uses the plain square phi_n^2; this only
  /// shifts the potential by a constant.
  bool wick_ordered_counterterm = true;

  double counterterm() const;
};

class GibbsModel {
 public:
  using Kind = std::variant<GffModel, Phi4LineModel, PPhi2Model, Phi4LevelModel>;

  GibbsModel(TorusSpec torus, int cutoff, Kind kind);

  static GibbsModel gff(TorusSpec torus, int cutoff) { return {torus, cutoff, GffModel{}}; }
  static GibbsModel phi4_line(int cutoff, double mass = 0.0) {
    return {TorusSpec(1, mass), cutoff, Phi4LineModel{}};
  }
  static GibbsModel pphi2(TorusSpec torus, int cutoff, std::vector<double> coeffs) {
    return {torus, cutoff, PPhi2Model{std::move(coeffs)}};
  }
  static GibbsModel phi4_level(TorusSpec torus, int cutoff, int level, double scale = 1.0) {
    return {torus, cutoff, Phi4LevelModel{level, scale, true}};
  }

  const TorusSpec& torus() const { return torus_; }
  int cutoff() const { return cutoff_; }
  const Kind& kind() const { return kind_; }

  /// Polynomial degree of the potential (0 for the free field).
  int degree() const;
  /// Level whose Wick powers the potential uses (the cutoff unless level-n model).
  int wick_level() const;
  /// Variance constant at wick_level().
  double variance() const { return variance_; }
  std::string name() const;

 private:
  TorusSpec torus_;
  int cutoff_;
  Kind kind_;
  double variance_ = 0.0;
};

/// A Cameron-Martin direction z with its cached squared norm sum_k lambda_k |z_k|^2.
struct CameronMartinShift {
  explicit CameronMartinShift(FourierField shift);

  FourierField z;
  double norm_sq;
};

/// A draw from the free field truncated to the box of the given cutoff.
FourierField sample_gff(const TorusSpec& torus, int cutoff, Rng& rng);

/// -sum_k lambda_k Re(z_k conj(phi_k)) - |z|^2 / 2: the log density of the law
/// of phi - z with respect to the law of phi, evaluated at phi.
double cm_log_weight(const CameronMartinShift& shift, const FourierField& phi);

/// The model's potential V(phi); the unnormalised log weight is -V.
double potential(const GibbsModel& model, const FourierField& phi);

/// V evaluated from precomputed Wick powers. The bundle must be at the model's
/// Wick level and carry powers up to the model's degree.
double potential(const GibbsModel& model, const WickBundle& bundle);

struct WeightedSample {
  FourierField phi;
  double log_weight;
};

/// `count` free-field samples from stream `stream` of `seed`, weighted by -V.
std::vector<WeightedSample> sample_batch(const GibbsModel& model, std::size_t count,
                                         std::uint64_t seed, std::uint64_t stream);

}  // namespace omlab
