#pragma once

#include <vector>

#include "omlab/action.hpp"
#include "omlab/balls.hpp"
#include "omlab/estimate.hpp"
#include "omlab/measures.hpp"

namespace omlab {

/// Weighted fraction of draws inside the ball. Zero acceptances give a
/// degenerate estimate with value 0 and undefined standard error.
Estimate acceptance_rate(const BallSpec& spec, const GibbsModel& model,
                         const SamplerOptions& options);

/// mu(B1) / mu(B2) from one shared set of self-normalised draws.
Estimate om_ratio_direct(const GibbsModel& model, const BallSpec& ball1, const BallSpec& ball2,
                         const SamplerOptions& options);

/// mu(B(z1)) / mu(B(z2)) computed by sampling the ball at the origin and
/// reweighting with exp(-V(phi + z_i) + cm_log_weight(z_i, phi)).
Estimate om_ratio_recentered(const GibbsModel& model, const FourierField& z1,
                             const FourierField& z2, const BallSpec& ball_at_origin,
                             const SamplerOptions& options);

struct ScanRow {
  double r = 0.0;
  int n = 0;
  Estimate estimate;
  Prediction predicted;
};

struct LimitScan {
  std::vector<ScanRow> rows;
  /// Weighted linear fit of the log-ratio in r, evaluated at r = 0. NaN when
  /// fewer than two rows are non-degenerate.
  double extrapolated_log = 0.0;
  double extrapolated_std_error = 0.0;
};

/// Recentered ratios for every radius, all computed from one sample set drawn
/// for the largest radius; `ball` fixes everything but the radius.
LimitScan om_limit_scan(const GibbsModel& model, const FourierField& z1, const FourierField& z2,
                        const BallSpec& ball, const std::vector<double>& r_values,
                        const SamplerOptions& options);

/// Radii r_i decreasing, paired with renormalisation levels n(r_i) such that
/// r log n(r) is strictly decreasing.
class Schedule {
 public:
  Schedule(std::vector<double> r_values, std::vector<int> levels);
  /// n(r) = ceil(r^{-1/2}).
  static Schedule square_root(std::vector<double> r_values);

  std::size_t size() const { return r_.size(); }
  double r(std::size_t i) const { return r_[i]; }
  int n(std::size_t i) const { return n_[i]; }
  int max_level() const;
  const std::vector<double>& r_values() const { return r_; }
  const std::vector<int>& levels() const { return n_; }

 private:
  std::vector<double> r_;
  std::vector<int> n_;
};

struct Options3D {
  int cutoff = 8;
  double counterterm_scale = 1.0;
  /// The ball's kind, regularity loss, levels and partition; center and radius are ignored.
  BallSpec ball = BallSpec::enhanced_3d(0.2, 1.0, {2, 4, 8}, FourierField(TorusSpec(3), 0));
};

struct DegeneracyScan {
  double r = 0.0;
  std::vector<ScanRow> rows;  // ratio mu_n(B(z)) / mu_n(B(0)) per level
  /// Paired estimates of log ratio(n_{i+1}) - log ratio(n_i) (log_value fields).
  std::vector<Estimate> steps;
  /// Least-squares slope of log ratio against log n (log_value fields).
  Estimate slope;
};

DegeneracyScan degeneracy_scan_3d(const FourierField& z, double r, const std::vector<int>& levels,
                                  const Options3D& setup, const SamplerOptions& options);

/// |z1_n|^2 - |z2_n|^2 relative to their size must vanish for every level of the
/// schedule; throws std::invalid_argument with the offending level otherwise.
void check_compensation(const FourierField& z1, const FourierField& z2, const Schedule& schedule);

std::vector<ScanRow> joint_limit_ratio(const FourierField& z1, const FourierField& z2,
                                       const Schedule& schedule, const Options3D& setup,
                                       const SamplerOptions& options);

/// 3|z1_n|^2 + |(3z1 - 2z2)_n|^2 - |z2_n|^2 - 3|(2z1 - z2)_n|^2.
double counterterm_residual(const FourierField& z1, const FourierField& z2, int n);

std::vector<ScanRow> third_order_ratio(const FourierField& z1, const FourierField& z2,
                                       const Schedule& schedule, const Options3D& setup,
                                       const SamplerOptions& options);

/// Monte Carlo estimate of E[<phi_n^{:p:}, f>^2] under the free field truncated
/// at level n, which is also the variance since every Wick power has mean zero.
/// The standard error comes from batch means.
Estimate wick_pairing_variance(const FourierField& f, int n, int p, const SamplerOptions& options);

struct RemainderRow {
  double r = 0.0;
  std::size_t accepted = 0;
  double sup = 0.0;  // max over draws in the ball of |remainder|
  double sup_over_r = 0.0;
};

/// For the quartic enhanced ball at the origin: the largest
/// |1/4 sum_{m=1}^{3} C(4,m) (-1)^m <phi^{:m:}, z^{4-m}> + z*(phi)| over free-field
/// draws inside the ball, per radius. Here z*(phi) = -sum_k lambda_k Re(z_k conj(phi_k)),
/// so that V(phi - z) - V(phi) - 1/4 int z^4 + z*(phi) is exactly this remainder and
/// exp(-z*(phi) - |z|^2_{H^1_0} / 2) is the density of the law of phi + z.
std::vector<RemainderRow> enhanced_remainder_scan(const FourierField& z, const BallSpec& ball,
                                                  const std::vector<double>& r_values,
                                                  const SamplerOptions& options);

}  // namespace omlab
