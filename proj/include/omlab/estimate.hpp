#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "omlab/fourier_field.hpp"

namespace omlab {

/// Monte Carlo result. `value` is exp(log_value); the standard errors come from
/// batch means combined with the delta method.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double log_value = 0.0;
  double log_std_error = 0.0;
  std::size_t n_samples = 0;
  double ess = 0.0;
  bool degenerate = true;
};

struct SamplerOptions {
  std::size_t count = 100000;
  std::uint64_t seed = 1;
  int batches = 32;
  int threads = 0;  // 0: all hardware threads
};

/// Fewer effective samples than this in any weighted sum marks an estimate degenerate.
inline constexpr double kMinEffectiveSamples = 8.0;

/// What the sampling engine evaluates on each free-field draw.
struct SampleProgram {
  TorusSpec torus;
  int cutoff = 1;
  int gauges = 1;
  int weights = 1;
  /// Samples whose gauges are all >= r_max are not stored.
  double r_max = 1.0;
  /// Whether log-weights are also needed for unaccepted samples (for totals).
  bool weights_for_all = false;
  /// Writes `gauges` values; each may be capped at r_max.
  std::function<void(const FourierField& phi, double r_max, double* out)> gauge;
  /// Writes `weights` log-weights.
  std::function<void(const FourierField& phi, double* out)> log_weight;
};

/// A weighted sum S = sum over stored samples with gauge[g] < radius of exp(logw[w]).
/// g = -1 sums over every drawn sample (requires weights_for_all).
struct SumTerm {
  int gauge = 0;
  int weight = 0;
  double radius = 0.0;
  double coeff = 1.0;
};

/// Accepted samples of one run, grouped by batch.
class RecordSet {
 public:
  int batches() const { return batches_; }
  std::size_t n_samples() const { return n_samples_; }
  std::size_t n_stored() const { return batch_.size(); }
  int gauge_columns() const { return gauges_; }
  int weight_columns() const { return weights_; }

  double gauge(std::size_t row, int col) const { return gauge_[row * gauges_ + col]; }
  double log_weight(std::size_t row, int col) const { return logw_[row * weights_ + col]; }
  int batch(std::size_t row) const { return batch_[row]; }

  /// Estimate of L = sum_i coeff_i log S_i, reported as exp(L).
  Estimate combine(std::span<const SumTerm> terms) const;

  /// Runs the program on `options.count` draws split into independent batches.
  static RecordSet collect(const SampleProgram& program, const SamplerOptions& options);

 private:
  int batches_ = 0;
  std::size_t n_samples_ = 0;
  int gauges_ = 0;
  int weights_ = 0;
  std::vector<int> batch_;
  std::vector<double> gauge_;
  std::vector<double> logw_;
  // Per batch and weight column: log sum exp(w) and log sum exp(2w) over all draws.
  std::vector<double> total_lse_;
  std::vector<double> total_lse2_;
};

}  // namespace omlab
