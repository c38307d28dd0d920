#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "omlab/fourier_field.hpp"

namespace omlab {

enum class PartitionKind { Smooth, Sharp };

/// Littlewood-Paley weights psi_j(k), j = -1..j_max, covering the box of a cutoff.
///
/// Smooth: psi_{-1}(k) = chi(|k|) and psi_j(k) = chi(|k|/2^{j+1}) - chi(|k|/2^j),
/// where chi is a C^2 quintic step equal to 1 on [0, 3/4] and 0 beyond 4/3.
/// Sharp: psi_{-1} keeps only the zero mode and psi_j is the indicator of
/// 2^j <= |k| < 2^{j+1}. In both cases the retained mean belongs to block -1.
class DyadicPartition {
 public:
  DyadicPartition(PartitionKind kind, int dim, int cutoff);

  PartitionKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  int j_max() const { return j_max_; }

  double weight(int j, const Mode& k) const;

  /// The smooth step chi used by the smooth partition.
  static double smooth_step(double t);

 private:
  PartitionKind kind_;
  int dim_;
  int cutoff_;
  int j_max_;
};

/// Delta_j f evaluated on a grid oversampled at least 4x beyond the block bandwidth.
GridField lp_block(const FourierField& f, int j, const DyadicPartition& partition);

/// sup_j 2^{j alpha} max_grid |Delta_j f|.
double besov_norm(const FourierField& f, double alpha,
                  PartitionKind kind = PartitionKind::Smooth);

/// Evaluates besov_norm(f, alpha) with pruning. If the norm is below `cap` the
/// result r satisfies max(r, floor) == max(norm, floor); otherwise r >= cap.
/// Blocks that provably cannot exceed `floor` are skipped, and the evaluation
/// stops as soon as some block is known to reach `cap`.
double besov_norm_bounded(const FourierField& f, double alpha, double floor, double cap,
                          PartitionKind kind = PartitionKind::Smooth);

/// sup |f|: exact up to rounding in one dimension (grid search refined by
/// Newton iteration), the maximum over a 2x oversampled grid otherwise.
double sup_norm(const FourierField& f);

/// sqrt(sum_k lambda_k |f_k|^2); massless unless the torus carries a mass.
double h10_norm(const FourierField& f);

/// Full L2 norm including the retained mean.
double l2_norm(const FourierField& f);

/// (M^{-d} sum |g|^p)^{1/p}; p = infinity gives the grid maximum.
double lp_norm(const GridField& g, double p);

/// <f, g> = sum_k f_k conj(g_k) + mean(f) mean(g), over the common modes.
double pairing(const FourierField& f, const FourierField& g);

}  // namespace omlab
