#include "omlab/balls.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "omlab/wick.hpp"

namespace omlab {

namespace {

bool is_3d_kind(BallKind kind) {
  return kind == BallKind::Enhanced3D || kind == BallKind::FullyRenorm3D;
}

// Folds one norm condition ||f||_{C^alpha} < r * scale into the running gauge.
// Returns false once the running value has reached the cap.
bool fold(double& running, const FourierField& f, double alpha, double scale, double cap,
          PartitionKind partition) {
  const double v = besov_norm_bounded(f, alpha, running * scale, cap * scale, partition) / scale;
  running = std::max(running, v);
  return running < cap;
}

}  // namespace

BallSpec BallSpec::plain(double alpha, double radius, FourierField center, PlainNorm norm) {
  BallSpec s;
  s.kind = BallKind::Plain;
  s.alpha = alpha;
  s.radius = radius;
  s.plain_norm = norm;
  s.center = std::move(center);
  s.validate();
  return s;
}

BallSpec BallSpec::enhanced_2d(double alpha, double radius, FourierField center) {
  return enhanced_p(alpha, radius, 4, std::move(center));
}

BallSpec BallSpec::enhanced_p(double alpha, double radius, int degree, FourierField center) {
  BallSpec s;
  s.kind = BallKind::EnhancedP;
  s.alpha = alpha;
  s.radius = radius;
  s.degree = degree;
  s.center = std::move(center);
  s.validate();
  return s;
}

BallSpec BallSpec::enhanced_3d(double kappa, double radius, std::vector<int> levels,
                               FourierField center) {
  BallSpec s;
  s.kind = BallKind::Enhanced3D;
  s.kappa = kappa;
  s.radius = radius;
  s.levels = std::move(levels);
  s.center = std::move(center);
  s.validate();
  return s;
}

BallSpec BallSpec::fully_renormalized_3d(double kappa, double radius, std::vector<int> levels,
                                         double counterterm_scale, FourierField center) {
  BallSpec s = enhanced_3d(kappa, radius, std::move(levels), std::move(center));
  s.kind = BallKind::FullyRenorm3D;
  s.counterterm_scale = counterterm_scale;
  s.validate();
  return s;
}

BallSpec BallSpec::with_radius(double r) const {
  BallSpec s = *this;
  s.radius = r;
  s.validate();
  return s;
}

BallSpec BallSpec::with_center(FourierField c) const {
  BallSpec s = *this;
  s.center = std::move(c);
  return s;
}

void BallSpec::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (kind == BallKind::EnhancedP) {
    if (degree < 2 || degree % 2 != 0 || degree - 1 > kMaxWickOrder) {
      throw std::invalid_argument("enhanced ball degree must be even and at most 6");
    }
  }
  if (is_3d_kind(kind)) {
    if (levels.empty()) throw std::invalid_argument("three-dimensional ball needs levels");
    if (!std::is_sorted(levels.begin(), levels.end()) ||
        std::adjacent_find(levels.begin(), levels.end()) != levels.end()) {
      throw std::invalid_argument("ball levels must be strictly increasing");
    }
    if (levels.front() < 2) {
      throw std::invalid_argument("ball levels must be >= 2 so that log n > 0");
    }
    if (!(counterterm_scale > 0.0)) {
      throw std::invalid_argument("counterterm scale must be positive");
    }
  }
}

std::string to_string(BallKind kind) {
  switch (kind) {
    case BallKind::Plain:
      return "plain";
    case BallKind::EnhancedP:
      return "enhanced_p";
    case BallKind::Enhanced3D:
      return "enhanced_3d";
    case BallKind::FullyRenorm3D:
      return "fully_renormalized_3d";
  }
  return "unknown";
}

double gauge(const BallSpec& spec, const FourierField& phi, double cap) {
  if (spec.center.dim() != phi.dim()) {
    throw std::invalid_argument("ball center and field live on different tori");
  }
  if (spec.center.cutoff() > phi.cutoff() && spec.center.spectral_extent() > phi.cutoff()) {
    throw std::invalid_argument("ball center has modes beyond the field's cutoff");
  }
  const FourierField psi = phi - spec.center.resized(phi.cutoff());
  const PartitionKind part = spec.partition;

  switch (spec.kind) {
    case BallKind::Plain: {
      if (spec.plain_norm == PlainNorm::Sup) return sup_norm(psi);
      return besov_norm_bounded(psi, spec.alpha, 0.0, cap, part);
    }
    case BallKind::EnhancedP: {
      const double c = variance_constant(psi.torus(), psi.cutoff());
      double running = 0.0;
      if (!fold(running, psi, -spec.alpha, 1.0, cap, part)) return running;
      for (int p = 2; p < spec.degree; ++p) {
        if (!fold(running, wick_power(psi, p, c), -spec.alpha, 1.0, cap, part)) return running;
      }
      return running;
    }
    case BallKind::Enhanced3D:
    case BallKind::FullyRenorm3D: {
      if (spec.levels.back() > phi.cutoff()) {
        throw std::invalid_argument("field cutoff is below the ball's largest level");
      }
      std::vector<FourierField> parts;
      std::vector<double> variances;
      parts.reserve(spec.levels.size());
      for (int n : spec.levels) {
        parts.push_back(project(psi, n));
        variances.push_back(variance_constant(psi.torus(), n));
      }
      double running = 0.0;
      const double k = spec.kappa;
      for (const FourierField& part_n : parts) {
        if (!fold(running, part_n, -0.5 - k, 1.0, cap, part)) return running;
      }
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const FourierField sq = wick_power(parts[i], 2, variances[i]);
        if (!fold(running, sq, -1.0 - k, 1.0, cap, part)) return running;
      }
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const double log_n = std::log(static_cast<double>(spec.levels[i]));
        FourierField cube = wick_power(parts[i], 3, variances[i]);
        if (spec.kind == BallKind::FullyRenorm3D) {
          const double c_n = -spec.counterterm_scale * log_n;
          cube -= c_n * parts[i];
        }
        if (!fold(running, cube, -1.5 - k, log_n, cap, part)) return running;
      }
      return running;
    }
  }
  throw std::logic_error("unhandled ball kind");
}

bool contains(const BallSpec& spec, const FourierField& phi) {
  return gauge(spec, phi, spec.radius) < spec.radius;
}

}  // namespace omlab
