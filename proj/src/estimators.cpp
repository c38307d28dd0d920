#include "omlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "omlab/fft.hpp"
#include "omlab/norms.hpp"
#include "omlab/parallel.hpp"
#include "omlab/wick.hpp"

namespace omlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

FourierField fit_to(const FourierField& z, const TorusSpec& torus, int cutoff, const char* what) {
  if (z.dim() != torus.dim) {
    throw std::invalid_argument(std::string(what) + " lives on a torus of another dimension");
  }
  if (z.spectral_extent() > cutoff) {
    throw std::invalid_argument(std::string(what) + " has modes beyond the working cutoff");
  }
  if (z.mean() != 0.0) throw std::invalid_argument(std::string(what) + " must have zero mean");
  FourierField out = z.resized(cutoff);
  if (out.torus() != torus) out = FourierField::from_modes(torus, cutoff, {}) + out;
  return out;
}

BallSpec centered_at_origin(const BallSpec& ball, const TorusSpec& torus, int cutoff) {
  return ball.with_center(FourierField(torus, cutoff));
}

// Log-weight of the ball around center z, sampled through the ball at the origin.
double shifted_log_weight(const GibbsModel& model, const CameronMartinShift& shift,
                          const FourierField& phi) {
  return -potential(model, phi + shift.z) + cm_log_weight(shift, phi);
}

Estimate ratio_at(const RecordSet& records, int num, int den, double r) {
  const SumTerm terms[] = {{0, num, r, 1.0}, {0, den, r, -1.0}};
  return records.combine(terms);
}

void check_level_schedule(const Schedule& schedule, const Options3D& setup) {
  if (schedule.max_level() > setup.cutoff) {
    throw std::invalid_argument("schedule levels exceed the working cutoff");
  }
  if (setup.ball.levels.empty() || setup.ball.levels.back() > setup.cutoff) {
    throw std::invalid_argument("ball levels exceed the working cutoff");
  }
}

}  // namespace

Estimate acceptance_rate(const BallSpec& spec, const GibbsModel& model,
                         const SamplerOptions& options) {
  SampleProgram prog;
  prog.torus = model.torus();
  prog.cutoff = model.cutoff();
  prog.gauges = 1;
  prog.weights = 1;
  prog.r_max = spec.radius;
  prog.weights_for_all = true;
  prog.gauge = [&](const FourierField& phi, double cap, double* out) {
    out[0] = gauge(spec, phi, cap);
  };
  prog.log_weight = [&](const FourierField& phi, double* out) { out[0] = -potential(model, phi); };
  const RecordSet records = RecordSet::collect(prog, options);
  const SumTerm terms[] = {{0, 0, spec.radius, 1.0}, {-1, 0, 0.0, -1.0}};
  Estimate est = records.combine(terms);
  if (records.n_stored() == 0) {
    est.value = 0.0;
    est.std_error = kNaN;
    est.degenerate = true;
  }
  return est;
}

Estimate om_ratio_direct(const GibbsModel& model, const BallSpec& ball1, const BallSpec& ball2,
                         const SamplerOptions& options) {
  SampleProgram prog;
  prog.torus = model.torus();
  prog.cutoff = model.cutoff();
  prog.gauges = 2;
  prog.weights = 1;
  prog.r_max = std::max(ball1.radius, ball2.radius);
  prog.gauge = [&](const FourierField& phi, double cap, double* out) {
    out[0] = gauge(ball1, phi, cap);
    out[1] = gauge(ball2, phi, cap);
  };
  prog.log_weight = [&](const FourierField& phi, double* out) { out[0] = -potential(model, phi); };
  const RecordSet records = RecordSet::collect(prog, options);
  const SumTerm terms[] = {{0, 0, ball1.radius, 1.0}, {1, 0, ball2.radius, -1.0}};
  return records.combine(terms);
}

Estimate om_ratio_recentered(const GibbsModel& model, const FourierField& z1,
                             const FourierField& z2, const BallSpec& ball_at_origin,
                             const SamplerOptions& options) {
  return om_limit_scan(model, z1, z2, ball_at_origin, {ball_at_origin.radius}, options)
      .rows.front()
      .estimate;
}

LimitScan om_limit_scan(const GibbsModel& model, const FourierField& z1, const FourierField& z2,
                        const BallSpec& ball, const std::vector<double>& r_values,
                        const SamplerOptions& options) {
  if (r_values.empty()) throw std::invalid_argument("om_limit_scan: no radii");
  for (std::size_t i = 1; i < r_values.size(); ++i) {
    if (!(r_values[i] < r_values[i - 1])) {
      throw std::invalid_argument("om_limit_scan: radii must be strictly decreasing");
    }
  }
  const TorusSpec& torus = model.torus();
  const int cutoff = model.cutoff();
  const CameronMartinShift s1(fit_to(z1, torus, cutoff, "z1"));
  const CameronMartinShift s2(fit_to(z2, torus, cutoff, "z2"));
  const BallSpec origin = centered_at_origin(ball, torus, cutoff).with_radius(r_values.front());

  SampleProgram prog;
  prog.torus = torus;
  prog.cutoff = cutoff;
  prog.gauges = 1;
  prog.weights = 2;
  prog.r_max = r_values.front();
  prog.gauge = [&](const FourierField& phi, double cap, double* out) {
    out[0] = gauge(origin, phi, cap);
  };
  prog.log_weight = [&](const FourierField& phi, double* out) {
    out[0] = shifted_log_weight(model, s1, phi);
    out[1] = shifted_log_weight(model, s2, phi);
  };
  const RecordSet records = RecordSet::collect(prog, options);

  LimitScan scan;
  const Prediction predicted = om_prediction(z1, z2, model);
  for (double r : r_values) {
    scan.rows.push_back({r, cutoff, ratio_at(records, 0, 1, r), predicted});
  }

  // Weighted least squares of log-ratio against r; intercept at r = 0.
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (const ScanRow& row : scan.rows) {
    const Estimate& e = row.estimate;
    if (e.degenerate || !std::isfinite(e.log_value)) continue;
    const double w = e.log_std_error > 0.0 ? 1.0 / (e.log_std_error * e.log_std_error) : 1.0;
    sw += w;
    sx += w * row.r;
    sy += w * e.log_value;
    sxx += w * row.r * row.r;
    sxy += w * row.r * e.log_value;
    ++used;
  }
  const double det = sw * sxx - sx * sx;
  if (used >= 2 && det > 0.0) {
    scan.extrapolated_log = (sxx * sy - sx * sxy) / det;
    scan.extrapolated_std_error = std::sqrt(sxx / det);
  } else {
    scan.extrapolated_log = kNaN;
    scan.extrapolated_std_error = kNaN;
  }
  return scan;
}

Schedule::Schedule(std::vector<double> r_values, std::vector<int> levels)
    : r_(std::move(r_values)), n_(std::move(levels)) {
  if (r_.empty() || r_.size() != n_.size()) {
    throw std::invalid_argument("schedule needs one level per radius");
  }
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (!(r_[i] > 0.0)) throw std::invalid_argument("schedule radii must be positive");
    if (n_[i] < 1) throw std::invalid_argument("schedule levels must be >= 1");
    if (i == 0) continue;
    if (!(r_[i] < r_[i - 1])) throw std::invalid_argument("schedule radii must decrease");
    const double prev = r_[i - 1] * std::log(static_cast<double>(n_[i - 1]));
    const double cur = r_[i] * std::log(static_cast<double>(n_[i]));
    if (!(cur < prev)) {
      throw std::invalid_argument("r log n(r) must be strictly decreasing along the schedule (r = " +
                                  std::to_string(r_[i]) + ")");
    }
  }
}

Schedule Schedule::square_root(std::vector<double> r_values) {
  std::vector<int> levels;
  levels.reserve(r_values.size());
  for (double r : r_values) {
    if (!(r > 0.0)) throw std::invalid_argument("schedule radii must be positive");
    levels.push_back(static_cast<int>(std::ceil(1.0 / std::sqrt(r) - 1e-12)));
  }
  return Schedule(std::move(r_values), std::move(levels));
}

int Schedule::max_level() const { return *std::max_element(n_.begin(), n_.end()); }

DegeneracyScan degeneracy_scan_3d(const FourierField& z, double r, const std::vector<int>& levels,
                                  const Options3D& setup, const SamplerOptions& options) {
  if (levels.empty()) throw std::invalid_argument("degeneracy scan needs levels");
  if (!std::is_sorted(levels.begin(), levels.end()) || levels.back() > setup.cutoff) {
    throw std::invalid_argument("degeneracy levels must be increasing and within the cutoff");
  }
  const TorusSpec torus(3);
  const int cutoff = setup.cutoff;
  const CameronMartinShift shift(fit_to(z, torus, cutoff, "z"));
  const CameronMartinShift none(FourierField(torus, cutoff));
  const BallSpec origin = centered_at_origin(setup.ball, torus, cutoff).with_radius(r);
  if (origin.levels.back() > cutoff) {
    throw std::invalid_argument("ball levels exceed the working cutoff");
  }
  std::vector<GibbsModel> models;
  for (int n : levels) {
    models.push_back(GibbsModel::phi4_level(torus, cutoff, n, setup.counterterm_scale));
  }

  SampleProgram prog;
  prog.torus = torus;
  prog.cutoff = cutoff;
  prog.gauges = 1;
  prog.weights = static_cast<int>(2 * levels.size());
  prog.r_max = r;
  prog.gauge = [&](const FourierField& phi, double cap, double* out) {
    out[0] = gauge(origin, phi, cap);
  };
  prog.log_weight = [&](const FourierField& phi, double* out) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      out[2 * i] = shifted_log_weight(models[i], shift, phi);
      out[2 * i + 1] = -potential(models[i], phi);
    }
  };
  const RecordSet records = RecordSet::collect(prog, options);

  DegeneracyScan scan;
  scan.r = r;
  const FourierField zero(torus, cutoff);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const int w = static_cast<int>(2 * i);
    scan.rows.push_back({r, levels[i], ratio_at(records, w, w + 1, r),
                         om_prediction(shift.z, zero, models[i])});
  }
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const int a = static_cast<int>(2 * i);
    const int b = a + 2;
    const SumTerm terms[] = {{0, b, r, 1.0}, {0, b + 1, r, -1.0}, {0, a, r, -1.0},
                             {0, a + 1, r, 1.0}};
    scan.steps.push_back(records.combine(terms));
  }
  if (levels.size() >= 2) {
    double mean_x = 0.0;
    for (int n : levels) mean_x += std::log(static_cast<double>(n));
    mean_x /= static_cast<double>(levels.size());
    double sxx = 0.0;
    for (int n : levels) sxx += std::pow(std::log(static_cast<double>(n)) - mean_x, 2);
    std::vector<SumTerm> terms;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double a = (std::log(static_cast<double>(levels[i])) - mean_x) / sxx;
      const int w = static_cast<int>(2 * i);
      terms.push_back({0, w, r, a});
      terms.push_back({0, w + 1, r, -a});
    }
    scan.slope = records.combine(terms);
  }
  return scan;
}

void check_compensation(const FourierField& z1, const FourierField& z2, const Schedule& schedule) {
  for (int n : schedule.levels()) {
    const double a = l2_norm(project(z1, n));
    const double b = l2_norm(project(z2, n));
    const double scale = std::max({a * a, b * b, 1e-300});
    if (std::abs(a * a - b * b) > 1e-9 * scale) {
      throw std::invalid_argument(
          "compensation hypothesis fails at level " + std::to_string(n) + ": |z1_n|^2 = " +
          std::to_string(a * a) + " but |z2_n|^2 = " + std::to_string(b * b) +
          " (log n times the difference must vanish)");
    }
  }
}

std::vector<ScanRow> joint_limit_ratio(const FourierField& z1, const FourierField& z2,
                                       const Schedule& schedule, const Options3D& setup,
                                       const SamplerOptions& options) {
  check_compensation(z1, z2, schedule);
  check_level_schedule(schedule, setup);
  const TorusSpec torus(3);
  const int cutoff = setup.cutoff;
  const CameronMartinShift s1(fit_to(z1, torus, cutoff, "z1"));
  const CameronMartinShift s2(fit_to(z2, torus, cutoff, "z2"));
  const double r_max = schedule.r(0);
  const BallSpec origin = centered_at_origin(setup.ball, torus, cutoff).with_radius(r_max);
  std::vector<GibbsModel> models;
  for (int n : schedule.levels()) {
    models.push_back(GibbsModel::phi4_level(torus, cutoff, n, setup.counterterm_scale));
  }

  SampleProgram prog;
  prog.torus = torus;
  prog.cutoff = cutoff;
  prog.gauges = 1;
  prog.weights = static_cast<int>(2 * models.size());
  prog.r_max = r_max;
  prog.gauge = [&](const FourierField& phi, double cap, double* out) {
    out[0] = gauge(origin, phi, cap);
  };
  prog.log_weight = [&](const FourierField& phi, double* out) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      out[2 * i] = shifted_log_weight(models[i], s1, phi);
      out[2 * i + 1] = shifted_log_weight(models[i], s2, phi);
    }
  };
  const RecordSet records = RecordSet::collect(prog, options);

  std::vector<ScanRow> rows;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const int w = static_cast<int>(2 * i);
    rows.push_back({schedule.r(i), schedule.n(i), ratio_at(records, w, w + 1, schedule.r(i)),
                    om_prediction(s1.z, s2.z, models[i])});
  }
  return rows;
}

double counterterm_residual(const FourierField& z1, const FourierField& z2, int n) {
  return third_difference_l2(project(z1, n), project(z2, n));
}

std::vector<ScanRow> third_order_ratio(const FourierField& z1, const FourierField& z2,
                                       const Schedule& schedule, const Options3D& setup,
                                       const SamplerOptions& options) {
  check_level_schedule(schedule, setup);
  const TorusSpec torus(3);
  const int cutoff = setup.cutoff;
  const FourierField a = fit_to(z1, torus, cutoff, "z1");
  const FourierField b = fit_to(z2, torus, cutoff, "z2");
  const std::vector<CameronMartinShift> shifts{
      CameronMartinShift(a), CameronMartinShift(b), CameronMartinShift(3.0 * a - 2.0 * b),
      CameronMartinShift(2.0 * a - b)};
  constexpr double kCoeffs[4] = {3.0, -1.0, 1.0, -3.0};

  // The C_n |z_n|^2 factors of the four balls cancel identically.
  for (int n : schedule.levels()) {
    double scale = 0.0;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      const double l2 = l2_norm(project(shifts[i].z, n));
      scale += std::abs(kCoeffs[i]) * l2 * l2;
    }
    const double residual = counterterm_residual(a, b, n);
    if (std::abs(residual) > 1e-10 * std::max(scale, 1.0)) {
      throw std::logic_error("counterterm cancellation failed at level " + std::to_string(n));
    }
  }

  const double r_max = schedule.r(0);
  const BallSpec origin = centered_at_origin(setup.ball, torus, cutoff).with_radius(r_max);
  std::vector<GibbsModel> models;
  for (int n : schedule.levels()) {
    models.push_back(GibbsModel::phi4_level(torus, cutoff, n, setup.counterterm_scale));
  }

  SampleProgram prog;
  prog.torus = torus;
  prog.cutoff = cutoff;
  prog.gauges = 1;
  prog.weights = static_cast<int>(4 * models.size());
  prog.r_max = r_max;
  prog.gauge = [&](const FourierField& phi, double cap, double* out) {
    out[0] = gauge(origin, phi, cap);
  };
  prog.log_weight = [&](const FourierField& phi, double* out) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      for (std::size_t c = 0; c < shifts.size(); ++c) {
        out[4 * i + c] = shifted_log_weight(models[i], shifts[c], phi);
      }
    }
  };
  const RecordSet records = RecordSet::collect(prog, options);

  const Prediction predicted = third_order_prediction(a, b);
  std::vector<ScanRow> rows;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    std::vector<SumTerm> terms;
    for (int c = 0; c < 4; ++c) {
      terms.push_back({0, static_cast<int>(4 * i) + c, schedule.r(i), kCoeffs[c]});
    }
    rows.push_back({schedule.r(i), schedule.n(i), records.combine(terms), predicted});
  }
  return rows;
}

Estimate wick_pairing_variance(const FourierField& f, int n, int p, const SamplerOptions& options) {
  if (n < 1) throw std::invalid_argument("wick_pairing_variance: level must be >= 1");
  if (options.batches < 2) throw std::invalid_argument("at least two batches are required");
  const auto n_batches = static_cast<std::size_t>(options.batches);
  if (options.count < n_batches) {
    throw std::invalid_argument("sample count must be at least the number of batches");
  }
  const TorusSpec& torus = f.torus();
  const double c = variance_constant(torus, n);
  // <H_p(phi), f> is the grid mean of a trigonometric polynomial of degree at most
  // p n + extent(f), which is exact on any grid with more points than that.
  const int extent = f.spectral_extent();
  const int points = fft_size(std::max({2 * n + 1, 2 * extent + 1, p * n + extent + 1}));
  const GridField fg = synthesize(f.resized(extent), points);
  std::vector<double> batch_sum(n_batches, 0.0);
  std::vector<std::size_t> batch_count(n_batches, 0);
  parallel_for(n_batches, options.threads, [&](std::size_t b) {
    const std::size_t count = options.count / n_batches + (b < options.count % n_batches ? 1 : 0);
    Rng rng = make_stream(options.seed, b);
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const GridField g = synthesize(sample_gff(torus, n, rng), points);
      double v = 0.0;
      for (std::size_t x = 0; x < g.values.size(); ++x) v += hermite(p, g.values[x], c) * fg.values[x];
      v /= static_cast<double>(g.values.size());
      s += v * v;
    }
    batch_sum[b] = s;
    batch_count[b] = count;
  });

  double total = 0.0;
  for (double s : batch_sum) total += s;
  const double mean = total / static_cast<double>(options.count);
  double spread = 0.0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    spread += std::pow(batch_sum[b] / static_cast<double>(batch_count[b]) - mean, 2);
  }
  const double bn = static_cast<double>(n_batches);
  Estimate est;
  est.value = mean;
  est.std_error = std::sqrt(spread / (bn - 1.0) / bn);
  est.log_value = std::log(mean);
  est.log_std_error = est.std_error / mean;
  est.n_samples = options.count;
  est.ess = static_cast<double>(options.count);
  est.degenerate = !(mean > 0.0);
  return est;
}

std::vector<RemainderRow> enhanced_remainder_scan(const FourierField& z, const BallSpec& ball,
                                                  const std::vector<double>& r_values,
                                                  const SamplerOptions& options) {
  if (r_values.empty()) throw std::invalid_argument("remainder scan needs radii");
  const TorusSpec& torus = z.torus();
  const int cutoff = z.cutoff();
  const double r_max = *std::max_element(r_values.begin(), r_values.end());
  const BallSpec origin = centered_at_origin(ball, torus, cutoff).with_radius(r_max);
  const CameronMartinShift shift(fit_to(z, torus, cutoff, "z"));
  const double c = variance_constant(torus, cutoff);
  const int points = fft_size(4 * cutoff + 1);
  const GridField zg = synthesize(shift.z, points);

  SampleProgram prog;
  prog.torus = torus;
  prog.cutoff = cutoff;
  prog.gauges = 1;
  prog.weights = 1;
  prog.r_max = r_max;
  prog.gauge = [&](const FourierField& phi, double cap, double* out) {
    out[0] = gauge(origin, phi, cap);
  };
  prog.log_weight = [&](const FourierField& phi, double* out) {
    const GridField pg = synthesize(phi, points);
    constexpr double kBinom[4] = {1.0, 4.0, 6.0, 4.0};
    double s = 0.0;
    for (std::size_t x = 0; x < pg.values.size(); ++x) {
      const double y = pg.values[x];
      const double w = zg.values[x];
      for (int m = 1; m <= 3; ++m) {
        const double sign = m % 2 == 0 ? 1.0 : -1.0;
        s += sign * kBinom[m] * hermite(m, y, c) * std::pow(w, 4 - m);
      }
    }
    const double pairing_term = s / static_cast<double>(pg.values.size());
    const double z_star = cm_log_weight(shift, phi) + 0.5 * shift.norm_sq;
    out[0] = 0.25 * pairing_term + z_star;
  };
  const RecordSet records = RecordSet::collect(prog, options);

  std::vector<RemainderRow> rows;
  for (double r : r_values) {
    RemainderRow row;
    row.r = r;
    for (std::size_t i = 0; i < records.n_stored(); ++i) {
      if (records.gauge(i, 0) < r) {
        ++row.accepted;
        row.sup = std::max(row.sup, std::abs(records.log_weight(i, 0)));
      }
    }
    row.sup_over_r = row.sup / r;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace omlab
