#include "omlab/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "omlab/measures.hpp"
#include "omlab/parallel.hpp"

namespace omlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

struct BatchRecords {
  std::vector<double> gauge;
  std::vector<double> logw;
  std::vector<double> lse;
  std::vector<double> lse2;
  std::size_t rows = 0;
};

}  // namespace

RecordSet RecordSet::collect(const SampleProgram& program, const SamplerOptions& options) {
  if (options.batches < 2) throw std::invalid_argument("at least two batches are required");
  if (options.count < static_cast<std::size_t>(options.batches)) {
    throw std::invalid_argument("sample count must be at least the number of batches");
  }
  if (program.gauges < 1 || program.weights < 0) {
    throw std::invalid_argument("sample program needs at least one gauge column");
  }
  const auto n_batches = static_cast<std::size_t>(options.batches);
  const auto g_cols = static_cast<std::size_t>(program.gauges);
  const auto w_cols = static_cast<std::size_t>(program.weights);
  std::vector<BatchRecords> per_batch(n_batches);

  parallel_for(n_batches, options.threads, [&](std::size_t b) {
    BatchRecords& rec = per_batch[b];
    rec.lse.assign(w_cols, kNegInf);
    rec.lse2.assign(w_cols, kNegInf);
    const std::size_t n = options.count / n_batches + (b < options.count % n_batches ? 1 : 0);
    Rng rng = make_stream(options.seed, b);
    std::vector<double> g(g_cols);
    std::vector<double> w(w_cols);
    for (std::size_t i = 0; i < n; ++i) {
      const FourierField phi = sample_gff(program.torus, program.cutoff, rng);
      program.gauge(phi, program.r_max, g.data());
      const bool accepted = *std::min_element(g.begin(), g.end()) < program.r_max;
      if (!accepted && !program.weights_for_all) continue;
      if (w_cols > 0) program.log_weight(phi, w.data());
      for (std::size_t c = 0; c < w_cols; ++c) {
        if (!std::isfinite(w[c])) throw std::runtime_error("non-finite log-weight");
        rec.lse[c] = log_add(rec.lse[c], w[c]);
        rec.lse2[c] = log_add(rec.lse2[c], 2.0 * w[c]);
      }
      if (!accepted) continue;
      rec.gauge.insert(rec.gauge.end(), g.begin(), g.end());
      rec.logw.insert(rec.logw.end(), w.begin(), w.end());
      ++rec.rows;
    }
  });

  RecordSet out;
  out.batches_ = options.batches;
  out.n_samples_ = options.count;
  out.gauges_ = program.gauges;
  out.weights_ = program.weights;
  for (std::size_t b = 0; b < n_batches; ++b) {
    const BatchRecords& rec = per_batch[b];
    out.batch_.insert(out.batch_.end(), rec.rows, static_cast<int>(b));
    out.gauge_.insert(out.gauge_.end(), rec.gauge.begin(), rec.gauge.end());
    out.logw_.insert(out.logw_.end(), rec.logw.begin(), rec.logw.end());
    out.total_lse_.insert(out.total_lse_.end(), rec.lse.begin(), rec.lse.end());
    out.total_lse2_.insert(out.total_lse2_.end(), rec.lse2.begin(), rec.lse2.end());
  }
  return out;
}

Estimate RecordSet::combine(std::span<const SumTerm> terms) const {
  const auto n_batches = static_cast<std::size_t>(batches_);
  Estimate est;
  est.n_samples = n_samples_;
  est.ess = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> sums(terms.size(), std::vector<double>(n_batches, 0.0));
  std::vector<double> totals(terms.size(), 0.0);
  std::vector<double> offsets(terms.size(), kNegInf);
  bool zero_pos = false;
  bool zero_neg = false;

  for (std::size_t t = 0; t < terms.size(); ++t) {
    const SumTerm& term = terms[t];
    if (term.weight < 0 || term.weight >= weights_ || term.gauge >= gauges_ || term.gauge < -1) {
      throw std::out_of_range("sum term refers to a missing column");
    }
    double squares = 0.0;
    if (term.gauge == -1) {
      for (std::size_t b = 0; b < n_batches; ++b) {
        offsets[t] = std::max(offsets[t], total_lse_[b * weights_ + term.weight]);
      }
      if (offsets[t] != kNegInf) {
        for (std::size_t b = 0; b < n_batches; ++b) {
          sums[t][b] = std::exp(total_lse_[b * weights_ + term.weight] - offsets[t]);
          squares += std::exp(total_lse2_[b * weights_ + term.weight] - 2.0 * offsets[t]);
        }
      }
    } else {
      for (std::size_t row = 0; row < batch_.size(); ++row) {
        if (gauge(row, term.gauge) < term.radius) {
          offsets[t] = std::max(offsets[t], log_weight(row, term.weight));
        }
      }
      if (offsets[t] != kNegInf) {
        for (std::size_t row = 0; row < batch_.size(); ++row) {
          if (gauge(row, term.gauge) < term.radius) {
            const double w = std::exp(log_weight(row, term.weight) - offsets[t]);
            sums[t][static_cast<std::size_t>(batch_[row])] += w;
            squares += w * w;
          }
        }
      }
    }
    for (double s : sums[t]) totals[t] += s;
    if (totals[t] > 0.0) {
      est.ess = std::min(est.ess, totals[t] * totals[t] / squares);
    } else {
      est.ess = 0.0;
      if (term.coeff > 0.0) zero_pos = true;
      if (term.coeff < 0.0) zero_neg = true;
    }
  }

  if (zero_pos || zero_neg) {
    est.degenerate = true;
    est.log_value = zero_pos && zero_neg ? std::numeric_limits<double>::quiet_NaN()
                    : zero_pos           ? kNegInf
                                         : std::numeric_limits<double>::infinity();
    est.value = std::exp(est.log_value);
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    est.log_std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }

  double log_value = 0.0;
  double coeff_sum = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (terms[t].coeff == 0.0) continue;
    log_value += terms[t].coeff * (offsets[t] + std::log(totals[t]));
    coeff_sum += terms[t].coeff;
  }
  const double u_bar = coeff_sum / static_cast<double>(n_batches);
  double var = 0.0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double u = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) u += terms[t].coeff * sums[t][b] / totals[t];
    var += (u - u_bar) * (u - u_bar);
  }
  var *= static_cast<double>(n_batches) / static_cast<double>(n_batches - 1);

  est.log_value = log_value;
  est.log_std_error = std::sqrt(var);
  est.value = std::exp(log_value);
  est.std_error = est.value * est.log_std_error;
  est.degenerate = est.ess < kMinEffectiveSamples;
  return est;
}

}  // namespace omlab
