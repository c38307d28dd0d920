#include "omlab/measures.hpp"

#include <cmath>
#include <stdexcept>

#include "omlab/fft.hpp"
#include "omlab/norms.hpp"

namespace omlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double quartic_mean(const FourierField& phi) {
  const GridField g = synthesize(phi, fft_size(4 * phi.cutoff() + 1));
  const double l4 = lp_norm(g, 4.0);
  return (l4 * l4) * (l4 * l4);
}

}  // namespace

double Phi4LevelModel::counterterm() const {
  return -counterterm_scale * std::log(static_cast<double>(level));
}

GibbsModel::GibbsModel(TorusSpec torus, int cutoff, Kind kind)
    : torus_(torus), cutoff_(cutoff), kind_(std::move(kind)) {
  if (cutoff < 1) throw std::invalid_argument("model cutoff must be >= 1");
  std::visit(Overloaded{
                 [](const GffModel&) {},
                 [&](const Phi4LineModel&) {
                   if (torus_.dim != 1) {
                     throw std::invalid_argument("the plain quartic model is one-dimensional");
                   }
                 },
                 [](const PPhi2Model& m) {
                   const int deg = static_cast<int>(m.coeffs.size()) - 1;
                   if (deg < 2 || deg % 2 != 0) {
                     throw std::invalid_argument("polynomial potential must have even degree >= 2");
                   }
                   if (deg > kMaxWickOrder) {
                     throw std::invalid_argument("polynomial degree exceeds the supported Wick order");
                   }
                   if (!(m.coeffs.back() > 0.0)) {
                     throw std::invalid_argument("leading coefficient must be strictly positive");
                   }
                 },
                 [&](const Phi4LevelModel& m) {
                   if (m.level < 1 || m.level > cutoff_) {
                     throw std::invalid_argument("renormalisation level must lie in [1, cutoff]");
                   }
                   if (!(m.counterterm_scale > 0.0)) {
                     throw std::invalid_argument("counterterm scale must be positive");
                   }
                 },
             },
             kind_);
  if (degree() > 0) variance_ = variance_constant(torus_, wick_level());
}

int GibbsModel::degree() const {
  return std::visit(Overloaded{
                        [](const GffModel&) { return 0; },
                        [](const Phi4LineModel&) { return 4; },
                        [](const PPhi2Model& m) { return static_cast<int>(m.coeffs.size()) - 1; },
                        [](const Phi4LevelModel&) { return 4; },
                    },
                    kind_);
}

int GibbsModel::wick_level() const {
  if (const auto* m = std::get_if<Phi4LevelModel>(&kind_)) return m->level;
  return cutoff_;
}

std::string GibbsModel::name() const {
  return std::visit(Overloaded{
                        [](const GffModel&) { return std::string("gff"); },
                        [](const Phi4LineModel&) { return std::string("phi4_1"); },
                        [](const PPhi2Model&) { return std::string("pphi2"); },
                        [](const Phi4LevelModel&) { return std::string("phi4_3_level"); },
                    },
                    kind_);
}

CameronMartinShift::CameronMartinShift(FourierField shift) : z(std::move(shift)), norm_sq(0.0) {
  const double h = h10_norm(z);
  norm_sq = h * h;
}

FourierField sample_gff(const TorusSpec& torus, int cutoff, Rng& rng) {
  FourierField f(torus, cutoff);
  const ModeBox& box = f.box();
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t zero = box.zero_index();
  for (std::size_t i = 0; i < zero; ++i) {
    const double sd = std::sqrt(0.5 / torus.eigenvalue(box.mode(i)));
    const double re = sd * normal(rng);
    const double im = sd * normal(rng);
    f.raw(i) = Complex(re, im);
    f.raw(box.mirror(i)) = Complex(re, -im);
  }
  return f;
}

double cm_log_weight(const CameronMartinShift& shift, const FourierField& phi) {
  const FourierField& z = shift.z;
  if (z.cutoff() > phi.cutoff()) {
    throw std::invalid_argument("shift cutoff exceeds the sampled field's cutoff");
  }
  const ModeBox& zb = z.box();
  const ModeBox& pb = phi.box();
  const bool same = z.cutoff() == phi.cutoff();
  double s = 0.0;
  for (std::size_t i = 0; i < zb.size(); ++i) {
    const Complex c = z[i];
    if (c == Complex{}) continue;
    const Mode k = zb.mode(i);
    const Complex p = same ? phi[i] : phi[pb.index(k)];
    s += z.torus().eigenvalue(k) * (c * std::conj(p)).real();
  }
  return -s - 0.5 * shift.norm_sq;
}

double potential(const GibbsModel& model, const FourierField& phi) {
  return std::visit(
      Overloaded{
          [](const GffModel&) { return 0.0; },
          [&](const Phi4LineModel&) { return 0.25 * quartic_mean(phi); },
          [&](const PPhi2Model& m) {
            const FourierField base = project(phi, model.cutoff());
            const auto means =
                wick_power_means(base, static_cast<int>(m.coeffs.size()) - 1, model.variance());
            double v = 0.0;
            for (std::size_t j = 0; j < m.coeffs.size(); ++j) v += m.coeffs[j] * means[j];
            return v;
          },
          [&](const Phi4LevelModel& m) {
            const FourierField base = project(phi, m.level);
            const auto means = wick_power_means(base, 4, model.variance());
            const double quad = m.wick_ordered_counterterm ? means[2] : means[2] + model.variance();
            return 0.25 * (means[4] - m.counterterm() * quad);
          },
      },
      model.kind());
}

double potential(const GibbsModel& model, const WickBundle& bundle) {
  if (model.degree() > 0 && bundle.max_order() < model.degree()) {
    throw std::invalid_argument("Wick bundle does not reach the model's degree");
  }
  if (model.degree() > 0 && bundle.level() != model.wick_level()) {
    throw std::invalid_argument("Wick bundle level does not match the model");
  }
  return std::visit(
      Overloaded{
          [](const GffModel&) { return 0.0; },
          [&](const Phi4LineModel&) { return 0.25 * quartic_mean(bundle.base()); },
          [&](const PPhi2Model& m) {
            double v = m.coeffs[0];
            for (std::size_t j = 1; j < m.coeffs.size(); ++j) {
              v += m.coeffs[j] * bundle.power(static_cast<int>(j)).mean();
            }
            return v;
          },
          [&](const Phi4LevelModel& m) {
            const double m2 = bundle.power(2).mean();
            const double quad = m.wick_ordered_counterterm ? m2 : m2 + bundle.variance();
            return 0.25 * (bundle.power(4).mean() - m.counterterm() * quad);
          },
      },
      model.kind());
}

std::vector<WeightedSample> sample_batch(const GibbsModel& model, std::size_t count,
                                         std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_stream(seed, stream);
  std::vector<WeightedSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    FourierField phi = sample_gff(model.torus(), model.cutoff(), rng);
    const double lw = -potential(model, phi);
    out.push_back({std::move(phi), lw});
  }
  return out;
}

}  // namespace omlab
