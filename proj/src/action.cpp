#include "omlab/action.hpp"

#include <cmath>
#include <stdexcept>
#include <variant>

#include "omlab/fft.hpp"
#include "omlab/norms.hpp"

namespace omlab {

namespace {

double gradient_part(const FourierField& z) {
  const double h = h10_norm(z);
  return 0.5 * h * h;
}

Prediction from_log(double log_value) { return {std::exp(log_value), log_value}; }

}  // namespace

ActionValue action_phi4(const FourierField& z) {
  const GridField g = synthesize(z, fft_size(4 * z.cutoff() + 1));
  const double l4 = lp_norm(g, 4.0);
  ActionValue a;
  a.quartic_part = 0.25 * (l4 * l4) * (l4 * l4);
  a.gradient_part = gradient_part(z);
  a.total = a.quartic_part + a.gradient_part;
  return a;
}

ActionValue action_p(const FourierField& z, std::span<const double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("action_p: empty polynomial");
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree % 2 != 0) throw std::invalid_argument("action_p: polynomial degree must be even");
  if (!(coeffs.back() > 0.0)) {
    throw std::invalid_argument("action_p: leading coefficient must be positive");
  }
  const GridField g = synthesize(z, fft_size(std::max(2 * z.cutoff() + 1, degree * z.cutoff() + 1)));
  double s = 0.0;
  for (double y : g.values) {
    double p = 0.0;
    for (int j = degree; j >= 0; --j) p = p * y + coeffs[static_cast<std::size_t>(j)];
    s += p;
  }
  ActionValue a;
  a.quartic_part = s / static_cast<double>(g.values.size());
  a.gradient_part = gradient_part(z);
  a.total = a.quartic_part + a.gradient_part;
  return a;
}

double model_action(const GibbsModel& model, const FourierField& z) {
  if (std::holds_alternative<GffModel>(model.kind())) return gradient_part(z);
  if (const auto* p = std::get_if<PPhi2Model>(&model.kind())) return action_p(z, p->coeffs).total;
  return action_phi4(z).total;
}

FourierField action_phi4_gradient(const FourierField& z) {
  GridField g = synthesize(z, fft_size(4 * z.cutoff() + 1));
  for (double& v : g.values) v = v * v * v;
  FourierField grad = analyze(g, z.cutoff());
  const ModeBox& box = z.box();
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (i == box.zero_index()) continue;
    grad.raw(i) += z.torus().eigenvalue(box.mode(i)) * z[i];
  }
  return grad;
}

Prediction om_prediction(const FourierField& z1, const FourierField& z2, const GibbsModel& model) {
  return from_log(model_action(model, z2) - model_action(model, z1));
}

Prediction third_order_prediction(const FourierField& z1, const FourierField& z2) {
  const double s1 = action_phi4(z1).total;
  const double s2 = action_phi4(z2).total;
  const double s3 = action_phi4(3.0 * z1 - 2.0 * z2).total;
  const double s4 = action_phi4(2.0 * z1 - z2).total;
  return from_log(-3.0 * s1 - s3 + s2 + 3.0 * s4);
}

double third_difference_l2(const FourierField& z1, const FourierField& z2) {
  auto sq = [](const FourierField& f) {
    const double n = l2_norm(f);
    return n * n;
  };
  return 3.0 * sq(z1) + sq(3.0 * z1 - 2.0 * z2) - sq(z2) - 3.0 * sq(2.0 * z1 - z2);
}

}  // namespace omlab
