#pragma once

#include <span>
#include <vector>

#include "omlab/fourier_field.hpp"
#include "omlab/measures.hpp"

namespace omlab {

struct ActionValue {
  double quartic_part = 0.0;   // 1/4 int z^4, or int P(z)
  double gradient_part = 0.0;  // |z|^2_{H^1_0} / 2, mass included when the torus has one
  double total = 0.0;
};

/// S(z) = 1/4 int z^4 + 1/2 |z|^2_{H^1_0}, integrated exactly on a dealiased grid.
ActionValue action_phi4(const FourierField& z);

/// S_P(z) = int P(z) + 1/2 |z|^2_{H^1_0} with P(y) = sum_j a_j y^j of even
/// degree and positive leading coefficient.
ActionValue action_p(const FourierField& z, std::span<const double> coeffs);

/// The action matching a model: the quadratic part alone for the free field,
/// S_P for the polynomial model and the quartic action otherwise.
double model_action(const GibbsModel& model, const FourierField& z);

/// L2 gradient of action_phi4 restricted to the field's modes: P_N(z^3) + lambda_k z_k.
FourierField action_phi4_gradient(const FourierField& z);

struct Prediction {
  double value = 1.0;
  double log_value = 0.0;
};

/// exp(S(z2) - S(z1)) for the model's action.
Prediction om_prediction(const FourierField& z1, const FourierField& z2, const GibbsModel& model);

/// exp(-3 S(z1) - S(3 z1 - 2 z2) + S(z2) + 3 S(2 z1 - z2)) with the quartic action.
Prediction third_order_prediction(const FourierField& z1, const FourierField& z2);

/// 3 f(z1) + f(3 z1 - 2 z2) - f(z2) - 3 f(2 z1 - z2) for f = |.|^2_{L2}.
double third_difference_l2(const FourierField& z1, const FourierField& z2);

}  // namespace omlab
