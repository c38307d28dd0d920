#include <doctest.h>

#include <cmath>
#include <numbers>

#include "omlab/action.hpp"
#include "omlab/norms.hpp"
#include "support.hpp"

using namespace omlab;
using testing::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

// 1/4 int z^4 by a direct trigonometric sum on a grid fine enough to be exact.
double quartic_by_quadrature(const FourierField& z) {
  const int points = 4 * z.cutoff() + 3;
  return 0.25 * testing::grid_average(z.dim(), points, [&](const std::array<double, 3>& x) {
           return std::pow(testing::evaluate(z, x), 4);
         });
}

// 1/2 int |grad z|^2 with the gradient summed directly from the coefficients.
double dirichlet_by_quadrature(const FourierField& z) {
  const int points = 2 * z.cutoff() + 3;
  const auto& box = z.box();
  return 0.5 * testing::grid_average(z.dim(), points, [&](const std::array<double, 3>& x) {
           double s = 0.0;
           for (int a = 0; a < z.dim(); ++a) {
             Complex d{};
             for (std::size_t i = 0; i < box.size(); ++i) {
               const Mode k = box.mode(i);
               const double phase = 2 * kPi * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
               d += z[i] * Complex(0.0, 2 * kPi * k[static_cast<std::size_t>(a)]) *
                    Complex(std::cos(phase), std::sin(phase));
             }
             s += d.real() * d.real();
           }
           return s;
         });
}

}  // namespace

TEST_CASE("quartic action of simple fields") {
  const TorusSpec t(1);
  CHECK(action_phi4(FourierField(t, 4)).total == 0.0);
  const ActionValue a = action_phi4(FourierField::cosine(t, 4, {1, 0, 0}));
  CHECK(a.quartic_part == doctest::Approx(0.375).epsilon(1e-13));
  CHECK(a.gradient_part == doctest::Approx(2 * kPi * kPi).epsilon(1e-13));
  CHECK(a.total == doctest::Approx(20.1142).epsilon(1e-5));
  CHECK(a.total == a.quartic_part + a.gradient_part);
}

TEST_CASE("homogeneity of the two parts") {
  const FourierField z = random_field(TorusSpec(2), 5, 17, 0.4);
  const ActionValue a = action_phi4(z);
  for (double s : {0.5, 2.0, -3.0}) {
    const ActionValue b = action_phi4(s * z);
    CHECK(b.quartic_part == doctest::Approx(std::pow(s, 4) * a.quartic_part).epsilon(1e-12));
    CHECK(b.gradient_part == doctest::Approx(s * s * a.gradient_part).epsilon(1e-12));
  }
}

TEST_CASE("quartic action agrees with direct quadrature") {
  for (int dim = 1; dim <= 3; ++dim) {
    const FourierField z = random_field(TorusSpec(dim), dim == 3 ? 2 : 4, 3 + dim, 0.5);
    const ActionValue a = action_phi4(z);
    CHECK(a.quartic_part == doctest::Approx(quartic_by_quadrature(z)).epsilon(1e-11));
    CHECK(a.gradient_part == doctest::Approx(dirichlet_by_quadrature(z)).epsilon(1e-10));
  }
}

TEST_CASE("polynomial action") {
  const TorusSpec t2(2);
  const FourierField z = random_field(t2, 4, 8, 0.5);
  const std::vector<double> quartic{0.0, 0.0, 0.0, 0.0, 0.25};
  CHECK(action_p(z, quartic).total == doctest::Approx(action_phi4(z).total).epsilon(1e-13));
  const std::vector<double> constant{1.7};
  CHECK(action_p(z, constant).total == doctest::Approx(1.7 + action_phi4(z).gradient_part));
  const std::vector<double> square{0.0, 0.0, 1.0};
  CHECK(action_p(FourierField::cosine(t2, 4, {1, 0, 0}), square).total ==
        doctest::Approx(1.0 + 2 * kPi * kPi).epsilon(1e-13));

  // A sextic against quadrature of P(z(x)).
  const std::vector<double> sextic{0.2, -0.1, 0.3, 0.05, -0.4, 0.0, 0.5};
  const double direct = testing::grid_average(2, 6 * 4 + 3, [&](const std::array<double, 3>& x) {
    const double y = testing::evaluate(z, x);
    double p = 0.0;
    for (int j = 6; j >= 0; --j) p = p * y + sextic[static_cast<std::size_t>(j)];
    return p;
  });
  CHECK(action_p(z, sextic).quartic_part == doctest::Approx(direct).epsilon(1e-11));

  const std::vector<double> odd{0.0, 0.0, 0.0, 1.0};
  const std::vector<double> negative{0.0, 0.0, -1.0};
  CHECK_THROWS_AS(action_p(z, odd), std::invalid_argument);
  CHECK_THROWS_AS(action_p(z, negative), std::invalid_argument);
  CHECK_THROWS_AS(action_p(z, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("mass adds to the gradient part") {
  const double m = 2.5;
  const FourierField z0 = FourierField::cosine(TorusSpec(1), 3, {1, 0, 0}, 0.6);
  const FourierField zm = FourierField::cosine(TorusSpec(1, m), 3, {1, 0, 0}, 0.6);
  CHECK(action_phi4(zm).gradient_part ==
        doctest::Approx(action_phi4(z0).gradient_part + 0.5 * m * 0.36).epsilon(1e-13));
}

TEST_CASE("predicted ratios") {
  const TorusSpec t(1);
  const auto model = GibbsModel::phi4_line(4);
  const FourierField c = FourierField::cosine(t, 4, {1, 0, 0});
  const FourierField zero(t, 4);
  CHECK(om_prediction(c, c, model).value == 1.0);
  const Prediction p = om_prediction(c, zero, model);
  CHECK(p.log_value == doctest::Approx(-(0.375 + 2 * kPi * kPi)).epsilon(1e-13));
  CHECK(p.value == doctest::Approx(std::exp(-20.1142)).epsilon(1e-4));

  const FourierField z1 = random_field(t, 4, 1, 0.3);
  const FourierField z2 = random_field(t, 4, 2, 0.3);
  CHECK(om_prediction(z1, z2, model).value * om_prediction(z2, z1, model).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  const auto gff = GibbsModel::gff(t, 4);
  CHECK(om_prediction(c, zero, gff).log_value == doctest::Approx(-2 * kPi * kPi).epsilon(1e-13));
  const auto pp = GibbsModel::pphi2(TorusSpec(2), 4, {0.0, 0.0, 1.0});
  CHECK(om_prediction(FourierField::cosine(TorusSpec(2), 4, {1, 0, 0}), FourierField(TorusSpec(2), 4),
                      pp)
            .log_value == doctest::Approx(-(1.0 + 2 * kPi * kPi)).epsilon(1e-13));
}

TEST_CASE("third-order prediction") {
  const TorusSpec t(3);
  const FourierField z1 = FourierField::cosine(t, 2, {1, 0, 0}, 0.4);
  CHECK(third_order_prediction(z1, z1).log_value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  const FourierField z2 = FourierField::cosine(t, 2, {0, 1, 0}, 0.3);
  auto s = [](const FourierField& f) { return quartic_by_quadrature(f) + dirichlet_by_quadrature(f); };
  const double direct = -3 * s(z1) - s(3.0 * z1 - 2.0 * z2) + s(z2) + 3 * s(2.0 * z1 - z2);
  CHECK(third_order_prediction(z1, z2).log_value == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("third differences annihilate quadratic functionals") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const FourierField z1 = random_field(TorusSpec(2), 4, 100 + seed, 0.8);
    const FourierField z2 = random_field(TorusSpec(2), 4, 200 + seed, 0.8);
    const double scale_l2 = std::pow(l2_norm(z1) + l2_norm(z2), 2);
    CHECK(std::abs(third_difference_l2(z1, z2)) < 1e-10 * scale_l2);
    auto h = [](const FourierField& f) { return action_phi4(f).gradient_part; };
    const double a = h(z1), b = h(3.0 * z1 - 2.0 * z2), c = h(z2), d = h(2.0 * z1 - z2);
    CHECK(std::abs(3 * a + b - c - 3 * d) < 1e-10 * (a + b + c + d));
  }
}

TEST_CASE("gradient matches central finite differences") {
  for (int dim = 1; dim <= 3; ++dim) {
    const TorusSpec t(dim);
    const FourierField z = random_field(t, 3, 60 + dim, 0.6);
    const FourierField grad = action_phi4_gradient(z);
    for (unsigned seed = 0; seed < 3; ++seed) {
      const FourierField h = random_field(t, 3, 900 + seed, 1.0);
      const double eps = 1e-5;
      const double fd = (action_phi4(z + eps * h).total - action_phi4(z - eps * h).total) / (2 * eps);
      const double an = pairing(grad, h);
      CHECK(std::abs(fd - an) <= 1e-6 * std::abs(an));
    }
  }
}
