#include <doctest.h>

#include <cmath>
#include <numbers>

#include "omlab/fft.hpp"
#include "omlab/norms.hpp"
#include "support.hpp"

using namespace omlab;
using testing::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent transcription of the smooth partition: C^2 quintic step between 3/4 and 4/3.
double step(double t) {
  if (t <= 0.75) return 1.0;
  if (t >= 4.0 / 3.0) return 0.0;
  const double s = (t - 0.75) / (4.0 / 3.0 - 0.75);
  return 1.0 - (10 * s * s * s - 15 * s * s * s * s + 6 * s * s * s * s * s);
}

double smooth_weight(int j, double norm) {
  if (j == -1) return step(norm);
  return step(norm / std::pow(2.0, j + 1)) - step(norm / std::pow(2.0, j));
}

// Besov norm by direct trigonometric sums on 4x oversampled block grids.
double besov_direct(const FourierField& f, double alpha) {
  const int d = f.dim();
  const int n = f.cutoff();
  const double top = n * std::sqrt(static_cast<double>(d));
  double best = 0.0;
  for (int j = -1; j >= -1 && (j < 0 || 0.75 * std::pow(2.0, j) < top); ++j) {
    FourierField block(f.torus(), n);
    int extent = 0;
    const auto& box = f.box();
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (i == box.zero_index()) continue;
      const Mode k = box.mode(i);
      const double w = smooth_weight(j, std::sqrt(euclid_norm_sq(k)));
      if (w == 0.0) continue;
      block.raw(i) = w * f[i];
      extent = std::max(extent, box_norm(k));
    }
    if (j == -1) block.set_mean(f.mean());
    const int m = std::max(1, fft_size(std::max(2 * extent + 1, 4 * extent)));
    double sup = std::abs(block.mean());
    if (extent > 0) {
      std::size_t total = 1;
      for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(m);
      for (std::size_t p = 0; p < total; ++p) {
        sup = std::max(sup, std::abs(testing::evaluate(block, testing::grid_point(d, m, p))));
      }
    }
    best = std::max(best, std::pow(2.0, j * alpha) * sup);
  }
  return best;
}

}  // namespace

TEST_CASE("dyadic partitions sum to one") {
  for (auto kind : {PartitionKind::Smooth, PartitionKind::Sharp}) {
    for (int d = 1; d <= 3; ++d) {
      const int n = d == 3 ? 6 : 20;
      const DyadicPartition p(kind, d, n);
      const ModeBox box(d, n);
      for (std::size_t i = 0; i < box.size(); ++i) {
        double s = 0.0;
        for (int j = -1; j <= p.j_max(); ++j) s += p.weight(j, box.mode(i));
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("smooth blocks live on dyadic annuli") {
  const DyadicPartition p(PartitionKind::Smooth, 2, 24);
  const ModeBox box(2, 24);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Mode k = box.mode(i);
    const double r = std::sqrt(euclid_norm_sq(k));
    CHECK(p.weight(-1, k) == doctest::Approx(step(r)));
    if (r >= 4.0 / 3.0) CHECK(p.weight(-1, k) == 0.0);
    for (int j = 0; j <= p.j_max(); ++j) {
      const double w = p.weight(j, k);
      CHECK(w >= 0.0);
      if (w > 0.0) {
        CHECK(r > 0.75 * std::pow(2.0, j));
        CHECK(r < (8.0 / 3.0) * std::pow(2.0, j));
      }
    }
  }
  CHECK(DyadicPartition::smooth_step(0.75) == 1.0);
  CHECK(DyadicPartition::smooth_step(4.0 / 3.0) == 0.0);
}

TEST_CASE("sharp partition puts each mode in exactly one block") {
  const DyadicPartition p(PartitionKind::Sharp, 1, 40);
  CHECK(p.weight(-1, {0, 0, 0}) == 1.0);
  CHECK(p.weight(0, {1, 0, 0}) == 1.0);
  CHECK(p.weight(1, {2, 0, 0}) == 1.0);
  CHECK(p.weight(1, {3, 0, 0}) == 1.0);
  CHECK(p.weight(2, {4, 0, 0}) == 1.0);
  CHECK(p.weight(5, {-32, 0, 0}) == 1.0);
  CHECK(p.j_max() == 5);
}

TEST_CASE("lp blocks reconstruct the field") {
  for (auto kind : {PartitionKind::Smooth, PartitionKind::Sharp}) {
    const TorusSpec t(2);
    FourierField f = random_field(t, 9, 8);
    f.set_mean(0.4);
    const DyadicPartition p(kind, 2, 9);
    FourierField sum(t, 9);
    for (int j = -1; j <= p.j_max(); ++j) {
      const GridField g = lp_block(f, j, p);
      if (g.points >= 2 * 9 + 1) {
        sum += analyze_with_mean(g, 9);
      } else {
        sum += analyze_with_mean(g, (g.points - 1) / 2);
      }
    }
    CHECK(testing::max_abs_diff(sum, f) < 1e-10 * testing::max_abs(f));
  }
}

TEST_CASE("lp block of a single mode under the sharp partition") {
  const TorusSpec t(1);
  const DyadicPartition p(PartitionKind::Sharp, 1, 16);
  const FourierField f = FourierField::from_modes(t, 16, {{{5, 0, 0}, Complex(0.7, 0.0)}});
  for (int j = -1; j <= p.j_max(); ++j) {
    const GridField g = lp_block(f, j, p);
    const double sup = lp_norm(g, std::numeric_limits<double>::infinity());
    if (j == 2) {
      CHECK(sup == doctest::Approx(1.4));
      CHECK(g.points >= 4 * 5);
    } else {
      CHECK(sup == 0.0);
    }
  }
  const FourierField zero(t, 16);
  for (int j = -1; j <= p.j_max(); ++j) {
    CHECK(lp_norm(lp_block(zero, j, p), 2.0) == 0.0);
  }
}

TEST_CASE("besov norm of a single mode pair under the sharp partition") {
  const TorusSpec t(2);
  for (double alpha : {-0.7, 0.0, 0.25}) {
    const double a = 0.35;
    // |k| = 5 sits in block j = 2.
    const FourierField f = FourierField::from_modes(t, 8, {{{3, 4, 0}, Complex(a, 0.0)}});
    CHECK(besov_norm(f, alpha, PartitionKind::Sharp) ==
          doctest::Approx(std::pow(2.0, 2 * alpha) * 2 * a));
  }
}

TEST_CASE("besov norm matches direct block sums") {
  for (int d = 1; d <= 2; ++d) {
    const TorusSpec t(d);
    FourierField f = random_field(t, d == 1 ? 20 : 6, 5 + d);
    f.set_mean(-0.2);
    for (double alpha : {-1.2, -0.3, 0.4}) {
      CHECK(besov_norm(f, alpha) == doctest::Approx(besov_direct(f, alpha)).epsilon(1e-12));
    }
  }
}

TEST_CASE("besov norm is a norm") {
  const TorusSpec t(2);
  CHECK(besov_norm(FourierField(t, 5), 0.3) == 0.0);
  for (unsigned s = 0; s < 20; ++s) {
    const FourierField f = random_field(t, 7, 100 + s);
    const FourierField g = random_field(t, 7, 200 + s);
    const FourierField h = random_field(t, 7, 300 + s);
    for (double alpha : {-0.5, 0.2}) {
      for (double c : {-2.5, 0.3, 4.0}) {
        CHECK(besov_norm(c * f, alpha) ==
              doctest::Approx(std::abs(c) * besov_norm(f, alpha)).epsilon(1e-12));
      }
      CHECK(besov_norm(f + g + h, alpha) <=
            (besov_norm(f, alpha) + besov_norm(g, alpha) + besov_norm(h, alpha)) * (1 + 1e-12));
      CHECK(besov_norm(f + g, alpha) <=
            (besov_norm(f, alpha) + besov_norm(g, alpha)) * (1 + 1e-12));
    }
  }
}

TEST_CASE("besov norm is monotone in alpha without a low block") {
  const TorusSpec t(2);
  FourierField f = random_field(t, 8, 41);
  // Drop |k| < 4/3 so that nothing lands in block -1.
  for (const Mode k : {Mode{1, 0, 0}, Mode{0, 1, 0}}) f.set_mode(k, 0.0);
  double prev = 0.0;
  for (double alpha = -1.0; alpha <= 1.0; alpha += 0.25) {
    const double v = besov_norm(f, alpha);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("bounded besov evaluation agrees with the full norm") {
  const TorusSpec t(2);
  for (unsigned s = 0; s < 30; ++s) {
    const FourierField f = random_field(t, 10, 500 + s);
    const double exact = besov_norm(f, -0.4);
    for (double cap : {0.5 * exact, 0.999 * exact, 1.001 * exact, 3 * exact}) {
      const double v = besov_norm_bounded(f, -0.4, 0.0, cap);
      if (exact < cap) {
        CHECK(v == doctest::Approx(exact).epsilon(1e-14));
      } else {
        CHECK(v >= cap);
      }
    }
    for (double floor : {0.3 * exact, 2 * exact}) {
      const double v = besov_norm_bounded(f, -0.4, floor, 10 * exact);
      CHECK(std::max(v, floor) == doctest::Approx(std::max(exact, floor)).epsilon(1e-14));
    }
  }
}

TEST_CASE("h10 norm") {
  const TorusSpec t(1);
  CHECK(h10_norm(FourierField::cosine(t, 3, {1, 0, 0})) == doctest::Approx(2 * kPi));
  CHECK(h10_norm(FourierField(t, 3)) == 0.0);

  const TorusSpec t2(2);
  FourierField f = random_field(t2, 6, 1);
  FourierField g = random_field(t2, 6, 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (box_norm(f.box().mode(i)) <= 3) g.raw(i) = 0.0;
    else f.raw(i) = 0.0;
  }
  CHECK(std::pow(h10_norm(f + g), 2) ==
        doctest::Approx(std::pow(h10_norm(f), 2) + std::pow(h10_norm(g), 2)).epsilon(1e-13));

  // Parseval against grid quadrature of |grad f|^2, with the gradient summed directly.
  const int m = 16;
  const double direct = testing::grid_average(2, m, [&](const std::array<double, 3>& x) {
    double gx = 0.0, gy = 0.0;
    const auto& box = f.box();
    for (std::size_t i = 0; i < box.size(); ++i) {
      const Mode k = box.mode(i);
      const double ph = 2 * kPi * (k[0] * x[0] + k[1] * x[1]);
      const Complex e = f[i] * Complex(std::cos(ph), std::sin(ph)) * Complex(0.0, 2 * kPi);
      gx += (e * static_cast<double>(k[0])).real();
      gy += (e * static_cast<double>(k[1])).real();
    }
    return gx * gx + gy * gy;
  });
  CHECK(std::pow(h10_norm(f), 2) == doctest::Approx(direct).epsilon(1e-10));

  const TorusSpec massive(1, 2.0);
  const FourierField c = FourierField::cosine(massive, 2, {1, 0, 0});
  CHECK(std::pow(h10_norm(c), 2) == doctest::Approx(4 * kPi * kPi + 2.0));
}

TEST_CASE("lp norms of the normalised cosine") {
  const TorusSpec t(1);
  const FourierField c = FourierField::cosine(t, 1, {1, 0, 0});
  CHECK(lp_norm(synthesize(c, 5), 2.0) == doctest::Approx(1.0));
  CHECK(std::pow(lp_norm(synthesize(c, 5), 4.0), 4) == doctest::Approx(1.5));
  CHECK(lp_norm(synthesize(c, 8), 3.0) > 0.0);
  CHECK(lp_norm(synthesize(FourierField(t, 2), 8), 4.0) == 0.0);
  CHECK(lp_norm(synthesize(c, 64), std::numeric_limits<double>::infinity()) ==
        doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("sup norm samples a 4x oversampled grid") {
  const TorusSpec t(1);
  const FourierField c = FourierField::cosine(t, 4, {3, 0, 0}, 2.0);
  CHECK(sup_norm(c) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("pairing") {
  const TorusSpec t(2);
  const FourierField c = FourierField::cosine(t, 2, {1, 1, 0});
  CHECK(pairing(c, c) == doctest::Approx(1.0));
  CHECK(pairing(c, FourierField::cosine(t, 3, {2, 0, 0})) == 0.0);

  FourierField f = random_field(t, 5, 3);
  FourierField g = random_field(t, 3, 4);
  f.set_mean(0.3);
  g.set_mean(-1.1);
  CHECK(pairing(f, g) == doctest::Approx(pairing(g, f)));
  const double direct = testing::grid_average(2, 12, [&](const std::array<double, 3>& x) {
    return testing::evaluate(f, x) * testing::evaluate(g, x);
  });
  CHECK(pairing(f, g) == doctest::Approx(direct).epsilon(1e-12));
  const FourierField h = random_field(t, 5, 5);
  CHECK(pairing(2.0 * f + h, g) == doctest::Approx(2 * pairing(f, g) + pairing(h, g)));
}

TEST_CASE("duality bound constant is stable as the cutoff doubles") {
  // |<f,g>| <= C |f|_{C^{1/2}} |g|_{C^{-1/2+0.1}}: the empirical C must not grow with N.
  auto worst = [](int n) {
    const TorusSpec t(1);
    double m = 0.0;
    for (unsigned s = 0; s < 1000; ++s) {
      const FourierField f = random_field(t, n, 7000 + s, 1.0, 1.5);
      const FourierField g = random_field(t, n, 9000 + s, 1.0, 0.5);
      m = std::max(m, std::abs(pairing(f, g)) / (besov_norm(f, 0.5) * besov_norm(g, -0.4)));
    }
    return m;
  };
  const double c16 = worst(16);
  const double c32 = worst(32);
  MESSAGE("duality constants: N=16 " << c16 << ", N=32 " << c32);
  CHECK(std::isfinite(c16));
  CHECK(c32 <= 1.1 * c16);
}

TEST_CASE("one-dimensional sup norm is the true maximum") {
  const TorusSpec t(1);
  Complex c(0.3, -0.7);
  FourierField single(t, 1);
  single.set_mode({1, 0, 0}, c);
  CHECK(sup_norm(single) == doctest::Approx(2.0 * std::abs(c)).epsilon(1e-14));

  for (unsigned seed = 0; seed < 5; ++seed) {
    const FourierField f = random_field(t, 12, 300 + seed);
    double dense = 0.0;
    for (int j = 0; j < 200000; ++j) dense = std::max(dense, std::abs(testing::evaluate(f, {j / 200000.0, 0, 0})));
    const double s = sup_norm(f);
    CHECK(s >= dense - 1e-13);
    CHECK(s == doctest::Approx(dense).epsilon(1e-8));
  }
}
