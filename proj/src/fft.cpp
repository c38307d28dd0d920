#include "omlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <tuple>

namespace omlab {

namespace {

struct PlanKey {
  int dim;
  int points;
  bool forward;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    const fft_detail::HalfLayout layout(key.dim, key.points);
    int n[3] = {key.points, key.points, key.points};
    std::vector<double> real(layout.real_size);
    std::vector<Complex> cplx(layout.complex_size);
    auto* cbuf = reinterpret_cast<fftw_complex*>(cplx.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = key.forward
                         ? fftw_plan_dft_r2c(key.dim, n, real.data(), cbuf, flags)
                         : fftw_plan_dft_c2r(key.dim, n, cbuf, real.data(), flags);
    if (plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

void check_points(const FourierField& f, int points) {
  if (points < 2 * f.cutoff() + 1) {
    throw AliasingError("grid of " + std::to_string(points) + " points cannot represent cutoff " +
                        std::to_string(f.cutoff()) + " (need M >= 2N+1)");
  }
}

FourierField analyze_impl(const GridField& g, int cutoff, bool keep_mean) {
  if (g.points < 2 * cutoff + 1) {
    throw AliasingError("analyze: grid of " + std::to_string(g.points) +
                        " points is too small for cutoff " + std::to_string(cutoff));
  }
  const int d = g.torus.dim;
  const fft_detail::HalfLayout layout(d, g.points);
  if (g.values.size() != layout.real_size) {
    throw std::invalid_argument("analyze: grid value count does not match M^d");
  }
  std::vector<double> in(g.values);
  std::vector<Complex> half(layout.complex_size);
  fft_detail::forward_real(layout, in.data(), half.data());

  FourierField f(g.torus, cutoff);
  const ModeBox& box = f.box();
  const double norm = 1.0 / static_cast<double>(layout.real_size);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Mode k = box.mode(i);
    if (k[d - 1] >= 0) {
      f.raw(i) = half[layout.index(k)] * norm;
    } else {
      f.raw(i) = std::conj(half[layout.index(negate(k))]) * norm;
    }
  }
  const std::size_t z = box.zero_index();
  if (keep_mean) f.set_mean(f[z].real());
  f.raw(z) = Complex{};
  return f;
}

}  // namespace

int fft_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

namespace fft_detail {

HalfLayout::HalfLayout(int d, int m) : dim(d), points(m), last_extent(m / 2 + 1) {
  real_size = 1;
  complex_size = 1;
  for (int i = 0; i < d; ++i) {
    real_size *= static_cast<std::size_t>(m);
    complex_size *= static_cast<std::size_t>(i == d - 1 ? last_extent : m);
  }
}

std::size_t HalfLayout::index(const Mode& k) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim - 1; ++i) {
    const int w = k[i] < 0 ? k[i] + points : k[i];
    idx = idx * static_cast<std::size_t>(points) + static_cast<std::size_t>(w);
  }
  return idx * static_cast<std::size_t>(last_extent) + static_cast<std::size_t>(k[dim - 1]);
}

void inverse_real(const HalfLayout& layout, Complex* in, double* out) {
  fftw_plan plan = PlanCache::instance().get({layout.dim, layout.points, false});
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in), out);
}

void forward_real(const HalfLayout& layout, double* in, Complex* out) {
  fftw_plan plan = PlanCache::instance().get({layout.dim, layout.points, true});
  fftw_execute_dft_r2c(plan, in, reinterpret_cast<fftw_complex*>(out));
}

void scatter(const FourierField& f, const HalfLayout& layout, std::vector<Complex>& half) {
  half.assign(layout.complex_size, Complex{});
  const ModeBox& box = f.box();
  const int last = layout.dim - 1;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Complex c = f[i];
    if (c == Complex{}) continue;
    const Mode k = box.mode(i);
    if (k[last] < 0) continue;
    half[layout.index(k)] = c;
  }
  half[0] += f.mean();
}

}  // namespace fft_detail

GridField synthesize(const FourierField& f, int points) {
  check_points(f, points);
  const fft_detail::HalfLayout layout(f.dim(), points);
  std::vector<Complex> half;
  fft_detail::scatter(f, layout, half);
  GridField g{f.torus(), points, std::vector<double>(layout.real_size)};
  fft_detail::inverse_real(layout, half.data(), g.values.data());
  return g;
}

FourierField analyze(const GridField& g, int cutoff) { return analyze_impl(g, cutoff, false); }

FourierField analyze_with_mean(const GridField& g, int cutoff) {
  return analyze_impl(g, cutoff, true);
}

double grid_mean(const GridField& g) {
  double s = 0.0;
  for (double v : g.values) s += v;
  return g.values.empty() ? 0.0 : s / static_cast<double>(g.values.size());
}

}  // namespace omlab
