#include "omlab/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "omlab/fft.hpp"

namespace omlab {

namespace {

// Largest j with 4^j <= n2, i.e. floor(log2(sqrt(n2))) for n2 >= 1.
int floor_log2_sqrt(long long n2) {
  int j = 0;
  while ((1LL << (2 * (j + 1))) <= n2) ++j;
  return j;
}

struct BlockEntry {
  std::size_t box_index;
  std::size_t half_index;
  double weight;
  double multiplicity;  // 2 when the entry also stands for its mirror -k
};

struct BlockTable {
  int j = -1;
  int points = 1;
  fft_detail::HalfLayout layout{1, 1};
  std::vector<BlockEntry> entries;
};

using BlockTables = std::vector<BlockTable>;

class BlockTableCache {
 public:
  static BlockTableCache& instance() {
    static BlockTableCache cache;
    return cache;
  }

  std::shared_ptr<const BlockTables> get(PartitionKind kind, int dim, int cutoff) {
    const auto key = std::make_tuple(static_cast<int>(kind), dim, cutoff);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;
    auto built = std::make_shared<const BlockTables>(build(DyadicPartition(kind, dim, cutoff)));
    tables_.emplace(key, built);
    return built;
  }

 private:
  static BlockTables build(const DyadicPartition& partition) {
    const int dim = partition.dim();
    const ModeBox box(dim, partition.cutoff());
    const std::size_t zero = box.zero_index();
    BlockTables tables;
    for (int j = -1; j <= partition.j_max(); ++j) {
      std::vector<std::pair<std::size_t, double>> members;
      int extent = 0;
      for (std::size_t i = 0; i < box.size(); ++i) {
        if (i == zero) continue;
        const Mode k = box.mode(i);
        const double w = partition.weight(j, k);
        if (w == 0.0) continue;
        extent = std::max(extent, box_norm(k));
        members.emplace_back(i, w);
      }
      if (members.empty() && j != -1) continue;
      BlockTable t;
      t.j = j;
      t.points = extent == 0 ? 1 : fft_size(std::max(2 * extent + 1, 4 * extent));
      t.layout = fft_detail::HalfLayout(dim, t.points);
      for (const auto& [i, w] : members) {
        const Mode k = box.mode(i);
        if (k[dim - 1] < 0) continue;
        t.entries.push_back({i, t.layout.index(k), w, k[dim - 1] > 0 ? 2.0 : 1.0});
      }
      tables.push_back(std::move(t));
    }
    return tables;
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, std::shared_ptr<const BlockTables>> tables_;
};

struct Workspace {
  std::vector<Complex> half;
  std::vector<double> real;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

// Writes Delta_j f into the half spectrum of the block's grid and returns the grid values.
const std::vector<double>& evaluate_block(const FourierField& f, const BlockTable& t) {
  Workspace& ws = workspace();
  ws.half.assign(t.layout.complex_size, Complex{});
  ws.real.resize(t.layout.real_size);
  for (const BlockEntry& e : t.entries) ws.half[e.half_index] = e.weight * f[e.box_index];
  if (t.j == -1) ws.half[0] += f.mean();
  if (t.points == 1) {
    ws.real[0] = ws.half[0].real();
  } else {
    fft_detail::inverse_real(t.layout, ws.half.data(), ws.real.data());
  }
  return ws.real;
}

double block_sup(const FourierField& f, const BlockTable& t) {
  const auto& values = evaluate_block(f, t);
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

const BlockTables& tables_for(const FourierField& f, PartitionKind kind,
                              std::shared_ptr<const BlockTables>& holder) {
  holder = BlockTableCache::instance().get(kind, f.dim(), f.cutoff());
  return *holder;
}

}  // namespace

DyadicPartition::DyadicPartition(PartitionKind kind, int dim, int cutoff)
    : kind_(kind), dim_(dim), cutoff_(cutoff), j_max_(0) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("DyadicPartition: dimension must be 1..3");
  if (cutoff < 0) throw std::invalid_argument("DyadicPartition: negative cutoff");
  const long long max_sq = static_cast<long long>(dim) * cutoff * cutoff;
  if (kind == PartitionKind::Sharp) {
    j_max_ = max_sq == 0 ? 0 : floor_log2_sqrt(max_sq);
  } else {
    const double max_norm = std::sqrt(static_cast<double>(max_sq));
    while (max_norm > 0.75 * std::ldexp(1.0, j_max_ + 1)) ++j_max_;
  }
}

double DyadicPartition::smooth_step(double t) {
  constexpr double lo = 0.75;
  constexpr double hi = 4.0 / 3.0;
  if (t <= lo) return 1.0;
  if (t >= hi) return 0.0;
  const double s = (t - lo) / (hi - lo);
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double DyadicPartition::weight(int j, const Mode& k) const {
  const long long n2 = static_cast<long long>(k[0]) * k[0] + static_cast<long long>(k[1]) * k[1] +
                       static_cast<long long>(k[2]) * k[2];
  if (kind_ == PartitionKind::Sharp) {
    if (n2 == 0) return j == -1 ? 1.0 : 0.0;
    return floor_log2_sqrt(n2) == j ? 1.0 : 0.0;
  }
  const double norm = std::sqrt(static_cast<double>(n2));
  if (j == -1) return smooth_step(norm);
  if (j < -1) return 0.0;
  return smooth_step(norm / std::ldexp(1.0, j + 1)) - smooth_step(norm / std::ldexp(1.0, j));
}

GridField lp_block(const FourierField& f, int j, const DyadicPartition& partition) {
  if (partition.dim() != f.dim()) throw std::invalid_argument("lp_block: dimension mismatch");
  if (f.cutoff() > partition.cutoff()) {
    throw std::invalid_argument("lp_block: partition does not cover the field's modes");
  }
  const FourierField g = f.resized(partition.cutoff());
  std::shared_ptr<const BlockTables> holder;
  const BlockTables& tables = tables_for(g, partition.kind(), holder);
  for (const BlockTable& t : tables) {
    if (t.j != j) continue;
    const auto& values = evaluate_block(g, t);
    return GridField{f.torus(), t.points, values};
  }
  // Empty block: identically zero.
  return GridField{f.torus(), 1, std::vector<double>(1, 0.0)};
}

double besov_norm_bounded(const FourierField& f, double alpha, double floor, double cap,
                          PartitionKind kind) {
  std::shared_ptr<const BlockTables> holder;
  const BlockTables& tables = tables_for(f, kind, holder);

  struct Bound {
    const BlockTable* table;
    double scale;
    double lower;
    double upper;
  };
  std::vector<Bound> bounds;
  bounds.reserve(tables.size());
  double max_lower = 0.0;
  for (const BlockTable& t : tables) {
    double l2 = 0.0;
    double l1 = 0.0;
    for (const BlockEntry& e : t.entries) {
      const double a = e.weight * std::abs(f[e.box_index]);
      l2 += e.multiplicity * a * a;
      l1 += e.multiplicity * a;
    }
    if (t.j == -1) {
      l2 += f.mean() * f.mean();
      l1 += std::abs(f.mean());
    }
    const double scale = std::exp2(static_cast<double>(t.j) * alpha);
    const Bound b{&t, scale, scale * std::sqrt(l2), scale * l1};
    if (b.lower >= cap) return b.lower;
    max_lower = std::max(max_lower, b.lower);
    bounds.push_back(b);
  }

  std::sort(bounds.begin(), bounds.end(),
            [](const Bound& a, const Bound& b) { return a.upper > b.upper; });
  const double known = std::max(floor, max_lower);
  double result = max_lower;
  for (const Bound& b : bounds) {
    if (b.upper <= known || b.upper <= result) break;
    result = std::max(result, b.scale * block_sup(f, *b.table));
    if (result >= cap) return result;
  }
  return result;
}

double besov_norm(const FourierField& f, double alpha, PartitionKind kind) {
  return besov_norm_bounded(f, alpha, 0.0, std::numeric_limits<double>::infinity(), kind);
}

namespace {

// f, f' and f'' of a one-dimensional field at x.
std::array<double, 3> derivatives_1d(const FourierField& f, double x) {
  std::array<double, 3> d{f.mean(), 0.0, 0.0};
  for (int k = 1; k <= f.cutoff(); ++k) {
    const Complex c = f.coeff({k, 0, 0});
    const double w = kTwoPi * k;
    const double cs = std::cos(w * x);
    const double sn = std::sin(w * x);
    // 2 Re(c e^{i w x}) and its derivatives.
    d[0] += 2.0 * (c.real() * cs - c.imag() * sn);
    d[1] += 2.0 * w * (-c.real() * sn - c.imag() * cs);
    d[2] += -2.0 * w * w * (c.real() * cs - c.imag() * sn);
  }
  return d;
}

// Locates a zero of f' in [a, b] (with a sign change) by Newton steps kept inside
// the bracket, falling back to bisection, and returns |f| there.
double refine_extremum(const FourierField& f, double a, double b) {
  double fa = derivatives_1d(f, a)[1];
  double x = 0.5 * (a + b);
  for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
    const auto d = derivatives_1d(f, x);
    if (d[1] == 0.0) break;
    if ((d[1] < 0.0) == (fa < 0.0)) {
      a = x;
      fa = d[1];
    } else {
      b = x;
    }
    const double newton = d[2] != 0.0 ? x - d[1] / d[2] : a - 1.0;
    x = (newton > a && newton < b) ? newton : 0.5 * (a + b);
  }
  return std::abs(derivatives_1d(f, x)[0]);
}

}  // namespace

double sup_norm(const FourierField& f) {
  const int n = f.cutoff();
  const int points = n == 0 ? 1 : fft_size(std::max(2 * n + 1, 4 * n));
  if (points == 1) return std::abs(f.mean());
  const GridField g = synthesize(f, points);
  double best = lp_norm(g, std::numeric_limits<double>::infinity());
  if (f.dim() != 1) return best;

  // In one dimension the grid maximum is polished to the true maximum: every grid
  // local maximum of |f| brackets an extremum between its neighbours.
  const double h = 1.0 / points;
  const double threshold = 0.5 * best;
  for (int j = 0; j < points; ++j) {
    const double v = std::abs(g.values[static_cast<std::size_t>(j)]);
    const double left = std::abs(g.values[static_cast<std::size_t>((j + points - 1) % points)]);
    const double right = std::abs(g.values[static_cast<std::size_t>((j + 1) % points)]);
    if (v < threshold || v < left || v < right) continue;
    const double a = (j - 1) * h;
    const double b = (j + 1) * h;
    const double da = derivatives_1d(f, a)[1];
    const double db = derivatives_1d(f, b)[1];
    if ((da < 0.0) == (db < 0.0)) continue;
    best = std::max(best, refine_extremum(f, a, b));
  }
  return best;
}

double h10_norm(const FourierField& f) {
  const ModeBox& box = f.box();
  const std::size_t zero = box.zero_index();
  double s = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (i == zero) continue;
    s += f.torus().eigenvalue(box.mode(i)) * std::norm(f[i]);
  }
  return std::sqrt(s);
}

double l2_norm(const FourierField& f) {
  double s = f.mean() * f.mean();
  for (Complex c : f.coeffs()) s += std::norm(c);
  return std::sqrt(s);
}

double lp_norm(const GridField& g, double p) {
  if (g.values.empty()) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : g.values) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: exponent must be >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (double v : g.values) s += v * v;
  } else if (p == 4.0) {
    for (double v : g.values) s += (v * v) * (v * v);
  } else {
    for (double v : g.values) s += std::pow(std::abs(v), p);
  }
  s /= static_cast<double>(g.values.size());
  return std::pow(s, 1.0 / p);
}

double pairing(const FourierField& f, const FourierField& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("pairing: dimension mismatch");
  double s = f.mean() * g.mean();
  const FourierField& small = f.cutoff() <= g.cutoff() ? f : g;
  const FourierField& large = f.cutoff() <= g.cutoff() ? g : f;
  const ModeBox& sb = small.box();
  if (small.cutoff() == large.cutoff()) {
    for (std::size_t i = 0; i < sb.size(); ++i) s += (f[i] * std::conj(g[i])).real();
    return s;
  }
  const ModeBox& lb = large.box();
  for (std::size_t i = 0; i < sb.size(); ++i) {
    s += (small[i] * std::conj(large[lb.index(sb.mode(i))])).real();
  }
  return s;
}

}  // namespace omlab
