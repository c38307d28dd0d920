#include "omlab/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "omlab/balls.hpp"
#include "omlab/estimators.hpp"
#include "omlab/norms.hpp"
#include "omlab/oracle.hpp"
#include "omlab/parallel.hpp"

#ifndef OMLAB_VERSION
#define OMLAB_VERSION "unknown"
#endif

namespace omlab::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<Procedure, std::string>>& procedure_names() {
  static const std::vector<std::pair<Procedure, std::string>> names{
      {Procedure::OmScan, "om_scan"},           {Procedure::Degeneracy3D, "degeneracy_3d"},
      {Procedure::WickCubeLog, "wick_cube_log"}, {Procedure::JointLimit, "joint_limit"},
      {Procedure::ThirdOrder, "third_order"},    {Procedure::OracleSuite, "oracle_suite"}};
  return names;
}

std::string procedure_name(Procedure p) {
  for (const auto& [proc, name] : procedure_names()) {
    if (proc == p) return name;
  }
  return "unknown";
}

// Typed access to one JSON object, reporting problems by JSON pointer.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : j_.items()) {
      if (!allowed.count(item.key())) throw ConfigError(at(item.key()), "unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  const json& raw(const char* key) const { return j_.at(key); }

  double number(const char* key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) return require(key, fallback);
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    return v.get<double>();
  }

  int integer(const char* key, std::optional<int> fallback = std::nullopt) const {
    if (!has(key)) return require(key, fallback);
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(at(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const char* key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) return require(key, fallback);
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }

  template <class T>
  std::vector<T> list(const char* key) const {
    if (!has(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool ok = std::is_integral_v<T> ? v[i].is_number_integer() : v[i].is_number();
      if (!ok) {
        throw ConfigError(at(key) + "/" + std::to_string(i),
                          std::is_integral_v<T> ? "expected an integer" : "expected a number");
      }
      out.push_back(v[i].get<T>());
    }
    return out;
  }

 private:
  template <class T>
  T require(const char* key, const std::optional<T>& fallback) const {
    if (!fallback) throw ConfigError(at(key), "required field is missing");
    return *fallback;
  }

  const json& j_;
  std::string path_;
};

void check_choice(const std::string& value, std::initializer_list<const char*> choices,
                  const std::string& path) {
  std::string listed;
  for (const char* c : choices) {
    if (value == c) return;
    listed += listed.empty() ? c : std::string(", ") + c;
  }
  throw ConfigError(path, "'" + value + "' is not one of: " + listed);
}

std::vector<ModeTerm> read_modes(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of modes");
  std::vector<ModeTerm> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    const Reader r(j[i], p);
    r.allow_only({"k", "amplitude", "basis"});
    const auto k = r.list<int>("k");
    if (k.empty() || k.size() > 3) throw ConfigError(r.at("k"), "expected 1 to 3 integers");
    ModeTerm t;
    for (std::size_t a = 0; a < k.size(); ++a) t.k[a] = k[a];
    t.amplitude = r.number("amplitude");
    const std::string basis = r.string("basis", std::string("cos"));
    check_choice(basis, {"cos", "sin"}, r.at("basis"));
    t.sine = basis == "sin";
    out.push_back(t);
  }
  return out;
}

json write_modes(const std::vector<ModeTerm>& modes, int dim) {
  json out = json::array();
  for (const ModeTerm& t : modes) {
    out.push_back({{"k", std::vector<int>(t.k.begin(), t.k.begin() + dim)},
                   {"amplitude", t.amplitude},
                   {"basis", t.sine ? "sin" : "cos"}});
  }
  return out;
}

FourierField build_field(const std::vector<ModeTerm>& modes, const TorusSpec& torus, int cutoff,
                         const std::string& path) {
  FourierField f(torus, cutoff);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const ModeTerm& t = modes[i];
    const std::string p = path + "/" + std::to_string(i) + "/k";
    for (int a = torus.dim; a < 3; ++a) {
      if (t.k[a] != 0) throw ConfigError(p, "mode has more components than the torus dimension");
    }
    if (box_norm(t.k) == 0) throw ConfigError(p, "the zero mode is not allowed");
    if (box_norm(t.k) > cutoff) throw ConfigError(p, "mode lies beyond the cutoff");
    if (t.sine) {
      FourierField s(torus, cutoff);
      s.set_mode(t.k, Complex(0.0, -t.amplitude / std::sqrt(2.0)));
      f += s;
    } else {
      f += FourierField::cosine(torus, cutoff, t.k, t.amplitude);
    }
  }
  return f;
}

GibbsModel build_model(const ExperimentConfig& c, const TorusSpec& torus) {
  const std::string& type = c.model.type;
  if (type == "gff") return GibbsModel::gff(torus, c.cutoff);
  if (type == "phi4_line") {
    if (c.dim != 1) throw ConfigError("/model/type", "phi4_line needs a one-dimensional torus");
    return GibbsModel(torus, c.cutoff, Phi4LineModel{});
  }
  if (type == "pphi2") {
    try {
      return GibbsModel::pphi2(torus, c.cutoff, c.model.coeffs);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("/model/coeffs", e.what());
    }
  }
  throw ConfigError("/model/type", "model '" + type + "' cannot be used by this procedure");
}

BallSpec build_ball(const ExperimentConfig& c, const FourierField& center) {
  const BallConfig& b = c.ball;
  BallSpec s;
  try {
    if (b.kind == "plain") {
      s = BallSpec::plain(b.alpha, 1.0, center, b.norm == "sup" ? PlainNorm::Sup : PlainNorm::Besov);
    } else if (b.kind == "enhanced_p") {
      s = BallSpec::enhanced_p(b.alpha, 1.0, b.degree, center);
    } else {
      const std::vector<int> levels = b.levels.empty() ? c.levels : b.levels;
      s = b.kind == "enhanced_3d"
              ? BallSpec::enhanced_3d(b.kappa, 1.0, levels, center)
              : BallSpec::fully_renormalized_3d(b.kappa, 1.0, levels, b.counterterm_scale, center);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/ball", e.what());
  }
  s.partition = b.partition == "sharp" ? PartitionKind::Sharp : PartitionKind::Smooth;
  return s;
}

void require_3d(const ExperimentConfig& c) {
  if (c.dim != 3) throw ConfigError("/torus/dim", "this procedure runs on the three-torus");
  if (c.ball.kind != "enhanced_3d" && c.ball.kind != "fully_renormalized_3d") {
    throw ConfigError("/ball/kind", "this procedure needs a three-dimensional ball");
  }
}

Schedule build_schedule(const ExperimentConfig& c) {
  try {
    if (c.schedule == "explicit") return Schedule(c.r_values, c.levels);
    return Schedule::square_root(c.r_values);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/r_values", e.what());
  }
}

Options3D build_setup(const ExperimentConfig& c, const TorusSpec& torus) {
  Options3D setup;
  setup.cutoff = c.cutoff;
  setup.counterterm_scale = c.model.counterterm_scale;
  setup.ball = build_ball(c, FourierField(torus, c.cutoff));
  return setup;
}

ResultRow row_from(const ScanRow& s) {
  return {s.r, s.n, s.estimate, s.predicted.value, s.predicted.log_value};
}

json estimate_json(const Estimate& e) {
  return {{"log_value", e.log_value},
          {"log_std_error", e.log_std_error},
          {"ess", e.ess},
          {"degenerate", e.degenerate}};
}

RunResult run_om_scan(const ExperimentConfig& c, const TorusSpec& torus) {
  if (c.r_values.empty()) throw ConfigError("/r_values", "at least one radius is required");
  const GibbsModel model = build_model(c, torus);
  const FourierField z1 = build_field(c.z1, torus, c.cutoff, "/z1");
  const FourierField z2 = build_field(c.z2, torus, c.cutoff, "/z2");
  const BallSpec ball = build_ball(c, FourierField(torus, c.cutoff));
  const LimitScan scan = om_limit_scan(model, z1, z2, ball, c.r_values, c.sampler);
  RunResult out;
  for (const ScanRow& s : scan.rows) out.rows.push_back(row_from(s));
  out.summary["delta_S"] = om_prediction(z1, z2, model).log_value;
  out.summary["extrapolated_log"] = scan.extrapolated_log;
  out.summary["extrapolated_std_error"] = scan.extrapolated_std_error;
  if (!c.remainder_r.empty()) {
    json rem = json::array();
    for (const RemainderRow& r : enhanced_remainder_scan(z1, ball, c.remainder_r, c.sampler)) {
      rem.push_back({{"r", r.r}, {"accepted", r.accepted}, {"sup", r.sup}, {"sup_over_r", r.sup_over_r}});
    }
    out.summary["remainder_z1"] = rem;
  }
  return out;
}

RunResult run_degeneracy(const ExperimentConfig& c, const TorusSpec& torus) {
  require_3d(c);
  if (c.levels.empty()) throw ConfigError("/levels", "at least one level is required");
  if (c.r_values.empty()) throw ConfigError("/r_values", "at least one radius is required");
  const FourierField z = build_field(c.z1, torus, c.cutoff, "/z1");
  const Options3D setup = build_setup(c, torus);
  RunResult out;
  json scans = json::array();
  for (double r : c.r_values) {
    const DegeneracyScan d = degeneracy_scan_3d(z, r, c.levels, setup, c.sampler);
    for (const ScanRow& s : d.rows) out.rows.push_back(row_from(s));
    json steps = json::array();
    for (const Estimate& e : d.steps) steps.push_back(estimate_json(e));
    scans.push_back({{"r", r}, {"slope", estimate_json(d.slope)}, {"steps", steps}});
  }
  out.summary["scans"] = scans;
  out.summary["z_norm"] = besov_norm(z, -0.5 - c.ball.kappa);
  return out;
}

RunResult run_wick_cube(const ExperimentConfig& c, const TorusSpec& torus) {
  if (c.levels.empty()) throw ConfigError("/levels", "at least one level is required");
  const FourierField psi = build_field(c.z1, torus, c.cutoff, "/z1");
  RunResult out;
  json oracle = json::array();
  for (int n : c.levels) {
    if (n < 1 || n > c.cutoff) throw ConfigError("/levels", "levels must lie in [1, cutoff]");
    ResultRow row;
    row.r = kNaN;
    row.n = n;
    row.estimate = wick_pairing_variance(psi, n, 3, c.sampler);
    row.predicted = wick_pair_moment(3, psi, psi, n);
    row.log_predicted = std::log(row.predicted);
    oracle.push_back(row.predicted);
    out.rows.push_back(row);
  }
  out.summary["oracle"] = oracle;
  return out;
}

RunResult run_joint(const ExperimentConfig& c, const TorusSpec& torus, bool third) {
  require_3d(c);
  const FourierField z1 = build_field(c.z1, torus, c.cutoff, "/z1");
  const FourierField z2 = build_field(c.z2, torus, c.cutoff, "/z2");
  const Schedule schedule = build_schedule(c);
  const Options3D setup = build_setup(c, torus);
  RunResult out;
  std::vector<ScanRow> rows;
  if (third) {
    rows = third_order_ratio(z1, z2, schedule, setup, c.sampler);
    double worst = 0.0;
    for (int n : schedule.levels()) worst = std::max(worst, std::abs(counterterm_residual(z1, z2, n)));
    out.summary["counterterm_residual"] = worst;
  } else {
    try {
      check_compensation(z1, z2, schedule);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("/z2", e.what());
    }
    rows = joint_limit_ratio(z1, z2, schedule, setup, c.sampler);
  }
  for (const ScanRow& s : rows) out.rows.push_back(row_from(s));
  out.summary["levels"] = schedule.levels();
  return out;
}

RunResult run_oracle_suite(const ExperimentConfig& c, const TorusSpec& torus) {
  if (c.dim != 1 || c.cutoff > 2) {
    throw ConfigError("/cutoff", "the oracle suite needs d = 1 and cutoff <= 2");
  }
  if (c.ball.kind != "plain") throw ConfigError("/ball/kind", "the oracle suite uses plain balls");
  const FourierField z1 = build_field(c.z1, torus, c.cutoff, "/z1");
  const GibbsModel gff = GibbsModel::gff(torus, c.cutoff);
  const BallSpec ball = build_ball(c, z1);
  RunResult out;
  for (double r : c.r_values) {
    const BallSpec b = ball.with_radius(r);
    ResultRow row;
    row.r = r;
    row.n = c.cutoff;
    row.estimate = acceptance_rate(b, gff, c.sampler);
    row.predicted = gaussian_ball_prob_lowdim(torus, c.cutoff, b);
    row.log_predicted = std::log(row.predicted);
    out.rows.push_back(row);
  }
  const FourierField z2 = build_field(c.z2, torus, c.cutoff, "/z2");
  json binomial = json::array();
  for (int p = 1; p <= 6; ++p) binomial.push_back(binomial_direct_check(z1, z2, c.cutoff, p));
  out.summary["binomial_relative_error"] = binomial;
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentConfig base(const std::string& id, Procedure p, int dim, int cutoff) {
  ExperimentConfig c;
  c.experiment = id;
  c.procedure = p;
  c.dim = dim;
  c.cutoff = cutoff;
  c.sampler.seed = 1;
  return c;
}

ModeTerm mode(int k0, int k1, int k2, double amplitude) { return {{k0, k1, k2}, amplitude, false}; }

}  // namespace

bool RunResult::has_degenerate() const {
  for (const ResultRow& r : rows) {
    if (r.estimate.degenerate) return true;
  }
  return false;
}

ExperimentConfig config_from_json(const json& j) {
  const Reader r(j, "");
  r.allow_only({"experiment", "procedure", "torus", "cutoff", "model", "z1", "z2", "ball",
                "r_values", "levels", "schedule", "remainder_r", "sampler", "output"});
  ExperimentConfig c;
  c.experiment = r.string("experiment");
  if (c.experiment.empty()) throw ConfigError("/experiment", "must not be empty");
  const std::string proc = r.string("procedure");
  bool found = false;
  for (const auto& [p, name] : procedure_names()) {
    if (name == proc) {
      c.procedure = p;
      found = true;
    }
  }
  if (!found) {
    check_choice(proc, {"om_scan", "degeneracy_3d", "wick_cube_log", "joint_limit", "third_order",
                        "oracle_suite"},
                 "/procedure");
  }

  const Reader torus(r.raw("torus"), "/torus");
  torus.allow_only({"dim", "mass"});
  c.dim = torus.integer("dim");
  if (c.dim < 1 || c.dim > 3) throw ConfigError("/torus/dim", "must be 1, 2 or 3");
  c.mass = torus.number("mass", 0.0);
  if (c.mass < 0.0) throw ConfigError("/torus/mass", "must be non-negative");
  c.cutoff = r.integer("cutoff");
  if (c.cutoff < 1) throw ConfigError("/cutoff", "must be at least 1");

  if (r.has("model")) {
    const Reader m(r.raw("model"), "/model");
    m.allow_only({"type", "coeffs", "counterterm_scale"});
    c.model.type = m.string("type", std::string("phi4_line"));
    check_choice(c.model.type, {"gff", "phi4_line", "pphi2"}, "/model/type");
    c.model.coeffs = m.list<double>("coeffs");
    c.model.counterterm_scale = m.number("counterterm_scale", 1.0);
    if (!(c.model.counterterm_scale > 0.0)) {
      throw ConfigError("/model/counterterm_scale", "must be positive");
    }
  }
  if (r.has("z1")) c.z1 = read_modes(r.raw("z1"), "/z1");
  if (r.has("z2")) c.z2 = read_modes(r.raw("z2"), "/z2");

  if (r.has("ball")) {
    const Reader b(r.raw("ball"), "/ball");
    b.allow_only({"kind", "alpha", "norm", "degree", "kappa", "levels", "counterterm_scale", "partition"});
    c.ball.kind = b.string("kind", std::string("plain"));
    check_choice(c.ball.kind, {"plain", "enhanced_p", "enhanced_3d", "fully_renormalized_3d"},
                 "/ball/kind");
    c.ball.alpha = b.number("alpha", 0.0);
    c.ball.norm = b.string("norm", std::string("besov"));
    check_choice(c.ball.norm, {"besov", "sup"}, "/ball/norm");
    c.ball.degree = b.integer("degree", 4);
    c.ball.kappa = b.number("kappa", 0.2);
    c.ball.levels = b.list<int>("levels");
    c.ball.counterterm_scale = b.number("counterterm_scale", 1.0);
    c.ball.partition = b.string("partition", std::string("smooth"));
    check_choice(c.ball.partition, {"smooth", "sharp"}, "/ball/partition");
  }

  c.r_values = r.list<double>("r_values");
  for (std::size_t i = 0; i < c.r_values.size(); ++i) {
    if (!(c.r_values[i] > 0.0)) throw ConfigError("/r_values/" + std::to_string(i), "must be positive");
  }
  c.levels = r.list<int>("levels");
  c.schedule = r.string("schedule", std::string("square_root"));
  check_choice(c.schedule, {"square_root", "explicit"}, "/schedule");
  c.remainder_r = r.list<double>("remainder_r");

  if (r.has("sampler")) {
    const Reader s(r.raw("sampler"), "/sampler");
    s.allow_only({"count", "seed", "batches", "threads"});
    c.sampler.count = s.unsigned_integer("count", c.sampler.count);
    c.sampler.seed = s.unsigned_integer("seed", c.sampler.seed);
    c.sampler.batches = s.integer("batches", c.sampler.batches);
    c.sampler.threads = s.integer("threads", c.sampler.threads);
    if (c.sampler.batches < 2) throw ConfigError("/sampler/batches", "must be at least 2");
    if (c.sampler.count < static_cast<std::size_t>(c.sampler.batches)) {
      throw ConfigError("/sampler/count", "must be at least the number of batches");
    }
    if (c.sampler.threads < 0) throw ConfigError("/sampler/threads", "must be non-negative");
  }
  if (r.has("output")) {
    const Reader o(r.raw("output"), "/output");
    o.allow_only({"dir"});
    c.out_dir = o.string("dir", std::string("results"));
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  return {{"experiment", c.experiment},
          {"procedure", procedure_name(c.procedure)},
          {"torus", {{"dim", c.dim}, {"mass", c.mass}}},
          {"cutoff", c.cutoff},
          {"model",
           {{"type", c.model.type},
            {"coeffs", c.model.coeffs},
            {"counterterm_scale", c.model.counterterm_scale}}},
          {"z1", write_modes(c.z1, c.dim)},
          {"z2", write_modes(c.z2, c.dim)},
          {"ball",
           {{"kind", c.ball.kind},
            {"alpha", c.ball.alpha},
            {"norm", c.ball.norm},
            {"degree", c.ball.degree},
            {"kappa", c.ball.kappa},
            {"levels", c.ball.levels},
            {"counterterm_scale", c.ball.counterterm_scale},
            {"partition", c.ball.partition}}},
          {"r_values", c.r_values},
          {"levels", c.levels},
          {"schedule", c.schedule},
          {"remainder_r", c.remainder_r},
          {"sampler",
           {{"count", c.sampler.count},
            {"seed", c.sampler.seed},
            {"batches", c.sampler.batches},
            {"threads", c.sampler.threads}}},
          {"output", {{"dir", c.out_dir}}}};
}

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"om1d",       "om2d-enhanced", "omP2",
                                            "degeneracy3d", "wickcube-log", "joint-limit",
                                            "third-order",  "oracle-suite"};
  return ids;
}

ExperimentConfig preset(const std::string& id) {
  if (id == "om1d") {
    ExperimentConfig c = base(id, Procedure::OmScan, 1, 32);
    c.model.type = "phi4_line";
    c.z1 = {mode(1, 0, 0, 1.0)};
    c.z2 = {mode(2, 0, 0, 0.5)};
    c.ball.kind = "plain";
    c.ball.alpha = 0.25;
    c.r_values = {0.4, 0.2, 0.1, 0.05};
    c.sampler.count = 1000000;
    return c;
  }
  if (id == "om2d-enhanced") {
    ExperimentConfig c = base(id, Procedure::OmScan, 2, 16);
    c.model.type = "pphi2";
    c.model.coeffs = {0.0, 0.0, 0.0, 0.0, 0.25};
    c.z1 = {mode(1, 0, 0, 0.15)};
    c.z2 = {mode(1, 1, 0, 0.1)};
    c.ball.kind = "enhanced_p";
    c.ball.alpha = 0.3;
    c.ball.degree = 4;
    c.r_values = {4.0, 3.0, 2.5, 2.0};
    c.remainder_r = c.r_values;
    c.sampler.count = 200000;
    return c;
  }
  if (id == "omP2") {
    ExperimentConfig c = base(id, Procedure::OmScan, 2, 8);
    c.model.type = "pphi2";
    c.model.coeffs = {0.0, 0.0, 0.0, 0.0, 0.25, 0.0, 0.05};
    c.z1 = {mode(1, 0, 0, 0.15)};
    c.z2 = {mode(1, 1, 0, 0.1)};
    c.ball.kind = "enhanced_p";
    c.ball.alpha = 0.3;
    c.ball.degree = 6;
    c.r_values = {8.0, 6.0, 5.0};
    c.sampler.count = 100000;
    return c;
  }
  if (id == "degeneracy3d") {
    ExperimentConfig c = base(id, Procedure::Degeneracy3D, 3, 8);
    c.z1 = {mode(1, 0, 0, 1.0)};
    c.ball.kind = "enhanced_3d";
    c.ball.kappa = 0.2;
    c.ball.levels = {2, 4, 8};
    c.levels = {2, 4, 8};
    const TorusSpec t(3);
    c.r_values = {0.1 * besov_norm(FourierField::cosine(t, 8, {1, 0, 0}), -0.5 - c.ball.kappa)};
    c.sampler.count = 100000;
    return c;
  }
  if (id == "wickcube-log") {
    ExperimentConfig c = base(id, Procedure::WickCubeLog, 3, 8);
    c.z1 = {mode(1, 0, 0, 1.0)};
    c.levels = {2, 4, 8};
    c.sampler.count = 100000;
    return c;
  }
  if (id == "joint-limit" || id == "third-order") {
    const bool third = id == "third-order";
    ExperimentConfig c = base(id, third ? Procedure::ThirdOrder : Procedure::JointLimit, 3, 4);
    c.z1 = {mode(1, 0, 0, 0.3)};
    c.z2 = third ? std::vector<ModeTerm>{mode(0, 1, 0, 0.2), mode(1, 1, 0, 0.1)}
                 : std::vector<ModeTerm>{mode(2, 0, 0, 0.3)};
    c.ball.kind = "enhanced_3d";
    c.ball.kappa = 0.2;
    c.ball.levels = {2, 4};
    c.r_values = {0.4, 0.2, 0.1};
    c.schedule = "square_root";
    c.sampler.count = 100000;
    return c;
  }
  if (id == "oracle-suite") {
    ExperimentConfig c = base(id, Procedure::OracleSuite, 1, 2);
    c.model.type = "gff";
    c.z1 = {mode(1, 0, 0, 0.1), mode(2, 0, 0, -0.05)};
    c.z2 = {mode(1, 0, 0, 0.2), {{2, 0, 0}, 0.1, true}};
    c.ball.kind = "plain";
    c.ball.alpha = 0.25;
    c.r_values = {0.6, 0.3, 0.15};
    c.sampler.count = 100000;
    return c;
  }
  std::string valid;
  for (const std::string& p : preset_ids()) valid += (valid.empty() ? "" : ", ") + p;
  throw ConfigError("", "unknown preset '" + id + "'; valid presets: " + valid);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("", "override '" + assignment + "' is not of the form key=value");
  }
  std::string pointer = "/" + assignment.substr(0, eq);
  for (char& ch : pointer) {
    if (ch == '.') ch = '/';
  }
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  try {
    j[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw ConfigError(pointer, e.what());
  }
}

RunResult run_experiment(const ExperimentConfig& c) {
  const TorusSpec torus(c.dim, c.mass);
  switch (c.procedure) {
    case Procedure::OmScan:
      return run_om_scan(c, torus);
    case Procedure::Degeneracy3D:
      return run_degeneracy(c, torus);
    case Procedure::WickCubeLog:
      return run_wick_cube(c, torus);
    case Procedure::JointLimit:
      return run_joint(c, torus, false);
    case Procedure::ThirdOrder:
      return run_joint(c, torus, true);
    case Procedure::OracleSuite:
      return run_oracle_suite(c, torus);
  }
  throw std::logic_error("unhandled procedure");
}

void write_csv(std::ostream& out, const std::string& experiment, const std::vector<ResultRow>& rows) {
  out << "experiment,r,n,estimate,stderr,ess,predicted,log_estimate,log_predicted,degenerate\n";
  for (const ResultRow& r : rows) {
    const Estimate& e = r.estimate;
    out << experiment << ',' << format_number(r.r) << ',' << r.n << ',' << format_number(e.value)
        << ',' << format_number(e.std_error) << ',' << format_number(e.ess) << ','
        << format_number(r.predicted) << ',' << format_number(e.log_value) << ','
        << format_number(r.log_predicted) << ',' << (e.degenerate ? 1 : 0) << '\n';
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Onsager-Machlup experiments on the torus"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  app.add_option("--seed", seed, "Override the sampler seed");
  app.add_option("--threads", threads, "Worker threads (0: all hardware threads)");
  app.add_option("--out", out_dir, "Directory for the CSV table and JSON manifest");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config or manifest");
  run->add_option("config", config_path, "Config file")->required();

  std::string preset_id;
  std::vector<std::string> overrides;
  auto* pre = app.add_subcommand("preset", "Run a named preset");
  pre->add_option("id", preset_id, "Preset id")->required();
  pre->add_option("--override", overrides, "key=value, with dotted keys (e.g. sampler.count=1000)");

  auto* list = app.add_subcommand("list-presets", "Print the preset ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (list->parsed()) {
    for (const std::string& id : preset_ids()) out << id << '\n';
    return 0;
  }

  ExperimentConfig config;
  try {
    json j;
    if (run->parsed()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("", "cannot open '" + config_path + "'");
      j = json::parse(in, nullptr, false);
      if (j.is_discarded()) throw ConfigError("", "'" + config_path + "' is not valid JSON");
      // A manifest carries its config.
      if (j.is_object() && j.contains("config") && !j.contains("procedure")) j = j["config"];
    } else {
      j = to_json(preset(preset_id));
      for (const std::string& o : overrides) apply_override(j, o);
    }
    if (seed) j["sampler"]["seed"] = *seed;
    if (threads) j["sampler"]["threads"] = *threads;
    if (out_dir) j["output"]["dir"] = *out_dir;
    config = config_from_json(j);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return 1;
  }

  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    result = run_experiment(config);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    const fs::path csv = fs::path(config.out_dir) / (config.experiment + ".csv");
    const fs::path manifest = fs::path(config.out_dir) / (config.experiment + ".manifest.json");
    {
      std::ofstream f(csv);
      write_csv(f, config.experiment, result.rows);
      if (!f) throw std::runtime_error("cannot write " + csv.string());
    }
    std::size_t degenerate = 0;
    for (const ResultRow& r : result.rows) degenerate += r.estimate.degenerate ? 1 : 0;
    const json m{{"experiment", config.experiment},
                 {"config", to_json(config)},
                 {"seed", config.sampler.seed},
                 {"threads", resolve_threads(config.sampler.threads)},
                 {"version", OMLAB_VERSION},
                 {"compiler", __VERSION__},
                 {"wall_time_seconds", seconds},
                 {"rows", result.rows.size()},
                 {"degenerate_rows", degenerate},
                 {"csv", csv.filename().string()},
                 {"summary", result.summary}};
    {
      std::ofstream f(manifest);
      f << m.dump(2) << '\n';
      if (!f) throw std::runtime_error("cannot write " + manifest.string());
    }
    write_csv(out, config.experiment, result.rows);
    out << "wrote " << csv.string() << " and " << manifest.string() << '\n';
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
  return result.has_degenerate() ? 2 : 0;
}

}  // namespace omlab::cli
