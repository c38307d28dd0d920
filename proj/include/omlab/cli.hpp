#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "omlab/estimate.hpp"
#include "omlab/torus.hpp"

namespace omlab::cli {

/// A configuration problem, tagged with the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error("config error at " + (path.empty() ? std::string("/") : path) + ": " +
                           message),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Procedure { OmScan, Degeneracy3D, WickCubeLog, JointLimit, ThirdOrder, OracleSuite };

/// amplitude * sqrt(2) cos(2 pi k.x), or the sine when `sine` is set.
struct ModeTerm {
  Mode k{0, 0, 0};
  double amplitude = 0.0;
  bool sine = false;
};

struct ModelConfig {
  std::string type = "phi4_line";  // gff, phi4_line, pphi2 (3D procedures build their own)
  std::vector<double> coeffs;
  double counterterm_scale = 1.0;
};

struct BallConfig {
  std::string kind = "plain";  // plain, enhanced_p, enhanced_3d, fully_renormalized_3d
  double alpha = 0.0;
  std::string norm = "besov";  // besov or sup, plain balls only
  int degree = 4;
  double kappa = 0.2;
  std::vector<int> levels;
  double counterterm_scale = 1.0;
  std::string partition = "smooth";
};

struct ExperimentConfig {
  std::string experiment;
  Procedure procedure = Procedure::OmScan;
  int dim = 1;
  double mass = 0.0;
  int cutoff = 8;
  ModelConfig model;
  std::vector<ModeTerm> z1;
  std::vector<ModeTerm> z2;
  BallConfig ball;
  std::vector<double> r_values;
  /// Levels of a degeneracy or Wick-cube scan, or of an explicit schedule.
  std::vector<int> levels;
  /// "square_root" (n = ceil(r^{-1/2})) or "explicit" (uses `levels`).
  std::string schedule = "square_root";
  /// Radii of the optional remainder scan that accompanies enhanced OM scans.
  std::vector<double> remainder_r;
  SamplerOptions sampler;
  std::string out_dir = "results";
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

const std::vector<std::string>& preset_ids();
/// Throws ConfigError listing the valid ids for an unknown id.
ExperimentConfig preset(const std::string& id);

/// Applies "a.b.c=value" to j; the value is parsed as JSON when possible and
/// taken as a string otherwise.
void apply_override(nlohmann::json& j, const std::string& assignment);

struct ResultRow {
  double r = 0.0;  // NaN when the row has no radius
  int n = 0;
  Estimate estimate;
  double predicted = 0.0;
  double log_predicted = 0.0;
};

struct RunResult {
  std::vector<ResultRow> rows;
  nlohmann::json summary = nlohmann::json::object();
  bool has_degenerate() const;
};

RunResult run_experiment(const ExperimentConfig& config);

/// Header: experiment,r,n,estimate,stderr,ess,predicted,log_estimate,log_predicted,degenerate
void write_csv(std::ostream& out, const std::string& experiment, const std::vector<ResultRow>& rows);

/// Entry point of the omlab tool. Exit codes: 0 success, 1 configuration error,
/// 2 finished with degenerate rows, 3 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace omlab::cli
