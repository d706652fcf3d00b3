#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "divcert/certificate.hpp"
#include "divcert/objective.hpp"

namespace divcert {

/// Bad config file: unreadable, malformed JSON, or an invalid field. The
/// message starts with the file name and either line:column or a field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Algorithm { GD, NAG, Mirror, NagOde, AmdOde };

const char* algorithm_name(Algorithm a);

struct ExperimentConfig {
  std::string name;
  nlohmann::json problem_json;
  ObjectivePtr problem;
  Algorithm algorithm = Algorithm::NAG;
  std::string schedule;  // constant-eta | nesterov | polynomial | custom; empty for ODEs
  std::optional<double> eta;
  std::vector<double> custom_A;
  Vector x0;
  std::size_t k_max = 0;
  double t_end = 0.0;
  double dt = 0.0;
  double r = 2.0;  // nag_ode
  double R = 4.0;  // amd_ode
  std::string csv_path;
  std::string summary_path;
  bool assert_bounds = false;
  std::uint64_t seed = 0;

  bool is_ode() const { return algorithm == Algorithm::NagOde || algorithm == Algorithm::AmdOde; }
};

/// `where` prefixes error messages; `base_dir` resolves a problem given as a
/// file name.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& where,
                              const std::filesystem::path& base_dir, const std::string& default_name);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Reads a JSON file, reporting syntax errors as file:line:column.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// What is known exactly about an instance: the minimum-norm dual point, the
/// infimum of the shifted function, and D = g(x0) - inf g.
struct GroundTruth {
  std::optional<Vector> p_star;
  std::optional<double> inf_g;
  bool inf_g_exact = false;
  std::optional<double> D;
  bool D_exact = false;
  std::optional<double> M;
  std::vector<std::string> notes;
};

GroundTruth ground_truth(const ObjectivePtr& f, const Vector& x0);

struct AssertionResult {
  std::string name;
  bool pass = true;
  double max_slack = 0.0;  // largest lhs / rhs, 0 if no positive rhs
  std::size_t checked = 0;
  std::string first_failure;
};

struct RunResult {
  std::string name;
  std::string csv;
  nlohmann::json summary;
  std::vector<AssertionResult> assertions;
  CertificateReport report;
  double max_bound_slack = 0.0;

  bool pass() const;
};

/// Runs one experiment in memory; no files are touched.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// CLI entry points; each returns the process exit code (0 ok, 1 config or
/// input error, 2 failed assertions).
int cli_run(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_dir,
            bool force_assert, std::ostream& out, std::ostream& err);
int cli_certify(const std::filesystem::path& problem, std::size_t budget, std::ostream& out, std::ostream& err);
int cli_sweep(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& out_dir,
              std::ostream& out, std::ostream& err, unsigned threads = 0);

}  // namespace divcert
