#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gravaudit/dsl/document.hpp"

namespace gva::harness {

inline constexpr const char* kEngineVersion = "gravaudit 1.0.0";

enum ExitCode : int { kPass = 0, kInvariantFailure = 1, kConfigError = 2, kDomainError = 3 };

/// Bad flags, unknown metric, unreadable file, inconsistent options.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AuditConfig {
  std::string metric;       // catalog name or .gmet path; empty selects the command default
  ParamMap overrides;
  double lambda = 0.0;
  std::size_t samples = 0;  // 0 selects the command default
  std::uint64_t seed = 42;
  double tol = 0.0;         // 0 selects the command default
  std::string out;          // empty: stdout
  std::string format;       // json | csv | svg; empty selects the command default
  std::size_t jobs = 1;

  // horizons
  int kmin = 0, kmax = 2;
  std::vector<std::string> cases{"I", "II"};
  std::vector<std::string> arcs{"principal", "conjugate"};

  // construct
  std::string ansatz = "x";
  std::string template_path;
  double x_lo = 0.0, x_hi = 2.0;

  // identities negative control
  double q_scale = 1.0;
};

/// One generated artifact. `path` is empty for stdout output.
struct Artifact {
  std::string path;
  std::string bytes;
};

struct RunResult {
  int exit_code = kPass;
  std::vector<Artifact> artifacts;
  std::string message;  // human summary for stderr
};

RunResult run_verify(const AuditConfig& config);
RunResult run_identities(const AuditConfig& config);
RunResult run_horizons(const AuditConfig& config);
RunResult run_construct(const AuditConfig& config);

/// Resolves a catalog name or reads and parses a .gmet file.
MetricSpec load_metric(const std::string& source, const ParamMap& overrides, ParamMap& bound);

/// JSON with two-space indent, keys in insertion order and every number
/// rendered with 17 significant digits; non-finite numbers become null.
std::string dump_json(const nlohmann::ordered_json& j);
/// %.17g
std::string format_number(double v);

}  // namespace gva::harness
