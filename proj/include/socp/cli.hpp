#pragma once

// Command-line front end: solve, check, list.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socp/auglag.hpp"
#include "socp/conditions.hpp"
#include "socp/model.hpp"
#include "socp/sqp.hpp"

namespace socp::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kNotConverged = 2, kError = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Text, Json };

struct ProblemSource {
  std::string builtin;
  std::string spec_path;
  Problem load() const;
  std::string label() const { return builtin.empty() ? spec_path : builtin; }
};

struct RunConfig {
  std::vector<ProblemSource> problems;
  std::string solver = "auglag";
  std::vector<std::string> overrides;  // key=value
  std::string trace_path, cert_path;
  std::optional<Vector> hint;
  int jobs = 1;
  unsigned long long seed = 0;
  Format format = Format::Text;
};

struct CheckRequest {
  ProblemSource problem;
  Vector x, mu, omega;
  std::string sequence_path;
  std::vector<std::string> checks = {"kkt", "akkt", "cakkt", "akkt2", "wsonc", "robinson", "wcr"};
  double tol = 1e-8;
  std::optional<double> rho;
  std::optional<Vector> direction;
  std::string cert_path;
  unsigned long long seed = 0;
  Format format = Format::Text;
};

/// Parses "1,2.5,-3" strictly.
Vector parse_vector(const std::string& text);

/// Applies key=value overrides; throws UsageError on unknown keys or bad values.
void apply_overrides(AuglagConfig& c, const std::vector<std::string>& kv, Vector* x0);
void apply_overrides(SqpConfig& c, const std::vector<std::string>& kv, Vector* x0, Vector* mu0, Vector* omega0);
void apply_overrides(PenaltyPathOptions& c, const std::vector<std::string>& kv);

/// Throws UsageError naming the first block with eta_min < -1e-9.
void validate_omega(const ConeProduct& cone, std::span<const double> omega);

std::vector<std::string> registry();

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check(const CheckRequest& req, std::ostream& out, std::ostream& err);
int cmd_list(Format format, std::ostream& out);

/// Full argument parsing and dispatch.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace socp::cli
