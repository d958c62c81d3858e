#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kharmonic::cli {

inline constexpr const char* kVersion = "kharmonic 0.1.0";

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,     // verification mismatch or runtime failure
  kUsage = 2,       // invalid arguments
  kAboveTol = 3,    // residual above tolerance
};

struct CommandConfig {
  std::string subcommand;
  int k = 2;
  std::optional<int> dim;
  int kmax = 10;
  std::string target;  // empty: every target
  bool omit_relation = false;
  double K = 1.0;
  std::vector<std::string> kappas;  // "k1 = constant value=1"
  std::string profile_path;
  double h = 1e-3;
  double t_end = 6.283185307179586;
  int reorth_every = 100;
  std::string k_list;           // check-curve: "2..6" or "2,3,5"
  std::string residual_k_list;  // integrate: extra CSV residual columns
  double tol = 1e-8;
  std::string format;  // json | csv | text; empty picks the subcommand default
  std::string output_path;
};

/// Parses "2..6", "2,4,5" or "3" into a list of integers. Throws std::invalid_argument.
std::vector<int> parse_k_list(const std::string& spec);

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_derive(const CommandConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandConfig& config, std::ostream& out, std::ostream& err);
int cmd_integrate(const CommandConfig& config, std::ostream& out, std::ostream& err);
int cmd_check_curve(const CommandConfig& config, std::ostream& out, std::ostream& err);

}  // namespace kharmonic::cli
