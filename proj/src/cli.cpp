#include "kharmonic/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "kharmonic/equations.hpp"
#include "kharmonic/geometry.hpp"
#include "kharmonic/profile.hpp"

namespace kharmonic::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Writes through `out`, or into --output when given.
int emit(const CommandConfig& config, std::ostream& out, std::ostream& err,
         const std::function<int(std::ostream&)>& body) {
  if (config.output_path.empty()) return body(out);
  std::ofstream file(config.output_path);
  if (!file) {
    err << "error: cannot open output file " << config.output_path << "\n";
    return kFailure;
  }
  return body(file);
}

std::string format_or(const CommandConfig& c, const std::string& fallback, std::initializer_list<const char*> allowed) {
  const std::string f = c.format.empty() ? fallback : c.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw UsageError("format '" + f + "' is not supported by " + c.subcommand);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

CurvatureProfile build_profile(const CommandConfig& c) {
  CurvatureProfile profile;
  if (!c.profile_path.empty()) {
    std::ifstream in(c.profile_path);
    if (!in) throw UsageError("cannot read profile file " + c.profile_path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      profile = parse_profile_config(buf.str());
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  for (const auto& line : c.kappas) {
    try {
      apply_profile_line(profile, line);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return profile;
}

void validate_curve_settings(const CommandConfig& c) {
  if (!(c.h > 0) || !std::isfinite(c.h)) throw UsageError("--h must be > 0");
  if (!(c.t_end > 0) || !std::isfinite(c.t_end)) throw UsageError("--t-end must be > 0");
  if (c.dim.value_or(2) < 2) throw UsageError("--dim must be >= 2");
  if (c.reorth_every < 0) throw UsageError("--reorth-every must be >= 0");
  if (!std::isfinite(c.K)) throw UsageError("--K must be finite");
}

CurveTrace integrate_from_config(const CommandConfig& c, const CurvatureProfile& profile) {
  const ModelSpace space = make_model_space(c.K, c.dim.value_or(2));
  IntegratorSettings settings;
  settings.reorthonormalize_every = c.reorth_every;
  return integrate_frenet(space, profile, initial_state(space), c.t_end, c.h, settings);
}

// Keys given on the command line, as "--name".
std::set<std::string> present_flags(const std::vector<std::string>& args) {
  std::set<std::string> out;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) out.insert(a.substr(0, a.find('=')));
    if (a == "-o") out.insert("--output");
  }
  return out;
}

// Appends "--key value" pairs from a key = value file for keys absent on the command line.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  const std::set<std::string> given = present_flags(args);
  std::string line;
  int n = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(n) + ": expected key = value");
    const std::string key = "--" + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "--config" || given.count(key)) continue;
    if (key == "--omit-relation") {
      if (value == "true") extra.push_back(key);
      else if (value != "false") throw UsageError("config line " + std::to_string(n) + ": expected true or false");
      continue;
    }
    extra.push_back(key);
    extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

std::vector<int> parse_k_list(const std::string& spec) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(trim(s), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("invalid k list '" + spec + "'");
    }
    if (used != trim(s).size()) throw std::invalid_argument("invalid k list '" + spec + "'");
    return v;
  };
  if (auto dots = spec.find(".."); dots != std::string::npos) {
    const int lo = to_int(spec.substr(0, dots));
    const int hi = to_int(spec.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty k range '" + spec + "'");
    for (int k = lo; k <= hi; ++k) out.push_back(k);
  } else {
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_int(item));
  }
  if (out.empty()) throw std::invalid_argument("empty k list");
  return out;
}

int cmd_derive(const CommandConfig& c, std::ostream& out, std::ostream& err) {
  if (c.k < 2) {
    err << "error: derive requires --k >= 2 (k = 1 is harmonicity: the tension field kappa_1 e_2 must vanish)\n";
    return kUsage;
  }
  const int dim = c.dim.value_or(2 * c.k + 2);
  if (dim < 2) {
    err << "error: --dim must be >= 2\n";
    return kUsage;
  }
  const std::string format = format_or(c, "text", {"text", "json"});
  const EquationSystem raw = kharmonic_system(c.k, dim);
  const EquationSystem prim = canonicalize_system(raw, CanonicalMode::primitive);

  return emit(c, out, err, [&](std::ostream& os) {
    if (format == "json") {
      nlohmann::json j;
      j["version"] = kVersion;
      j["k"] = c.k;
      j["dim"] = dim;
      j["raw"] = nlohmann::json::array();
      j["primitive"] = nlohmann::json::array();
      for (int i = 0; i < dim; ++i) {
        j["raw"].push_back(to_text(raw.equations[static_cast<std::size_t>(i)]));
        j["primitive"].push_back(to_text(prim.equations[static_cast<std::size_t>(i)]));
      }
      os << j.dump(2) << "\n";
    } else {
      os << "# " << c.k << "-harmonic system in dimension " << dim << " (component e_i = 0)\n";
      os << "raw:\n";
      for (int i = 0; i < dim; ++i) os << "  e" << i + 1 << ": " << to_text(raw.equations[static_cast<std::size_t>(i)]) << "\n";
      os << "primitive:\n";
      for (int i = 0; i < dim; ++i) os << "  e" << i + 1 << ": " << to_text(prim.equations[static_cast<std::size_t>(i)]) << "\n";
    }
    return kSuccess;
  });
}

int cmd_verify(const CommandConfig& c, std::ostream& out, std::ostream& err) {
  if (c.kmax < 2) {
    err << "error: --kmax must be >= 2\n";
    return kUsage;
  }
  static const std::vector<std::string> kTargets = {"Eq7", "Expansion2", "Prop4", "Prop5", "Thm6"};
  if (!c.target.empty() && std::find(kTargets.begin(), kTargets.end(), c.target) == kTargets.end()) {
    err << "error: unknown target '" << c.target << "' (expected Eq7, Expansion2, Prop4, Prop5 or Thm6)\n";
    return kUsage;
  }
  const std::string format = format_or(c, "text", {"text", "json"});
  std::vector<VerificationReport> reports;
  for (const auto& t : kTargets) {
    if (!c.target.empty() && c.target != t) continue;
    reports.push_back(t == "Thm6" ? verify_biharmonic_implies_kharmonic(c.kmax, !c.omit_relation)
                                  : verify_proposition(t));
  }
  bool ok = true;
  std::vector<std::string> notes;
  for (const auto& r : reports) {
    ok = ok && r.passed();
    for (const auto& n : r.notes)
      if (std::find(notes.begin(), notes.end(), n) == notes.end()) notes.push_back(n);
  }

  return emit(c, out, err, [&](std::ostream& os) {
    if (format == "json") {
      nlohmann::json j;
      j["version"] = kVersion;
      j["reports"] = nlohmann::json::array();
      for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
      j["notes"] = notes;
      j["pass"] = ok;
      os << j.dump(2) << "\n";
    } else {
      for (const auto& r : reports) {
        os << (r.passed() ? "PASS " : "FAIL ") << r.target << " [" << to_string(r.status) << "]\n";
        for (const auto& m : r.per_equation) {
          if (!r.passed() || (m.scale && *m.scale != 1)) {
            os << "  " << (r.target.rfind("Thm6", 0) == 0 ? "k=" : "e") << m.index << ": "
               << (m.match ? "match" : "MISMATCH");
            if (m.scale) os << " scale " << m.scale->get_str();
            os << " (" << m.detail << ")\n";
          }
        }
      }
      for (const auto& n : notes) os << "note: " << n << "\n";
    }
    if (!ok) err << "verification failed\n";
    return ok ? kSuccess : kFailure;
  });
}

int cmd_integrate(const CommandConfig& c, std::ostream& out, std::ostream& err) {
  validate_curve_settings(c);
  format_or(c, "csv", {"csv"});
  std::vector<int> residual_ks;
  if (!c.residual_k_list.empty()) {
    try {
      residual_ks = parse_k_list(c.residual_k_list);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    for (int k : residual_ks)
      if (k < 2) throw UsageError("residual k must be >= 2");
  }
  const CurvatureProfile profile = build_profile(c);
  for (int k : residual_ks) {
    if (profile.max_available_order() < 2 * k - 2) {
      err << "error: residual for k = " << k << " needs curvature derivatives up to order " << 2 * k - 2
          << " but the profile supplies order " << profile.max_available_order() << "\n";
      return kUsage;
    }
  }
  CurveTrace trace;
  try {
    trace = integrate_from_config(c, profile);
  } catch (const ConstraintViolation& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  const int rc = emit(c, out, err, [&](std::ostream& os) {
    write_trace_csv(os, trace, residual_ks);
    return kSuccess;
  });
  err << "samples: " << trace.states.size() << ", step: " << fmt(trace.step) << "\n";
  err << "max drift (before correction): " << fmt(trace.max_drift) << "\n";
  err << "closure error |p(end) - p(0)|: " << fmt(closure_error(trace)) << "\n";
  return rc;
}

int cmd_check_curve(const CommandConfig& c, std::ostream& out, std::ostream& err) {
  validate_curve_settings(c);
  const std::string format = format_or(c, "text", {"text", "json"});
  std::vector<int> ks;
  try {
    ks = parse_k_list(c.k_list.empty() ? std::to_string(c.k) : c.k_list);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (int k : ks)
    if (k < 2) throw UsageError("check-curve requires k >= 2");
  if (!(c.tol >= 0)) throw UsageError("--tol must be >= 0");
  const CurvatureProfile profile = build_profile(c);
  const int needed = 2 * *std::max_element(ks.begin(), ks.end()) - 2;
  if (profile.max_available_order() < needed) {
    err << "error: residuals need curvature derivatives up to order " << needed << " but the profile supplies order "
        << profile.max_available_order() << "\n";
    return kUsage;
  }
  CurveTrace trace;
  try {
    trace = integrate_from_config(c, profile);
  } catch (const ConstraintViolation& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }

  struct Row {
    int k;
    double max;
    double mean;
    bool pass;
  };
  std::vector<Row> rows;
  bool all_pass = true;
  for (int k : ks) {
    const std::vector<double> r = numeric_residual(trace, k);
    const double mx = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
    const double mean = r.empty() ? 0.0 : std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    rows.push_back({k, mx, mean, mx <= c.tol});
    all_pass = all_pass && rows.back().pass;
  }

  const int rc = emit(c, out, err, [&](std::ostream& os) {
    if (format == "json") {
      nlohmann::json j;
      j["version"] = kVersion;
      j["space"] = {{"kind", to_string(trace.space.kind)}, {"K", trace.space.K}, {"dim", trace.space.dim}};
      j["step"] = trace.step;
      j["t_end"] = c.t_end;
      j["samples"] = trace.states.size();
      j["tol"] = c.tol;
      j["max_drift"] = trace.max_drift;
      j["results"] = nlohmann::json::array();
      for (const auto& row : rows) {
        j["results"].push_back({{"k", row.k}, {"max", row.max}, {"mean", row.mean}, {"pass", row.pass}});
      }
      j["pass"] = all_pass;
      os << j.dump(2) << "\n";
    } else {
      os << "space: " << to_string(trace.space.kind) << " K=" << fmt(trace.space.K) << " dim=" << trace.space.dim
         << ", samples: " << trace.states.size() << ", step: " << fmt(trace.step) << "\n";
      for (const auto& row : rows) {
        os << "k=" << row.k << " max=" << fmt(row.max) << " mean=" << fmt(row.mean) << " "
           << (row.pass ? "ok" : "ABOVE TOL") << "\n";
      }
    }
    return kSuccess;
  });
  if (rc != kSuccess) return rc;
  return all_pass ? kSuccess : kAboveTol;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Derivation, verification and numerical checks of k-harmonic curve equations", "kharmonic"};
  // "-h" is left free so the step option can be spelled --h.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  CommandConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--output,-o", c.output_path, "Write output to this file");
    sub->add_option("--config", "Key-value file mirroring the flags (flags win)");
  };
  auto add_curve = [&](CLI::App* sub) {
    sub->add_option("--K", c.K, "Sectional curvature of the target space");
    sub->add_option("--dim", c.dim, "Target dimension n");
    sub->add_option("--kappa", c.kappas, "Curvature profile entry, e.g. 'k1 = constant value=1'");
    sub->add_option("--profile", c.profile_path, "Curvature profile config file");
    sub->add_option("--h", c.h, "Integrator step");
    sub->add_option("--t-end", c.t_end, "Arclength to integrate to");
    sub->add_option("--reorth-every", c.reorth_every, "Re-orthonormalization cadence in steps (0 = never)");
  };

  auto* derive = app.add_subcommand("derive", "Derive the k-harmonic ODE system");
  derive->add_option("--k", c.k, "Order k >= 2")->required();
  derive->add_option("--dim", c.dim, "Target dimension (default 2k+2)");
  add_common(derive);

  auto* verify = app.add_subcommand("verify", "Check the engine against the reference transcriptions");
  verify->add_option("--kmax", c.kmax, "Largest k for the biharmonic => k-harmonic check");
  verify->add_option("--target", c.target, "Eq7 | Expansion2 | Prop4 | Prop5 | Thm6");
  verify->add_flag("--omit-relation", c.omit_relation, "Drop K -> k1^2 + k2^2 from the biharmonic conditions");
  add_common(verify);

  auto* integrate = app.add_subcommand("integrate", "Integrate a curve with a prescribed curvature profile");
  add_curve(integrate);
  integrate->add_option("--residual-k", c.residual_k_list, "Add tau_k residual columns, e.g. 2..4");
  add_common(integrate);

  auto* check = app.add_subcommand("check-curve", "Integrate a curve and report its tau_k residuals");
  add_curve(check);
  check->add_option("--k", c.k_list, "k, list or range (2..6)");
  check->add_option("--tol", c.tol, "Residual tolerance");
  add_common(check);

  try {
    std::vector<std::string> args = merge_config_file(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (derive->parsed()) {
      c.subcommand = "derive";
      return cmd_derive(c, out, err);
    }
    if (verify->parsed()) {
      c.subcommand = "verify";
      return cmd_verify(c, out, err);
    }
    if (integrate->parsed()) {
      c.subcommand = "integrate";
      return cmd_integrate(c, out, err);
    }
    c.subcommand = "check-curve";
    return cmd_check_curve(c, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const MissingDerivative& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace kharmonic::cli
