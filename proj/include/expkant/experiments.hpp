#pragma once

// Config-driven experiment runner and kernel admissibility audit.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "expkant/core_model.hpp"
#include "expkant/operator.hpp"
#include "expkant/report_io.hpp"

namespace expkant {

struct ProfileSpec {
  std::string name = "bspline";
  int order = 2;
};

struct ResponseSpec {
  std::string name = "identity";
  double alpha = 1.0;
  double r = 1.0;
};

struct KernelSpec {
  ProfileSpec profile;
  ResponseSpec response;
};

struct SchemeSpec {
  std::string kind = "uniform";
  double step = 1.0;
  double offset = 0.0;
  std::vector<double> nodes;
};

struct SignalSpec {
  std::string name;
  std::map<std::string, double> params;
};

struct GridSpec {
  double log_min = 0.0;
  double log_max = 0.0;
  int points = 801;
};

struct PhiSpec {
  std::string name = "power";
  double p = 2.0;
};

struct OutputSpec {
  std::filesystem::path dir = ".";
  std::string stem;  // default: the experiment name
};

struct ExperimentConfig {
  std::string experiment;
  KernelSpec kernel;
  SchemeSpec scheme;
  std::optional<SignalSpec> signal;
  std::vector<double> w_list;
  std::optional<GridSpec> grid;
  int points = 2048;  // operator samples for modular integrals
  std::optional<double> x;
  std::optional<double> r;
  std::optional<double> beta;
  int j = 2;
  std::optional<double> gamma;
  std::optional<double> lambda;
  double lambda0 = 1.0;
  bool lambda_sweep = false;
  std::uint64_t seed = 1;
  int pairs = 10;
  std::vector<double> betas;
  PhiSpec phi;
  std::optional<PhiSpec> eta;
  QuadratureSpec quadrature;
  TruncationPolicy truncation;
  OutputSpec output;
  Json source;  // the document as given
};

inline const std::set<std::string>& experiment_names() {
  static const std::set<std::string> names{
      "converge_uniform",  "converge_pointwise", "quantitative_3_2",
      "voronovskaja",      "modular_convergence", "modular_inequality",
      "quantitative_5_1",  "audit_kernel",        "moments"};
  return names;
}

// Throws ValidationError on unknown keys, unknown builtins or bad values.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

NonlinearKernel build_kernel(const KernelSpec& spec);
SamplingScheme build_scheme(const SchemeSpec& spec);
// "uniform:STEP[:OFFSET]" or "tabulated:t0,t1,...".
SchemeSpec parse_scheme_string(const std::string& text);
Signal build_signal(const SignalSpec& spec);

struct AuditOptions {
  std::vector<double> w_list;
  int j = 2;
  std::optional<double> beta;   // L2 order; default 1 (compact) or 1/2
  std::optional<double> r;      // L3 order; default as beta, capped at 1
  double gamma = 0.5;           // L3 and e3_1
  std::uint64_t seed = 1;
};

struct ConditionStatus {
  bool passed = false;
  std::string detail;
};

struct AuditReport {
  std::map<std::string, ConditionStatus> status;  // chi1 .. e3_1
  ConditionReport chi4_S, chi4_T, chi4_star, L3, e3_1;
  MomentReport L2;
  Json json;

  bool passed(const std::string& condition) const;
  // First failing condition among `required`, in the given order.
  std::optional<std::string> first_failure(const std::vector<std::string>& required) const;
};

AuditReport audit_kernel(const NonlinearKernel& kernel, const SamplingScheme& scheme,
                         const AuditOptions& options);

// Seeded random pairs of mollified indicators in the log variable.
std::vector<std::pair<Signal, Signal>> random_mollified_pairs(std::uint64_t seed, int count);

struct ExperimentOutcome {
  std::string experiment;
  bool passed = false;
  std::optional<std::string> aborted_condition;  // set when a precondition failed
  Json report;
  std::vector<Table> tables;
};

enum ExitCode : int { kExitPass = 0, kExitTheoremFailure = 2, kExitValidation = 3 };

// Precondition failures are caught and reported in the outcome; validation
// errors propagate.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

// The audit alone, whatever the config's experiment names.
ExperimentOutcome run_audit(const ExperimentConfig& config);

ExperimentOutcome run_moments(const ProfileSpec& profile, const SchemeSpec& scheme,
                              const std::vector<double>& betas);

// <dir>/<stem>.json, <dir>/<stem>.csv and <dir>/<stem>_<table>.csv.
std::vector<std::filesystem::path> write_outcome(const ExperimentOutcome& outcome,
                                                 const OutputSpec& output);

int exit_code(const ExperimentOutcome& outcome);

}  // namespace expkant
