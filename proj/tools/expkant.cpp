// expkant run <config.json> | audit <config.json> | moments --profile NAME --beta B

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "expkant/error.hpp"
#include "expkant/experiments.hpp"
#include "expkant/parallel.hpp"

namespace {

void print_summary(const expkant::ExperimentOutcome& o,
                   const std::vector<std::filesystem::path>& written) {
  std::cout << o.experiment << ": " << (o.passed ? "PASS" : "FAIL");
  if (o.aborted_condition) std::cout << " (precondition " << *o.aborted_condition << ")";
  std::cout << '\n';
  for (const auto& p : written) std::cout << "  wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear exponential Kantorovich sampling experiments"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: EXPKANT_THREADS or all cores)");

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Override output.dir");

  auto* audit = app.add_subcommand("audit", "Audit the kernel admissibility conditions of a config");
  audit->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  audit->add_option("--out", out_dir, "Override output.dir");

  std::string profile = "bspline";
  int order = 2;
  std::vector<double> betas;
  std::string scheme = "uniform:1";
  auto* moments = app.add_subcommand("moments", "Discrete absolute moments of a profile");
  moments->add_option("--profile", profile, "bspline or mellin_fejer")->required();
  moments->add_option("--order", order, "B-spline degree");
  moments->add_option("--beta", betas, "Moment order (repeatable)")->required();
  moments->add_option("--scheme", scheme, "uniform:STEP[:OFFSET] or tabulated:t0,t1,...");
  moments->add_option("--out", out_dir, "Write CSV/JSON here instead of printing JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : expkant::kExitValidation;
  }

  try {
    if (threads) expkant::set_worker_count(threads);
    if (*moments) {
      const auto o = expkant::run_moments({profile, order}, expkant::parse_scheme_string(scheme), betas);
      if (out_dir.empty()) {
        std::cout << o.report.dump(2) << '\n';
      } else {
        print_summary(o, expkant::write_outcome(o, {out_dir, "moments"}));
      }
      return expkant::exit_code(o);
    }
    expkant::ExperimentConfig cfg = expkant::load_config(config_path);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    expkant::ExperimentOutcome o;
    if (*audit) {
      o = expkant::run_audit(cfg);
      if (cfg.output.stem == cfg.experiment) cfg.output.stem = "audit";
    } else {
      o = expkant::run_experiment(cfg);
    }
    print_summary(o, expkant::write_outcome(o, cfg.output));
    return expkant::exit_code(o);
  } catch (const expkant::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return expkant::kExitValidation;
  } catch (const expkant::PreconditionError& e) {
    std::cerr << e.what() << '\n';
    return expkant::kExitTheoremFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
