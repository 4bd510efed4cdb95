// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "rhsradar/experiment.hpp"

namespace {

using namespace rhsradar;

void apply_overrides(ExperimentSpec& spec, int trials, int workers,
                     long long seed, const std::string& csv,
                     const std::string& aggregate, const std::string& trace) {
  if (trials > 0) spec.trials = trials;
  if (workers > 0) spec.workers = workers;
  if (seed >= 0) spec.scenario.seed = static_cast<std::uint64_t>(seed);
  if (!csv.empty()) spec.output.csv = csv;
  if (!aggregate.empty()) spec.output.aggregate = aggregate;
  if (!trace.empty()) spec.output.trace = trace;
  spec.draoa.exec = Exec::Parallel;
}

int report_outcome(const ExperimentSpec& spec, const SweepOutcome& out) {
  if (out.skipped > 0)
    std::cerr << "resumed " << out.skipped << " rows from " << spec.output.csv
              << "\n";
  for (const auto& a : out.aggregates)
    std::printf("value %-8g %-12s trials %-3d sinr %8.3f dB (± %.3f)\n",
                a.sweep_value, a.scheme.c_str(), a.trials, a.sinr_db_mean,
                a.sinr_db_std);
  for (const auto& f : out.failures) std::cerr << "row failed: " << f << "\n";
  return out.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holographic-subarray distributed radar beamforming bench"};
  app.require_subcommand(1);

  std::string spec_path, csv, aggregate, trace;
  int trials = 0, workers = 0;
  long long seed = -1;
  double oracle_step = 0.05;
  bool dump_preset = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--output", csv, "per-trial CSV path");
    cmd->add_option("--aggregate", aggregate, "aggregate CSV path");
    cmd->add_option("--trace", trace, "line-delimited trace path");
    cmd->add_option("--trials", trials, "override trial count");
    cmd->add_option("--workers", workers, "concurrent trial workers");
    cmd->add_option("--seed", seed, "override scenario seed");
  };

  CLI::App* run = app.add_subcommand("run", "run a sweep described by a spec file");
  run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
  add_common(run);

  CLI::App* f2a = app.add_subcommand("fig2a", "cost-equivalence comparison preset");
  CLI::App* f2b = app.add_subcommand("fig2b", "transmit-count trend preset");
  CLI::App* f2c = app.add_subcommand("fig2c", "receive-allocation trend preset");
  int fig2c_nsum = 48;
  f2c->add_option("--n-sum", fig2c_nsum, "total element budget");
  for (CLI::App* cmd : {f2a, f2b, f2c}) {
    add_common(cmd);
    cmd->add_flag("--dump-spec", dump_preset, "print the preset spec and exit");
  }

  CLI::App* oracle = app.add_subcommand("oracle", "grid-search reference instance");
  oracle->add_option("--step", oracle_step, "amplitude quantization step");

  CLI::App* validate = app.add_subcommand("validate", "run the invariant suite");
  validate->add_option("spec", spec_path, "experiment spec (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentSpec spec = load_spec(spec_path);
      apply_overrides(spec, trials, workers, seed, csv, aggregate, trace);
      return report_outcome(spec, run_sweep(spec));
    }
    if (f2a->parsed() || f2b->parsed() || f2c->parsed()) {
      ExperimentSpec spec = f2a->parsed()   ? preset_fig2a()
                            : f2b->parsed() ? preset_fig2b()
                                            : preset_fig2c(fig2c_nsum);
      apply_overrides(spec, trials, workers, seed, csv, aggregate, trace);
      if (dump_preset) {
        std::cout << serialize_spec(spec) << "\n";
        return 0;
      }
      SweepOutcome out = f2a->parsed()   ? run_fig2a(spec)
                         : f2b->parsed() ? run_fig2b(spec)
                                         : run_fig2c(spec);
      return report_outcome(spec, out);
    }
    if (oracle->parsed()) {
      OracleOutcome out = run_oracle(oracle_step);
      std::printf("grid best     %.6g (%.3f dB)\n", out.grid_best,
                  db10(out.grid_best));
      std::printf("optimizer     %.6g (%.3f dB)\n", out.draoa.worst_case_sinr,
                  out.draoa.worst_case_sinr_db);
      std::printf("ratio         %.4f\n", out.ratio);
      return 0;
    }
    if (validate->parsed()) {
      ExperimentSpec spec = load_spec(spec_path);
      auto failures = run_validation(spec);
      if (failures.empty()) {
        std::printf("all invariants hold\n");
        return 0;
      }
      for (const auto& f : failures) std::cerr << "invariant failed: " << f << "\n";
      return 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
