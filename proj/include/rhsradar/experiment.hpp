// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "rhsradar/baseline.hpp"
#include "rhsradar/draoa.hpp"

namespace rhsradar {

enum class SweepAxis { CostBudget, NTx, NRx, NSumAllocation };

const char* to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& s);

// Scenario block: world constants plus the baseline panel layout the sweep
// axes perturb. Defaults reproduce the reference setup (30 GHz carrier,
// lambda/3 spacing, 5 feeds, nu = sqrt(3), a = 5, two targets and one
// clutter, 6 dB SNR and INR).
struct ScenarioSpec {
  double wavelength = 0.01;
  double carrier = 30e9;
  double p_max = 4e-3;
  double noise_power = 4e-6;
  double snr_db = 6.0;
  double inr_db = 6.0;
  int n_feeds = 5;
  double refractive_index = 1.7320508075688772;
  double attenuation = 5.0;
  double element_spacing = 0.0;  // 0 -> wavelength / 3
  int n_tx = 2;
  int n_rx = 2;
  int n_per_panel = 24;
  int n_sum = 0;  // used by the fixed-total axes; 0 -> n_per_panel * (P + Q)
  int snapshots_tx = 16;
  int snapshots_rx = 16;
  double placement_box = 2.0;  // panel centers drawn in [0, box]^2 at z = 0
  std::vector<Eigen::Vector3d> targets{{0.5, 2.0, 1.0}, {1.0, 1.5, 1.0}};
  std::vector<Eigen::Vector3d> clutters{{1.0, 2.0, 2.0}};
  std::uint64_t seed = 1;
};

struct OutputSpec {
  std::string csv;        // per-trial rows
  std::string aggregate;  // mean/std per (sweep value, scheme)
  std::string trace;      // line-delimited run records
};

struct ExperimentSpec {
  ScenarioSpec scenario;
  SweepAxis axis = SweepAxis::CostBudget;
  std::vector<double> sweep_values{20, 30, 40};
  int trials = 20;
  DraoaConfig draoa;
  bool baseline = true;
  bool adaptive_receive = false;
  CostModel cost_model;
  std::vector<double> baseline_deltas{6, 8, 10};
  OutputSpec output;
  int workers = 0;  // 0 -> library/OpenMP default

  void validate() const;
};

ExperimentSpec load_spec(const std::string& path);
ExperimentSpec parse_spec(const std::string& json_text);
std::string serialize_spec(const ExperimentSpec& spec);
std::string spec_hash(const ExperimentSpec& spec);

// One trial of one sweep point for one scheme.
struct ResultRow {
  std::string spec_hash;
  double sweep_value = 0.0;
  std::string scheme;  // rhs | phased-δ<..> | oracle
  int n_tx = 0, n_rx = 0;
  int n_tx_elems = 0, n_rx_elems = 0;
  int trial = 0;
  double sinr_lin = 0.0;
  double sinr_db = 0.0;
  std::optional<double> relaxed_lin;
  std::optional<double> relaxed_db;
  int outer_iters = 0, inner_iters = 0, solver_iters = 0, rounding_discards = 0;
  // wall time never enters the CSV files (outputs are byte-reproducible);
  // it is reported through the trace records
  double runtime_s = 0.0;
};

struct AggregateRow {
  std::string spec_hash;
  double sweep_value = 0.0;
  std::string scheme;
  int trials = 0;
  double sinr_db_mean = 0.0;
  double sinr_db_std = 0.0;
  std::optional<double> relaxed_db_mean;
  double outer_iters_mean = 0.0;
};

struct SweepOutcome {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
  std::vector<std::string> failures;  // one message per failed row
  int skipped = 0;                    // rows resumed from an existing file
};

// Build the concrete scene of one (spec, sweep value, trial) cell.
Scene build_scene(const ScenarioSpec& scenario, SweepAxis axis, double value,
                  int trial);

SweepOutcome run_sweep(const ExperimentSpec& spec);
SweepOutcome run_fig2a(const ExperimentSpec& spec);
SweepOutcome run_fig2b(const ExperimentSpec& spec);
SweepOutcome run_fig2c(const ExperimentSpec& spec);

ExperimentSpec preset_fig2a();
ExperimentSpec preset_fig2b();
ExperimentSpec preset_fig2c(int n_sum = 48);

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows);

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
void emit_aggregate_csv(const std::vector<AggregateRow>& rows,
                        const std::string& path);
std::vector<ResultRow> parse_csv(const std::string& path);
void emit_trace(const ExperimentSpec& spec, const SweepOutcome& outcome,
                const std::string& path);

// Tiny-instance exhaustive reference: grid search over quantized amplitudes
// versus the full optimizer on the same scene.
struct OracleOutcome {
  double grid_best = 0.0;        // linear worst-case average
  BeamformerSet grid_argmax;
  DraoaResult draoa;
  double ratio = 0.0;            // draoa / grid
};

Scene oracle_scene();
OracleOutcome run_oracle(double step = 0.05);

// Invariant battery over a spec's scene; returns human-readable failures.
std::vector<std::string> run_validation(const ExperimentSpec& spec);

}  // namespace rhsradar
