// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rhsradar/signal_chain.hpp"

namespace rhsradar {

// Power-consumption and hardware-cost equivalence between the two antenna
// technologies. Costs are normalized to 10 per phased element, so an
// amplitude-controlled element costs 10/delta and a system of N elements
// costs 10 N / delta.
struct CostModel {
  double eta_rhs = 0.25;    // radiated / consumed power, holographic panels
  double eta_phased = 0.04; // radiated / consumed power, phased panels
  double delta = 10.0;      // phased element cost / holographic element cost
  double phased_unit_cost = 10.0;

  void validate() const;
};

struct EquivalentConfig {
  int n_phased_total = 0;
  int n_rhs_total = 0;
  int n_phased_per_panel = 0;
  int n_rhs_per_panel = 0;
  double rhs_radiated_total = 0.0;
  double phased_radiated_total = 0.0;
  double rhs_radiated_per_tx = 0.0;
  double phased_radiated_per_tx = 0.0;
};

// Element counts and radiated powers at equal hardware cost and equal
// consumed power. cost_budget is in normalized cost units, power_budget in
// watts of consumed power; counts are split evenly over the P + Q panels.
EquivalentConfig equivalent_config(double cost_budget, double power_budget,
                                   const CostModel& model, int n_tx, int n_rx);

// Phase-only subarray: same grid conventions as the holographic panels,
// unit-modulus per-element weights.
struct PhasedSubarray {
  RhsPanel grid;
  Eigen::VectorXcd weights;
};

struct PhasedConfig {
  int n_x = 1, n_y = 1;
  double spacing = 0.0;          // 0 -> lambda/2
  double radiated_per_tx = 0.0;  // transmit power budget per panel
  bool adaptive_receive = false; // MVDR-style receive weights, phase-projected
};

struct PhasedResult {
  std::vector<PhasedSubarray> tx;
  std::vector<PhasedSubarray> rx;
  SinrReport report;
};

// Conjugate-steering baseline on the scene's panel placements: each Tx
// panel steers at its round-robin target, each Rx panel picks the steering
// (or adaptive) candidate with the best worst-target average. The SINR uses
// the same expectation evaluator as the holographic chain, with ideal
// (attenuation-free) elements.
PhasedResult phased_mimo_beamform(const Scene& scene, const PhasedConfig& config);

}  // namespace rhsradar
