// SPDX-License-Identifier: Apache-2.0
#include "rhsradar/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rhsradar {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// near-square factorization of the per-panel element count
std::pair<int, int> grid_dims(int n) {
  int ny = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (ny > 1 && n % ny != 0) --ny;
  return {n / ny, ny};
}

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& ctx) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw std::invalid_argument("spec: unknown key '" + it.key() + "' in " + ctx);
  }
}

Eigen::Vector3d vec3_from(const json& j, const std::string& ctx) {
  require(j.is_array() && j.size() == 3, "spec: " + ctx + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string phased_tag(double delta) { return "phased-δ" + fmt6(delta); }

const char* kCsvHeader =
    "spec_hash,sweep_value,scheme,p,q,n_tx_elems,n_rx_elems,trial,"
    "sinr_lin,sinr_db,relaxed_lin,relaxed_db,outer_iters,inner_iters,"
    "solver_iters,rounding_discards";

const char* kAggHeader =
    "spec_hash,sweep_value,scheme,trials,sinr_db_mean,sinr_db_std,"
    "relaxed_db_mean,outer_iters_mean";

}  // namespace

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::CostBudget: return "cost_budget";
    case SweepAxis::NTx: return "n_tx";
    case SweepAxis::NRx: return "n_rx";
    case SweepAxis::NSumAllocation: return "n_sum_allocation";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "cost_budget") return SweepAxis::CostBudget;
  if (s == "n_tx") return SweepAxis::NTx;
  if (s == "n_rx") return SweepAxis::NRx;
  if (s == "n_sum_allocation") return SweepAxis::NSumAllocation;
  throw std::invalid_argument("spec: unknown sweep axis '" + s + "'");
}

void ExperimentSpec::validate() const {
  require(trials >= 1, "spec: trials must be >= 1");
  require(!sweep_values.empty(), "spec: sweep values must be non-empty");
  for (size_t i = 1; i < sweep_values.size(); ++i)
    require(sweep_values[i] > sweep_values[i - 1],
            "spec: sweep values must be strictly increasing");
  require(scenario.n_tx >= 1 && scenario.n_rx >= 1, "spec: need panels");
  require(scenario.n_feeds >= 1, "spec: need at least one feed");
  require(!scenario.targets.empty(), "spec: need at least one target");
  require(scenario.noise_power > 0.0 && scenario.p_max > 0.0,
          "spec: powers must be positive");
  draoa.validate();
  cost_model.validate();
  for (double d : baseline_deltas)
    require(d > 0.0, "spec: baseline deltas must be positive");
}

ExperimentSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("spec: parse error: ") + e.what());
  }
  ExperimentSpec spec;
  check_keys(j, {"scenario", "sweep", "trials", "draoa", "baseline",
                 "adaptive_receive", "cost_model", "output", "workers"},
             "top level");

  if (j.contains("scenario")) {
    const json& s = j["scenario"];
    check_keys(s,
               {"wavelength", "carrier", "p_max", "noise_power", "snr_db",
                "inr_db", "n_feeds", "refractive_index", "attenuation",
                "element_spacing", "n_tx", "n_rx", "n_per_panel", "n_sum",
                "snapshots_tx", "snapshots_rx", "placement_box", "targets",
                "clutters", "seed"},
               "scenario");
    auto& sc = spec.scenario;
    if (s.contains("wavelength")) sc.wavelength = s["wavelength"].get<double>();
    if (s.contains("carrier")) sc.carrier = s["carrier"].get<double>();
    if (s.contains("p_max")) sc.p_max = s["p_max"].get<double>();
    if (s.contains("noise_power")) sc.noise_power = s["noise_power"].get<double>();
    if (s.contains("snr_db")) sc.snr_db = s["snr_db"].get<double>();
    if (s.contains("inr_db")) sc.inr_db = s["inr_db"].get<double>();
    if (s.contains("n_feeds")) sc.n_feeds = s["n_feeds"].get<int>();
    if (s.contains("refractive_index"))
      sc.refractive_index = s["refractive_index"].get<double>();
    if (s.contains("attenuation")) sc.attenuation = s["attenuation"].get<double>();
    if (s.contains("element_spacing"))
      sc.element_spacing = s["element_spacing"].get<double>();
    if (s.contains("n_tx")) sc.n_tx = s["n_tx"].get<int>();
    if (s.contains("n_rx")) sc.n_rx = s["n_rx"].get<int>();
    if (s.contains("n_per_panel")) sc.n_per_panel = s["n_per_panel"].get<int>();
    if (s.contains("n_sum")) sc.n_sum = s["n_sum"].get<int>();
    if (s.contains("snapshots_tx")) sc.snapshots_tx = s["snapshots_tx"].get<int>();
    if (s.contains("snapshots_rx")) sc.snapshots_rx = s["snapshots_rx"].get<int>();
    if (s.contains("placement_box"))
      sc.placement_box = s["placement_box"].get<double>();
    if (s.contains("seed")) sc.seed = s["seed"].get<std::uint64_t>();
    if (s.contains("targets")) {
      sc.targets.clear();
      for (const auto& t : s["targets"]) sc.targets.push_back(vec3_from(t, "target"));
    }
    if (s.contains("clutters")) {
      sc.clutters.clear();
      for (const auto& t : s["clutters"])
        sc.clutters.push_back(vec3_from(t, "clutter"));
    }
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_keys(s, {"axis", "values"}, "sweep");
    if (s.contains("axis"))
      spec.axis = sweep_axis_from_string(s["axis"].get<std::string>());
    if (s.contains("values")) {
      spec.sweep_values.clear();
      for (const auto& v : s["values"]) spec.sweep_values.push_back(v.get<double>());
    }
  }
  if (j.contains("trials")) spec.trials = j["trials"].get<int>();
  if (j.contains("draoa")) {
    const json& d = j["draoa"];
    check_keys(d,
               {"eps_outer", "max_outer", "tx_samples", "rx_samples",
                "svr_max_iterations", "svr_tolerance", "eps_ipm", "shortlist",
                "exhaustive_pairing", "rng_seed"},
               "draoa");
    auto& c = spec.draoa;
    if (d.contains("eps_outer")) c.eps_outer = d["eps_outer"].get<double>();
    if (d.contains("max_outer")) c.max_outer = d["max_outer"].get<int>();
    if (d.contains("tx_samples")) c.tx_samples = d["tx_samples"].get<int>();
    if (d.contains("rx_samples")) c.rx_samples = d["rx_samples"].get<int>();
    if (d.contains("svr_max_iterations"))
      c.svr_max_iterations = d["svr_max_iterations"].get<int>();
    if (d.contains("svr_tolerance")) c.svr_tolerance = d["svr_tolerance"].get<double>();
    if (d.contains("eps_ipm")) c.eps_ipm = d["eps_ipm"].get<double>();
    if (d.contains("shortlist")) c.shortlist = d["shortlist"].get<int>();
    if (d.contains("exhaustive_pairing"))
      c.exhaustive_pairing = d["exhaustive_pairing"].get<bool>();
    if (d.contains("rng_seed")) c.rng_seed = d["rng_seed"].get<std::uint64_t>();
  }
  if (j.contains("baseline")) spec.baseline = j["baseline"].get<bool>();
  if (j.contains("adaptive_receive"))
    spec.adaptive_receive = j["adaptive_receive"].get<bool>();
  if (j.contains("cost_model")) {
    const json& c = j["cost_model"];
    check_keys(c, {"eta_rhs", "eta_phased", "delta", "phased_unit_cost", "deltas"},
               "cost_model");
    if (c.contains("eta_rhs")) spec.cost_model.eta_rhs = c["eta_rhs"].get<double>();
    if (c.contains("eta_phased"))
      spec.cost_model.eta_phased = c["eta_phased"].get<double>();
    if (c.contains("delta")) spec.cost_model.delta = c["delta"].get<double>();
    if (c.contains("phased_unit_cost"))
      spec.cost_model.phased_unit_cost = c["phased_unit_cost"].get<double>();
    if (c.contains("deltas")) {
      spec.baseline_deltas.clear();
      for (const auto& v : c["deltas"]) spec.baseline_deltas.push_back(v.get<double>());
    }
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, {"csv", "aggregate", "trace"}, "output");
    if (o.contains("csv")) spec.output.csv = o["csv"].get<std::string>();
    if (o.contains("aggregate")) spec.output.aggregate = o["aggregate"].get<std::string>();
    if (o.contains("trace")) spec.output.trace = o["trace"].get<std::string>();
  }
  if (j.contains("workers")) spec.workers = j["workers"].get<int>();
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("spec: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string serialize_spec(const ExperimentSpec& spec) {
  json j;
  const auto& sc = spec.scenario;
  json targets = json::array(), clutters = json::array();
  for (const auto& t : sc.targets) targets.push_back(vec3_to(t));
  for (const auto& c : sc.clutters) clutters.push_back(vec3_to(c));
  j["scenario"] = {
      {"wavelength", sc.wavelength},
      {"carrier", sc.carrier},
      {"p_max", sc.p_max},
      {"noise_power", sc.noise_power},
      {"snr_db", sc.snr_db},
      {"inr_db", sc.inr_db},
      {"n_feeds", sc.n_feeds},
      {"refractive_index", sc.refractive_index},
      {"attenuation", sc.attenuation},
      {"element_spacing", sc.element_spacing},
      {"n_tx", sc.n_tx},
      {"n_rx", sc.n_rx},
      {"n_per_panel", sc.n_per_panel},
      {"n_sum", sc.n_sum},
      {"snapshots_tx", sc.snapshots_tx},
      {"snapshots_rx", sc.snapshots_rx},
      {"placement_box", sc.placement_box},
      {"targets", targets},
      {"clutters", clutters},
      {"seed", sc.seed},
  };
  j["sweep"] = {{"axis", to_string(spec.axis)}, {"values", spec.sweep_values}};
  j["trials"] = spec.trials;
  j["draoa"] = {
      {"eps_outer", spec.draoa.eps_outer},
      {"max_outer", spec.draoa.max_outer},
      {"tx_samples", spec.draoa.tx_samples},
      {"rx_samples", spec.draoa.rx_samples},
      {"svr_max_iterations", spec.draoa.svr_max_iterations},
      {"svr_tolerance", spec.draoa.svr_tolerance},
      {"eps_ipm", spec.draoa.eps_ipm},
      {"shortlist", spec.draoa.shortlist},
      {"exhaustive_pairing", spec.draoa.exhaustive_pairing},
      {"rng_seed", spec.draoa.rng_seed},
  };
  j["baseline"] = spec.baseline;
  j["adaptive_receive"] = spec.adaptive_receive;
  j["cost_model"] = {
      {"eta_rhs", spec.cost_model.eta_rhs},
      {"eta_phased", spec.cost_model.eta_phased},
      {"delta", spec.cost_model.delta},
      {"phased_unit_cost", spec.cost_model.phased_unit_cost},
      {"deltas", spec.baseline_deltas},
  };
  j["output"] = {{"csv", spec.output.csv},
                 {"aggregate", spec.output.aggregate},
                 {"trace", spec.output.trace}};
  j["workers"] = spec.workers;
  return j.dump();
}

std::string spec_hash(const ExperimentSpec& spec) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(serialize_spec(spec))));
  return buf;
}

Scene build_scene(const ScenarioSpec& scenario, SweepAxis axis, double value,
                  int trial) {
  int n_tx = scenario.n_tx, n_rx = scenario.n_rx;
  int n_pp = scenario.n_per_panel;
  switch (axis) {
    case SweepAxis::CostBudget:
      n_pp = static_cast<int>(std::llround(value));
      break;
    case SweepAxis::NTx:
      n_tx = static_cast<int>(std::llround(value));
      break;
    case SweepAxis::NRx: {
      n_rx = static_cast<int>(std::llround(value));
      int total = scenario.n_sum > 0 ? scenario.n_sum
                                     : scenario.n_per_panel * (n_tx + n_rx);
      n_pp = total / (n_tx + n_rx);
      break;
    }
    case SweepAxis::NSumAllocation:
      n_pp = static_cast<int>(std::llround(value)) / (n_tx + n_rx);
      break;
  }
  require(n_tx >= 1 && n_rx >= 1 && n_pp >= 1, "build_scene: degenerate layout");

  const double spacing = scenario.element_spacing > 0.0
                             ? scenario.element_spacing
                             : scenario.wavelength / 3.0;
  auto [nx, ny] = grid_dims(n_pp);

  Scene scene;
  scene.wavelength = scenario.wavelength;
  scene.carrier = scenario.carrier;
  scene.noise_power = scenario.noise_power;
  scene.p_max = scenario.p_max;
  scene.snapshots_tx = std::max(scenario.snapshots_tx, n_tx);
  scene.snapshots_rx = std::max(scenario.snapshots_rx, scene.snapshots_tx);
  scene.rng_seed = mix64(scenario.seed ^ mix64(trial + 1));

  // each panel draws its center from its own substream so layouts nest
  // across sweep points of the same trial
  for (int p = 0; p < n_tx; ++p) {
    Rng r(scenario.seed, "tx_panel", (static_cast<std::uint64_t>(trial) << 16) + p);
    Eigen::Vector3d c(r.uniform() * scenario.placement_box,
                      r.uniform() * scenario.placement_box, 0.0);
    scene.tx_panels.push_back(make_panel(nx, ny, spacing, scenario.n_feeds, c));
  }
  for (int q = 0; q < n_rx; ++q) {
    Rng r(scenario.seed, "rx_panel", (static_cast<std::uint64_t>(trial) << 16) + q);
    Eigen::Vector3d c(r.uniform() * scenario.placement_box,
                      r.uniform() * scenario.placement_box, 0.0);
    scene.rx_panels.push_back(make_panel(nx, ny, spacing, scenario.n_feeds, c));
  }

  const double target_var =
      scenario.noise_power * std::pow(10.0, scenario.snr_db / 10.0);
  const double clutter_var =
      scenario.noise_power * std::pow(10.0, scenario.inr_db / 10.0);
  for (const auto& t : scenario.targets)
    scene.scatterers.push_back({t, ScattererKind::Target, target_var, {}});
  for (const auto& c : scenario.clutters)
    scene.scatterers.push_back({c, ScattererKind::Clutter, clutter_var, {}});

  return finalize_scene(std::move(scene), scenario.refractive_index,
                        scenario.attenuation);
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows) {
  std::map<std::pair<double, std::string>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) groups[{r.sweep_value, r.scheme}].push_back(&r);

  std::vector<AggregateRow> out;
  for (const auto& [key, group] : groups) {
    AggregateRow a;
    a.spec_hash = group.front()->spec_hash;
    a.sweep_value = key.first;
    a.scheme = key.second;
    a.trials = static_cast<int>(group.size());
    double mean = 0.0;
    for (const auto* r : group) mean += r->sinr_db;
    mean /= a.trials;
    double var = 0.0;
    for (const auto* r : group) var += (r->sinr_db - mean) * (r->sinr_db - mean);
    a.sinr_db_mean = mean;
    a.sinr_db_std = a.trials > 1 ? std::sqrt(var / (a.trials - 1)) : 0.0;
    bool any_relaxed = false;
    double rmean = 0.0;
    int rcount = 0;
    double iters = 0.0;
    for (const auto* r : group) {
      iters += r->outer_iters;
      if (r->relaxed_db) {
        any_relaxed = true;
        rmean += *r->relaxed_db;
        ++rcount;
      }
    }
    if (any_relaxed) a.relaxed_db_mean = rmean / rcount;
    a.outer_iters_mean = iters / a.trials;
    out.push_back(std::move(a));
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out << kCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.spec_hash << ',' << fmt6(r.sweep_value) << ',' << r.scheme << ','
        << r.n_tx << ',' << r.n_rx << ',' << r.n_tx_elems << ','
        << r.n_rx_elems << ',' << r.trial << ',' << fmt6(r.sinr_lin) << ','
        << fmt6(r.sinr_db) << ','
        << (r.relaxed_lin ? fmt6(*r.relaxed_lin) : std::string()) << ','
        << (r.relaxed_db ? fmt6(*r.relaxed_db) : std::string()) << ','
        << r.outer_iters << ',' << r.inner_iters << ',' << r.solver_iters
        << ',' << r.rounding_discards << "\n";
  }
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

void emit_aggregate_csv(const std::vector<AggregateRow>& rows,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_aggregate_csv: cannot open " + path);
  out << kAggHeader << "\n";
  for (const auto& r : rows) {
    out << r.spec_hash << ',' << fmt6(r.sweep_value) << ',' << r.scheme << ','
        << r.trials << ',' << fmt6(r.sinr_db_mean) << ',' << fmt6(r.sinr_db_std)
        << ',' << (r.relaxed_db_mean ? fmt6(*r.relaxed_db_mean) : std::string())
        << ',' << fmt6(r.outer_iters_mean) << "\n";
  }
  if (!out)
    throw std::runtime_error("emit_aggregate_csv: write failed for " + path);
}

std::vector<ResultRow> parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("parse_csv: unexpected header in " + path);

  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (line.back() == ',') f.push_back("");
    if (f.size() != 16)
      throw std::runtime_error("parse_csv: malformed row in " + path);
    ResultRow r;
    r.spec_hash = f[0];
    r.sweep_value = std::stod(f[1]);
    r.scheme = f[2];
    r.n_tx = std::stoi(f[3]);
    r.n_rx = std::stoi(f[4]);
    r.n_tx_elems = std::stoi(f[5]);
    r.n_rx_elems = std::stoi(f[6]);
    r.trial = std::stoi(f[7]);
    r.sinr_lin = std::stod(f[8]);
    r.sinr_db = std::stod(f[9]);
    if (!f[10].empty()) r.relaxed_lin = std::stod(f[10]);
    if (!f[11].empty()) r.relaxed_db = std::stod(f[11]);
    r.outer_iters = std::stoi(f[12]);
    r.inner_iters = std::stoi(f[13]);
    r.solver_iters = std::stoi(f[14]);
    r.rounding_discards = std::stoi(f[15]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_trace(const ExperimentSpec& spec, const SweepOutcome& outcome,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_trace: cannot open " + path);
  out << json{{"type", "meta"},
              {"spec_hash", spec_hash(spec)},
              {"axis", to_string(spec.axis)},
              {"skipped", outcome.skipped}}
          .dump()
      << "\n";
  for (const auto& r : outcome.rows) {
    out << json{{"type", "row"},
                {"sweep_value", r.sweep_value},
                {"scheme", r.scheme},
                {"trial", r.trial},
                {"sinr_db", r.sinr_db},
                {"outer_iters", r.outer_iters},
                {"inner_iters", r.inner_iters},
                {"solver_iters", r.solver_iters},
                {"runtime_s", r.runtime_s}}
            .dump()
        << "\n";
  }
  for (const auto& f : outcome.failures)
    out << json{{"type", "failure"}, {"message", f}}.dump() << "\n";
}

namespace {

struct Cell {
  size_t value_idx;
  int trial;
};

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    if (a.scheme != b.scheme) return a.scheme < b.scheme;
    return a.trial < b.trial;
  });
}

}  // namespace

SweepOutcome run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const std::string hash = spec_hash(spec);

  // resume: rows from a previous run of the identical spec are kept
  std::map<std::tuple<double, std::string, int>, ResultRow> done;
  if (!spec.output.csv.empty()) {
    std::ifstream probe(spec.output.csv);
    if (probe.good()) {
      probe.close();
      for (auto& r : parse_csv(spec.output.csv))
        if (r.spec_hash == hash)
          done.emplace(std::make_tuple(r.sweep_value, r.scheme, r.trial),
                       std::move(r));
    }
  }

  std::vector<Cell> cells;
  for (size_t vi = 0; vi < spec.sweep_values.size(); ++vi)
    for (int t = 0; t < spec.trials; ++t) cells.push_back({vi, t});

  std::vector<std::vector<ResultRow>> cell_rows(cells.size());
  std::vector<std::string> cell_failures(cells.size());
  int skipped = 0;

  auto run_cell = [&](size_t ci) {
    const Cell& cell = cells[ci];
    const double value = spec.sweep_values[cell.value_idx];
    std::vector<std::string> schemes{"rhs"};
    if (spec.baseline)
      for (double d : spec.baseline_deltas) schemes.push_back(phased_tag(d));

    bool all_done = true;
    for (const auto& s : schemes)
      if (!done.count({value, s, cell.trial})) all_done = false;
    if (all_done) return;

    Scene scene = build_scene(spec.scenario, spec.axis, value, cell.trial);
    auto t0 = std::chrono::steady_clock::now();

    if (!done.count({value, "rhs", cell.trial})) {
      DraoaConfig cfg = spec.draoa;
      cfg.rng_seed = mix64(spec.scenario.seed ^ fnv1a(fmt6(value)) ^
                           mix64(cell.trial + 17));
      DraoaResult res = run_draoa(scene, cfg);
      ResultRow r;
      r.spec_hash = hash;
      r.sweep_value = value;
      r.scheme = "rhs";
      r.n_tx = scene.tx_count();
      r.n_rx = scene.rx_count();
      r.n_tx_elems = scene.n_tx_elements();
      r.n_rx_elems = scene.n_rx_elements();
      r.trial = cell.trial;
      r.sinr_lin = res.worst_case_sinr;
      r.sinr_db = res.worst_case_sinr_db;
      r.relaxed_lin = res.relaxed_bound;
      r.relaxed_db = db10(res.relaxed_bound);
      r.outer_iters = res.outer_iterations;
      for (const auto& e : res.trace) {
        r.inner_iters += e.inner_t + e.inner_r;
        r.solver_iters += e.solver_iterations;
      }
      r.rounding_discards = res.rounding.tx_discarded;
      r.runtime_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      cell_rows[ci].push_back(std::move(r));
    }

    if (spec.baseline) {
      for (double d : spec.baseline_deltas) {
        std::string tag = phased_tag(d);
        if (done.count({value, tag, cell.trial})) continue;
        auto tb = std::chrono::steady_clock::now();
        PhasedConfig pc;
        int n_ph = std::max(
            1, static_cast<int>(std::llround(scene.n_tx_elements() / d)));
        auto [nx, ny] = grid_dims(n_ph);
        pc.n_x = nx;
        pc.n_y = ny;
        pc.radiated_per_tx =
            scene.p_max * spec.cost_model.eta_phased / spec.cost_model.eta_rhs;
        pc.adaptive_receive = spec.adaptive_receive;
        PhasedResult pr = phased_mimo_beamform(scene, pc);
        ResultRow r;
        r.spec_hash = hash;
        r.sweep_value = value;
        r.scheme = tag;
        r.n_tx = scene.tx_count();
        r.n_rx = scene.rx_count();
        r.n_tx_elems = n_ph;
        r.n_rx_elems = n_ph;
        r.trial = cell.trial;
        r.sinr_lin = pr.report.worst_case;
        r.sinr_db = pr.report.worst_case_db;
        r.runtime_s = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - tb)
                          .count();
        cell_rows[ci].push_back(std::move(r));
      }
    }
  };

  const int workers = spec.workers > 0 ? spec.workers : omp_get_max_threads();
  const bool par = workers > 1 && !omp_in_parallel();
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (par)
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    try {
      run_cell(ci);
    } catch (const std::exception& e) {
      cell_failures[ci] = std::string("cell value=") +
                          fmt6(spec.sweep_values[cells[ci].value_idx]) +
                          " trial=" + std::to_string(cells[ci].trial) + ": " +
                          e.what();
    }
  }

  SweepOutcome out;
  for (auto& [key, row] : done) {
    out.rows.push_back(row);
    ++skipped;
  }
  out.skipped = skipped;
  for (auto& rows : cell_rows)
    for (auto& r : rows) out.rows.push_back(std::move(r));
  for (auto& f : cell_failures)
    if (!f.empty()) out.failures.push_back(std::move(f));
  sort_rows(out.rows);
  out.aggregates = aggregate_rows(out.rows);

  if (!spec.output.csv.empty()) emit_csv(out.rows, spec.output.csv);
  if (!spec.output.aggregate.empty())
    emit_aggregate_csv(out.aggregates, spec.output.aggregate);
  if (!spec.output.trace.empty()) emit_trace(spec, out, spec.output.trace);
  return out;
}

SweepOutcome run_fig2a(const ExperimentSpec& spec) {
  require(spec.axis == SweepAxis::CostBudget, "fig2a: axis must be cost_budget");
  return run_sweep(spec);
}

SweepOutcome run_fig2b(const ExperimentSpec& spec) {
  require(spec.axis == SweepAxis::NTx, "fig2b: axis must be n_tx");
  return run_sweep(spec);
}

SweepOutcome run_fig2c(const ExperimentSpec& spec) {
  require(spec.axis == SweepAxis::NRx, "fig2c: axis must be n_rx");
  return run_sweep(spec);
}

namespace {

DraoaConfig desk_draoa() {
  DraoaConfig c;
  c.eps_outer = 1e-2;
  c.max_outer = 4;
  c.svr_max_iterations = 5;
  c.svr_tolerance = 1e-3;
  c.eps_ipm = 1e-7;
  c.tx_samples = 64;
  c.rx_samples = 64;
  c.shortlist = 6;
  return c;
}

}  // namespace

ExperimentSpec preset_fig2a() {
  ExperimentSpec spec;
  spec.axis = SweepAxis::CostBudget;
  spec.sweep_values = {20, 30, 40};  // elements per holographic subarray
  spec.trials = 20;
  spec.baseline = true;
  spec.draoa = desk_draoa();
  return spec;
}

ExperimentSpec preset_fig2b() {
  ExperimentSpec spec;
  spec.axis = SweepAxis::NTx;
  spec.sweep_values = {1, 2, 3, 4};
  spec.scenario.n_per_panel = 12;
  spec.trials = 20;
  spec.baseline = false;
  spec.draoa = desk_draoa();
  return spec;
}

ExperimentSpec preset_fig2c(int n_sum) {
  ExperimentSpec spec;
  spec.axis = SweepAxis::NRx;
  spec.sweep_values = {1, 2, 3, 4};
  spec.scenario.n_sum = n_sum;
  spec.trials = 20;
  spec.baseline = false;
  spec.draoa = desk_draoa();
  return spec;
}

Scene oracle_scene() {
  ScenarioSpec sc;
  sc.n_tx = 1;
  sc.n_rx = 1;
  sc.n_per_panel = 2;
  sc.n_feeds = 1;
  sc.p_max = 10.0;  // non-binding so the amplitude grid is meaningful
  sc.snapshots_tx = 4;
  sc.snapshots_rx = 4;
  sc.targets = {{0.5, 2.0, 1.0}};
  sc.clutters = {{1.0, 2.0, 2.0}};
  sc.seed = 7;
  return build_scene(sc, SweepAxis::CostBudget, 2, 0);
}

OracleOutcome run_oracle(double step) {
  require(step > 0.0 && step <= 0.5, "oracle: bad grid step");
  Scene scene = oracle_scene();
  SceneCouplings cpl = make_couplings(scene);
  std::vector<Eigen::MatrixXd> power = power_forms(scene);
  const int L = scene.n_scatterers();

  const int n_steps = static_cast<int>(std::llround(1.0 / step)) + 1;
  auto level = [&](int i) { return std::min(1.0, i * step); };

  // enumerate one side's couplings over the grid
  struct SidePoint {
    double a0, a1;
    std::vector<double> c;  // per scatterer
    double noise;           // receive only
  };
  std::vector<SidePoint> tx_pts, rx_pts;
  for (int i = 0; i < n_steps; ++i)
    for (int k = 0; k < n_steps; ++k) {
      Eigen::VectorXd v(2);
      v << level(i), level(k);
      SidePoint tp{v(0), v(1), {}, 0.0};
      if (v.dot(power[0] * v) <= scene.p_max) {
        for (int l = 0; l < L; ++l) tp.c.push_back(cpl.tx_power(0, l, v));
        tx_pts.push_back(tp);
      }
      SidePoint rp{v(0), v(1), {}, cpl.rx_noise(0, v)};
      if (rp.noise > 0.0) {
        for (int l = 0; l < L; ++l) rp.c.push_back(cpl.rx_power(0, l, v));
        rx_pts.push_back(rp);
      }
    }

  const double noise_scale = scene.noise_power * scene.snapshots_rx;
  OracleOutcome out;
  double best = -1.0;
  SidePoint best_t{}, best_r{};
  for (const auto& tp : tx_pts) {
    for (const auto& rp : rx_pts) {
      double num = scene.pair_variance(0, 0, 0) * tp.c[0] * rp.c[0];
      double den = noise_scale * rp.noise;
      for (int l = 1; l < L; ++l)
        den += scene.pair_variance(0, 0, l) * tp.c[l] * rp.c[l];
      double v = num / den;
      if (v > best) {
        best = v;
        best_t = tp;
        best_r = rp;
      }
    }
  }
  out.grid_best = best;
  out.grid_argmax.psi_t.resize(2);
  out.grid_argmax.psi_t << best_t.a0, best_t.a1;
  out.grid_argmax.psi_r.resize(2);
  out.grid_argmax.psi_r << best_r.a0, best_r.a1;

  DraoaConfig cfg;
  cfg.max_outer = 10;
  cfg.svr_max_iterations = 15;
  cfg.eps_outer = 1e-4;
  cfg.rng_seed = 7;
  out.draoa = run_draoa(scene, cfg);
  out.ratio = out.draoa.worst_case_sinr / out.grid_best;
  return out;
}

std::vector<std::string> run_validation(const ExperimentSpec& spec) {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };

  try {
    Scene scene =
        build_scene(spec.scenario, spec.axis, spec.sweep_values.front(), 0);

    // waveguide invariants
    for (const auto& wg : scene.tx_wg) {
      check((wg.q_matrix.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-12,
            "waveguide phase entries must be unit modulus");
      check(wg.gamma_matrix.minCoeff() > 0.0 && wg.gamma_matrix.maxCoeff() <= 1.0,
            "waveguide attenuation must lie in (0, 1]");
      Eigen::MatrixXd expected =
          (-wg.attenuation_factor * wg.distances).array().exp();
      check((wg.gamma_matrix - expected).cwiseAbs().maxCoeff() <= 1e-14,
            "attenuation must match the stored distances");
    }

    // steering invariants
    SceneCouplings cpl = make_couplings(scene);
    for (int l = 0; l < scene.n_scatterers(); ++l) {
      Eigen::VectorXcd a = steering_vector(scene.tx_panels[0],
                                           scene.scatterers[l].position,
                                           scene.wavelength);
      check((a.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-12,
            "steering vectors must be unit modulus");
    }

    // waveforms
    WaveformSet wf = make_waveforms(scene.tx_count(), scene.snapshots_tx);
    Eigen::MatrixXcd gram = wf.rows * wf.rows.adjoint();
    check((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-10,
          "waveform Gram matrix must be the identity");

    // shift matrices
    ShiftMatrix j = shift_matrix(0, scene.snapshots_tx, scene.snapshots_rx);
    Eigen::MatrixXd jj = j.dense() * j.dense().transpose();
    check((jj - Eigen::MatrixXd::Identity(jj.rows(), jj.cols())).norm() == 0.0,
          "shift matrices must be row-orthonormal");

    // random feasible beamformers: form/evaluator consistency
    Rng rng(spec.scenario.seed, "validate");
    BeamformerSet bf;
    bf.psi_t.resize(scene.tx_count() * scene.n_tx_elements());
    bf.psi_r.resize(scene.rx_count() * scene.n_rx_elements());
    for (int i = 0; i < bf.psi_t.size(); ++i) bf.psi_t(i) = rng.uniform();
    for (int i = 0; i < bf.psi_r.size(); ++i) bf.psi_r(i) = rng.uniform();
    std::vector<Eigen::MatrixXd> power = power_forms(scene);
    for (int p = 0; p < scene.tx_count(); ++p) {
      double pw = bf.psi_t.dot(power[p] * bf.psi_t);
      if (pw > scene.p_max)
        bf.psi_t.segment(p * scene.n_tx_elements(), scene.n_tx_elements()) *=
            std::sqrt(scene.p_max / pw) * (1 - 1e-12);
    }
    SinrReport rep = sinr_per_pair(scene, cpl, bf);
    TxForms txf = transmit_forms(scene, bf.psi_r);
    Eigen::VectorXcd psi_tc = bf.psi_t.cast<std::complex<double>>();
    for (int p = 0; p < scene.tx_count(); ++p)
      for (int q = 0; q < scene.rx_count(); ++q)
        for (int lt = 0; lt < scene.n_targets(); ++lt) {
          double num = (psi_tc.adjoint() * txf.sig(p, q, lt) * psi_tc).real()(0);
          double den = txf.noise(p, q);
          for (int l = 0; l < scene.n_scatterers(); ++l) {
            if (l == lt) continue;
            den += (psi_tc.adjoint() * txf.sig(p, q, l) * psi_tc).real()(0);
          }
          double ratio = num / den;
          check(std::abs(ratio - rep.pair(p, q, lt)) <=
                    1e-8 * std::max(1e-300, rep.pair(p, q, lt)),
                "trace-form ratio must match the evaluator");
        }

    // Hermitian forms
    for (const auto& mform : txf.r_sig)
      check((mform - mform.adjoint()).cwiseAbs().maxCoeff() <=
                1e-10 * std::max(1.0, mform.cwiseAbs().maxCoeff()),
            "transmit forms must be Hermitian");

    // reflection determinism
    Rng r1(scene.rng_seed, "beta", 3), r2(scene.rng_seed, "beta", 3);
    auto b1 = draw_reflections(scene, r1), b2 = draw_reflections(scene, r2);
    check(b1 == b2, "reflection draws must be reproducible");
  } catch (const std::exception& e) {
    failures.push_back(std::string("validation threw: ") + e.what());
  }
  return failures;
}

}  // namespace rhsradar
