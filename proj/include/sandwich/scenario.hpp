#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sandwich/config.hpp"
#include "sandwich/controller.hpp"
#include "sandwich/diagnostics.hpp"
#include "sandwich/identifier.hpp"
#include "sandwich/plant.hpp"
#include "sandwich/safety_filter.hpp"

namespace sandwich {

// One scalar-trace record per simulation step.
struct TraceRow {
  double t = 0.0;
  Eigen::VectorXd Y, X;
  double Ud = 0.0, Ua = 0.0, cmax = 0.0;
  int filter_active = 0;
  double d1hat = 0.0, d2hat = 0.0, bhat = 0.0;
  int D_card = 0;
  double V = 0.0;           // most recent Lyapunov sample
  Eigen::VectorXd h;        // most recent proximal-chain sample
};

struct RunResult {
  std::vector<TraceRow> rows;
  MarginsReport margins;
  double t_f = std::numeric_limits<double>::quiet_NaN();
  double norm0 = 0.0, norm_final = 0.0, norm_max = 0.0;  // energy functional
  bool diverged = false;
  bool fault = false;
  std::string fault_message;
  ThetaTriple theta_hat_final;
  std::vector<std::pair<double, double>> V_series;  // (t, V) at diag stride
  double sigma0 = 0.0;                              // from lyapunov_rate
  std::vector<double> snapshot_times;
  std::vector<Eigen::VectorXd> snapshot_z, snapshot_w;
  std::string summary_text;
};

// Shared kernel tables per (d1, d2) and controller contexts per triple;
// tables for a fresh set of pairs are built in parallel.
class ContextCache {
 public:
  ContextCache(const PlantParameters& params, const GainConfig& gains, int nx, int refine);
  const ControllerContext& get(const ThetaTriple& theta);
  void warm(const std::vector<ThetaTriple>& triples);  // parallel table build

 private:
  PlantParameters params_;
  GainConfig gains_;
  int nx_, refine_;
  std::map<std::pair<double, double>, std::shared_ptr<const KernelTable>> tables_;
  std::map<std::tuple<double, double, double>, ControllerContext> contexts_;
};

// End-to-end execution of one configured run (open-loop / nominal /
// adaptive); writes trace files into config.out_dir unless it is empty.
RunResult run_scenario(const ScenarioConfig& config);

void emit_traces(const RunResult& result, const ScenarioConfig& config, const std::string& dir);

// Successive grid refinement: level k runs with nx*2^k, dt/2^k.
struct RefinementLevel {
  int nx = 0;
  double dt = 0.0;
  double diff_y1 = 0.0;   // L2 distance of y1(t) to the previous level
  double order = 0.0;     // log2 ratio of successive diffs (0 for first two rows)
};
struct RefinementStudy {
  std::vector<RefinementLevel> levels;
  std::string table_text;
};
RefinementStudy refinement_study(const ScenarioConfig& config, int levels);

}  // namespace sandwich
