#pragma once

#include <Eigen/Dense>
#include <string>

#include "sandwich/controller.hpp"
#include "sandwich/identifier.hpp"
#include "sandwich/plant.hpp"
#include "sandwich/safety_filter.hpp"

namespace sandwich {

enum class RunMode { OpenLoop, Nominal, Adaptive };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

// Initial-condition description: named trig profiles (amp * fn(freq*pi*x)),
// tabulated samples (linearly resampled onto the grid), or zero.
struct ProfileSpec {
  std::string shape = "zero";  // "zero", "sin", "cos"
  double amp = 1.0;
  double freq = 1.0;
  Eigen::VectorXd samples;  // non-empty overrides the shape
  Eigen::VectorXd evaluate(int nx) const;
};

struct InitialSpec {
  ProfileSpec w, z;
  Eigen::VectorXd X0, Y0;
  ThetaTriple theta0;  // initial estimate (adaptive mode)
};

struct ScenarioConfig {
  PlantParameters plant;
  InitialSpec initial;
  SimGrid grid;
  RunMode mode = RunMode::Nominal;
  double horizon = 20.0;
  std::string out_dir = "out";
  unsigned seed = 0;
  int snapshot_every = 50;  // field-snapshot cadence in steps
  int diag_stride = 10;     // target-state/Lyapunov evaluation stride
  GainConfig gains;
  TriggerSchedule schedule;
  int nbar_count = 1;
  EstimatorOptions estimator;
  ExcitationOptions excitation;
  int kernel_refine = 4;

  PlantState initial_state() const;
};

// Strict parser for the key-value config format (a TOML subset: [section],
// key = number | "string" | true/false | [numbers], # comments). Unknown
// sections/keys and malformed values are rejected with line numbers.
ScenarioConfig parse_config(const std::string& path);

}  // namespace sandwich
