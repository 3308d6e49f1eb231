#pragma once

#include <vector>

#include "sandwich/controller.hpp"
#include "sandwich/plant.hpp"

namespace sandwich {

// Lower bound of the safe input half-line: the worst case of the relaxed
// nominal law over the feasible parameter set.
struct SafeActionBound {
  double c_max = 0.0;
  ThetaTriple argmax;  // feasible triple attaining the bound (diagnostics)
};

// Evaluate the relaxed law (final-stage rate cbar) for every feasible-set
// context and return the maximum. One context per feasible triple, built by
// the caller when the set changes.
SafeActionBound safe_lower_bound(const PlantState& state,
                                 const std::vector<const ControllerContext*>& contexts);

// Exact solution of argmin |u - U_d|^2 subject to u >= c_max.
double qp_filter(double U_d, const SafeActionBound& bound);

struct ExcitationOptions {
  double eps_prop = 1e-6;  // relative proportionality tolerance (case 1)
  double eps_abs = 1e-9;   // absolute zero tolerance (cases 1-3)
  double eps_exc = 0.1;    // injected positive pulse amplitude
};

// Detector state for the three excitation cases: (1) z proportional to p*w
// over the first half of an identification window, (2) zero initial profiles
// with identically zero applied input after t = 1/q1, (3) identically zero
// inflow trace w(0,.) over a window. A firing detector schedules a constant
// positive pulse over the following (half-)window.
struct ExcitationState {
  ExcitationOptions opts;
  bool zero_initial_profiles = false;  // set from the initial data (case 2)
  bool prop_so_far = true;             // case-1 accumulator, current half-window
  bool ua_zero_so_far = true;          // case-2 accumulator since t = 1/q1
  bool w0_zero_so_far = true;          // case-3 accumulator, current window
  bool case1_armed = false;            // proportional through the half-window
  double inject_until = 0.0;           // pulse active while t < inject_until
};

// Per-step update over the current window [mu, t_next); call before applying
// the input at time state.t. Ua_prev is the input applied on the previous
// step. Returns the additive excitation for this step (0 or eps_exc).
double excitation_monitor(ExcitationState& st, const PlantState& state,
                          const PlantParameters& params, double Ua_prev, double mu,
                          double t_next, bool identification_pending);

// Window rollover at a trigger time: fires cases 2/3 for the next window and
// resets the per-window accumulators.
void excitation_rollover(ExcitationState& st, double t_trigger, double t_next,
                         bool identification_pending);

}  // namespace sandwich
