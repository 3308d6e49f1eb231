#include "sandwich/safety_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sandwich {

SafeActionBound safe_lower_bound(const PlantState& state,
                                 const std::vector<const ControllerContext*>& contexts) {
  if (contexts.empty()) throw std::invalid_argument("safe_lower_bound: no contexts");
  SafeActionBound bound;
  bound.c_max = -std::numeric_limits<double>::infinity();
  for (const ControllerContext* ctx : contexts) {
    if (!ctx) throw std::invalid_argument("safe_lower_bound: missing context");
    const double u = control_U(state, *ctx, ctx->gains.cbar);
    if (u > bound.c_max) {
      bound.c_max = u;
      bound.argmax = ctx->kernel.theta;
    }
  }
  return bound;
}

double qp_filter(double U_d, const SafeActionBound& bound) {
  return std::max(U_d, bound.c_max);
}

double excitation_monitor(ExcitationState& st, const PlantState& state,
                          const PlantParameters& params, double Ua_prev, double mu,
                          double t_next, bool identification_pending) {
  const double mid = 0.5 * (mu + t_next);
  const double t = state.t;

  if (identification_pending) {
    if (t <= mid && st.prop_so_far) {
      const double dev = (state.z - params.p * state.w).cwiseAbs().maxCoeff();
      const double scale = std::max(state.z.cwiseAbs().maxCoeff(), st.opts.eps_abs);
      const bool degenerate = state.z.cwiseAbs().maxCoeff() <= st.opts.eps_abs &&
                              state.w.cwiseAbs().maxCoeff() <= st.opts.eps_abs;
      // identically zero profiles are case 2/3 territory, not proportionality
      if (degenerate || dev > st.opts.eps_prop * scale) st.prop_so_far = false;
    }
    if (t >= mid && st.prop_so_far) st.case1_armed = true;  // inject over the second half
  }
  if (t >= 1.0 / params.q1 && std::abs(Ua_prev) > st.opts.eps_abs) st.ua_zero_so_far = false;
  if (std::abs(state.w(0)) > st.opts.eps_abs) st.w0_zero_so_far = false;

  const bool case1 = st.case1_armed && t >= mid && t < t_next;
  return (case1 || t < st.inject_until) ? st.opts.eps_exc : 0.0;
}

void excitation_rollover(ExcitationState& st, double t_trigger, double t_next,
                         bool identification_pending) {
  if (identification_pending) {
    const bool case2 = st.zero_initial_profiles && st.ua_zero_so_far;
    const bool case3 = st.w0_zero_so_far;
    if (case2 || case3) st.inject_until = t_next;
  }
  st.prop_so_far = true;
  st.case1_armed = false;
  st.w0_zero_so_far = true;
  (void)t_trigger;
}

}  // namespace sandwich
