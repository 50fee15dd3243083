#pragma once

// Test-only reference integrator for the two-node thermal ODE. Classic RK4
// over the coupled system; used as the independent oracle against the
// library's closed-form exponential stepping. Kept free of any dependence
// on transient_step so the two routes stay independent.

#include "stagioni/thermal.hpp"

namespace test_support {

struct NodePair {
  double die;
  double pkg;
};

inline NodePair ode_rhs(const stagioni::thermal::ThermalStack& stack,
                        const NodePair& y, double p_w, double ambient_c) {
  const double tau_p = stack.c_pkg_jpk * stack.r_eff_kpw();
  const double pkg_target = ambient_c + p_w * stack.r_eff_kpw();
  const double die_target = y.pkg + p_w * stack.alpha_jump_kpw;
  return {(die_target - y.die) / stack.tau_die_s, (pkg_target - y.pkg) / tau_p};
}

inline NodePair rk4_step(const stagioni::thermal::ThermalStack& stack,
                         const NodePair& y, double p_w, double ambient_c,
                         double dt) {
  const NodePair k1 = ode_rhs(stack, y, p_w, ambient_c);
  const NodePair y2{y.die + 0.5 * dt * k1.die, y.pkg + 0.5 * dt * k1.pkg};
  const NodePair k2 = ode_rhs(stack, y2, p_w, ambient_c);
  const NodePair y3{y.die + 0.5 * dt * k2.die, y.pkg + 0.5 * dt * k2.pkg};
  const NodePair k3 = ode_rhs(stack, y3, p_w, ambient_c);
  const NodePair y4{y.die + dt * k3.die, y.pkg + dt * k3.pkg};
  const NodePair k4 = ode_rhs(stack, y4, p_w, ambient_c);
  return {y.die + dt / 6.0 * (k1.die + 2.0 * k2.die + 2.0 * k3.die + k4.die),
          y.pkg + dt / 6.0 * (k1.pkg + 2.0 * k2.pkg + 2.0 * k3.pkg + k4.pkg)};
}

inline NodePair rk4_integrate(const stagioni::thermal::ThermalStack& stack,
                              NodePair y, double p_w, double ambient_c,
                              double total_s, double dt) {
  const long steps = static_cast<long>(total_s / dt + 0.5);
  for (long i = 0; i < steps; ++i) y = rk4_step(stack, y, p_w, ambient_c, dt);
  return y;
}

}  // namespace test_support
