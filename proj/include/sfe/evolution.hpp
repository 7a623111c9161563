#pragma once

// Time integration of u_t - Lap u = f(t, x) on Omega by BDF-4, each step a
// Helmholtz solve through the extension machinery built once per run.
// Startup: Backward Euler steps or caller-supplied exact history.

#include <deque>
#include <functional>

#include "sfe/elliptic_solver.hpp"

namespace sfe {

enum class StartScheme { EulerStart, ExactHistory };

struct StepperConfig {
  double dt = 0.0;
  double T = 0.0;
  StartScheme scheme = StartScheme::EulerStart;
  int k = 0;

  int steps() const;
};

// Last four extended solutions, most recent last.
using History = std::deque<RealField>;

// Space-time data: (t, x, y) -> value; y ignored in 1D.
using TimeField = std::function<double(double, double, double)>;

struct HeatProblem {
  explicit HeatProblem(Domain d) : domain(std::move(d)) {}

  Domain domain;
  TimeField forcing;
  TimeField boundary_value;
  std::function<double(double, double)> initial;  // used by EulerStart
  TimeField exact;                                // optional; empty if unknown
};

struct StepTrace {
  int step = 0;
  double t = 0.0;
  double field_max = 0.0;
  double error = -1.0;  // vs exact when available, else -1
};

struct HeatRunResult {
  RealField u_final;
  Grid grid;
  GridMasks masks;
  std::vector<StepTrace> trace;
  bool blew_up = false;
  double final_error = -1.0;
};

// One BDF-4 step: F = (12 dt f_next + 48 u_n - 36 u_(n-1) + 16 u_(n-2)
// - 3 u_(n-3)) / 25, then the Helmholtz solve with boundary data g_next.
Solution bdf4_step(const History& history, const RealField& f_next,
                   const std::vector<double>& g_next, double dt,
                   const EllipticMachinery& mach);

// One Backward Euler step: (I - dt Lap) u = dt f_next + u_prev.
Solution euler_step(const RealField& u_prev, const RealField& f_next,
                    const std::vector<double>& g_next, double dt,
                    const EllipticMachinery& mach);

HeatRunResult run_heat(const HeatProblem& problem, int N,
                       const StepperConfig& config);

}  // namespace sfe
