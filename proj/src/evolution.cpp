#include "sfe/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace sfe {

namespace {

RealField sample_time_field(const Grid& g, const TimeField& fn, double t) {
  RealField out(g.size());
  if (g.d == 1) {
    for (int i = 0; i < g.N; ++i) out[i] = fn(t, g.coord(i), 0.0);
  } else {
    for (int ix = 0; ix < g.N; ++ix)
      for (int iy = 0; iy < g.N; ++iy)
        out[g.index(ix, iy)] = fn(t, g.coord(ix), g.coord(iy));
  }
  return out;
}

std::vector<double> sample_boundary(const BoundaryDiscretization& bd,
                                    const TimeField& fn, double t) {
  std::vector<double> out(bd.n_b);
  for (int i = 0; i < bd.n_b; ++i)
    out[i] = fn(t, bd.nodes[i][0], bd.nodes[i][1]);
  return out;
}

double max_abs(const RealField& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

AssemblyConfig heat_config(int n_b, int d, int k, double alpha) {
  AssemblyConfig cfg;
  cfg.op = OperatorSymbol::helmholtz(alpha);
  cfg.k = k;
  cfg.reg_path = RegularityPath::MaskedTraces;
  cfg.bc_type.assign(n_b, BcType::Dirichlet);
  cfg.context = d == 1 ? SystemContext::Poisson1D : SystemContext::TwoD;
  return cfg;
}

}  // namespace

int StepperConfig::steps() const {
  if (dt <= 0.0) throw std::invalid_argument("StepperConfig: dt > 0 required");
  const double n = T / dt;
  const int ni = static_cast<int>(std::lround(n));
  if (std::abs(n - ni) > 1e-9 * std::max(1.0, n))
    throw std::invalid_argument("StepperConfig: T/dt must be integral");
  return ni;
}

Solution bdf4_step(const History& history, const RealField& f_next,
                   const std::vector<double>& g_next, double dt,
                   const EllipticMachinery& mach) {
  if (history.size() != 4)
    throw std::invalid_argument("bdf4_step: need exactly 4 history fields");
  const std::size_t n = f_next.size();
  for (const RealField& u : history)
    if (u.size() != n)
      throw std::invalid_argument("bdf4_step: history grid mismatch");
  RealField F(n);
  const RealField& u0 = history[3];
  const RealField& u1 = history[2];
  const RealField& u2 = history[1];
  const RealField& u3 = history[0];
  for (std::size_t i = 0; i < n; ++i)
    F[i] = (12.0 * dt * f_next[i] + 48.0 * u0[i] - 36.0 * u1[i] +
            16.0 * u2[i] - 3.0 * u3[i]) /
           25.0;
  return mach.solve(F, g_next);
}

Solution euler_step(const RealField& u_prev, const RealField& f_next,
                    const std::vector<double>& g_next, double dt,
                    const EllipticMachinery& mach) {
  RealField F(f_next.size());
  for (std::size_t i = 0; i < F.size(); ++i)
    F[i] = dt * f_next[i] + u_prev[i];
  return mach.solve(F, g_next);
}

HeatRunResult run_heat(const HeatProblem& problem, int N,
                       const StepperConfig& config) {
  const int nsteps = config.steps();
  const double dt = config.dt;
  const Domain& dom = problem.domain;
  const int d = dom.dim();

  EllipticMachinery bdf_mach(
      dom, N, heat_config(dom.boundary_nodes(N).n_b, d, config.k,
                          12.0 * dt / 25.0));
  const Grid& g = bdf_mach.grid();

  HeatRunResult res{RealField(), g, bdf_mach.masks(), {}, false, -1.0};

  History hist;
  int start_step = 0;
  if (config.scheme == StartScheme::ExactHistory) {
    if (!problem.exact)
      throw std::invalid_argument("run_heat: exact history requires exact");
    for (int m = 0; m < 4 && m <= nsteps; ++m)
      hist.push_back(sample_time_field(g, problem.exact, m * dt));
    start_step = 3;
  } else {
    hist.push_back(sample_time_field(
        g, [&](double, double x, double y) { return problem.initial(x, y); },
        0.0));
  }

  const double u0_max = max_abs(hist.front());
  const double blowup_bound = 1e6 * (1.0 + u0_max);

  std::unique_ptr<EllipticMachinery> euler_mach;
  if (config.scheme == StartScheme::EulerStart && nsteps > 0)
    euler_mach = std::make_unique<EllipticMachinery>(
        dom, N, heat_config(bdf_mach.boundary().n_b, d, config.k, dt));

  auto record = [&](int step, const RealField& u) {
    StepTrace tr{step, step * dt, max_abs(u), -1.0};
    if (problem.exact) {
      double err = 0.0;
      const GridMasks& masks = bdf_mach.masks();
      const RealField ex = sample_time_field(g, problem.exact, tr.t);
      for (std::size_t i = 0; i < u.size(); ++i)
        if (masks.in_omega(i)) err = std::max(err, std::abs(u[i] - ex[i]));
      tr.error = err;
    }
    res.trace.push_back(tr);
  };

  record(start_step == 3 ? 3 : 0, hist.back());

  for (int n = start_step; n < nsteps; ++n) {
    const double t_next = (n + 1) * dt;
    const RealField f_next = sample_time_field(g, problem.forcing, t_next);
    const std::vector<double> g_next =
        sample_boundary(bdf_mach.boundary(), problem.boundary_value, t_next);

    Solution sol =
        hist.size() < 4
            ? euler_step(hist.back(), f_next, g_next, dt, *euler_mach)
            : bdf4_step(hist, f_next, g_next, dt, bdf_mach);

    hist.push_back(std::move(sol.u_e.values));
    if (hist.size() > 4) hist.pop_front();

    record(n + 1, hist.back());
    if (res.trace.back().field_max > blowup_bound) {
      res.blew_up = true;
      break;
    }
  }

  res.u_final = hist.back();
  res.final_error = res.trace.back().error;
  return res;
}

}  // namespace sfe
