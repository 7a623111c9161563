#include "sfe/cases.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>
#include <fftw3.h>

#include "sfe/elliptic_solver.hpp"
#include "sfe/evolution.hpp"
#include "sfe/extension.hpp"

namespace sfe {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------- fixtures

// f = 1/(x-1) on (2, 5); f^(l)(x) = (-1)^l l! / (x-1)^(l+1).
double fderiv_1d(int l, double x) {
  double fact = 1.0;
  for (int i = 2; i <= l; ++i) fact *= i;
  if (l % 2) fact = -fact;
  return fact / std::pow(x - 1.0, l + 1);
}

// Antiderivative family of 1/(x-1): u'' = f has u = (x-1)ln(x-1) + C1 x + C2.
double exact_1d(double x, double c1, double c2) {
  return (x - 1.0) * std::log(x - 1.0) + c1 * x + c2;
}

double uex_2d(double x, double y) { return std::exp(std::sin(x)) * std::cos(y); }

// X(x) = e^{sin x} sin x (1 + sin x), the x factor of -Lap(e^{sin x} cos y).
double xfac(double x, int der) {
  const double s = std::sin(x), c = std::cos(x), e = std::exp(s);
  switch (der) {
    case 0:
      return e * s * (1.0 + s);
    case 1:
      return e * c * (1.0 + 3.0 * s + s * s);
    case 2:
      return e * (c * c * (1.0 + 3.0 * s + s * s) -
                  s * (1.0 + 3.0 * s + s * s) + c * c * (3.0 + 2.0 * s));
    default:
      throw std::invalid_argument("xfac: derivative order above 2");
  }
}

double yfac(double y, int der) { return std::cos(y + der * kPi / 2.0); }

double binom(int n, int p) {
  double r = 1.0;
  for (int i = 1; i <= p; ++i) r = r * (n - p + i) / i;
  return r;
}

struct CaseDefaults {
  std::vector<int> N;
  std::vector<int> k;
  std::vector<double> shifts;
  bool finest_ref = false;  // last N is the reference grid, not a data row
};

const std::vector<std::pair<std::string, CaseDefaults>>& catalog() {
  static const std::vector<std::pair<std::string, CaseDefaults>> table = {
      {"extension_1d", {{4096}, {0, 1, 2, 3}, {}, false}},
      {"poisson_1d_dirichlet",
       {{16, 32, 64, 128, 256, 512, 1024}, {-1, 0, 1, 2, 3}, {}, false}},
      {"poisson_1d_mixed",
       {{16, 32, 64, 128, 256, 512, 1024}, {0, 1, 2}, {}, false}},
      {"heat_1d", {{32, 64, 128, 256, 512, 1024}, {0, 1}, {}, true}},
      {"poisson_2d_disc", {{32, 64, 128, 256}, {-1, 0, 1}, {}, true}},
      {"poisson_2d_eye", {{32, 64, 128}, {-1, 0, 1}, {}, false}},
      {"poisson_2d_diamond", {{32, 64, 128}, {-1, 0, 1}, {}, false}},
      {"heat_2d", {{32, 64, 128}, {0, 1}, {}, false}},
      {"eigs_disc", {{128}, {-1}, {0.20}, false}},
      {"eigs_eye", {{128}, {-1}, {1.30}, false}},
      {"eigs_diamond", {{128}, {-1}, {2.20, 5.5, 8.7}, false}},
  };
  return table;
}

const CaseDefaults& defaults_for(const std::string& id) {
  for (const auto& [name, def] : catalog())
    if (name == id) return def;
  throw std::invalid_argument("unknown case id: " + id);
}

struct ResolvedRequest {
  std::vector<int> N;
  std::vector<int> k;
  std::vector<double> shifts;
  bool finest_ref = false;
};

ResolvedRequest resolve(const CaseRequest& req) {
  const CaseDefaults& def = defaults_for(req.id);
  ResolvedRequest r;
  r.N = req.N.empty() ? def.N : req.N;
  r.k = req.k.empty() ? def.k : req.k;
  r.shifts = req.shifts.empty() ? def.shifts : req.shifts;
  r.finest_ref = def.finest_ref;
  if (r.N.empty()) throw std::invalid_argument(req.id + ": empty N list");
  for (std::size_t i = 0; i < r.N.size(); ++i) {
    const int n = r.N[i];
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument(req.id + ": N must be powers of two >= 8");
    if (i > 0 && r.N[i - 1] >= n)
      throw std::invalid_argument(req.id + ": N list must be ascending");
  }
  if (r.finest_ref && r.N.size() < 2)
    throw std::invalid_argument(req.id + ": finest-grid reference needs >= 2 grids");
  return r;
}

Json versions_json() {
  return Json{{"fftw", std::string(fftw_version)},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)}};
}

// Shared-node L-inf distance between a coarse solution and the finest-grid
// reference; power-of-two nesting makes coarse nodes exact fine nodes.
double restricted_error(const Grid& gc, const GridMasks& mc,
                        const RealField& coarse, const Grid& gf,
                        const RealField& fine) {
  if (gf.N % gc.N != 0)
    throw std::invalid_argument("restricted_error: grids are not nested");
  const int r = gf.N / gc.N;
  double err = 0.0;
  if (gc.d == 1) {
    for (int i = 0; i < gc.N; ++i)
      if (mc.in_omega(i))
        err = std::max(err, std::abs(coarse[i] - fine[static_cast<std::size_t>(i) * r]));
    return err;
  }
  for (int ix = 0; ix < gc.N; ++ix)
    for (int iy = 0; iy < gc.N; ++iy) {
      const std::size_t ic = gc.index(ix, iy);
      if (!mc.in_omega(ic)) continue;
      const std::size_t jf = gf.index(ix * r, iy * r);
      err = std::max(err, std::abs(coarse[ic] - fine[jf]));
    }
  return err;
}

void attach_rates(ConvergenceRecord& rec) {
  std::map<int, std::vector<RatePoint>> by_k;
  for (const ConvergenceRow& row : rec.rows)
    by_k[row.k].push_back({row.N, row.error_inf});
  for (auto& [k, pts] : by_k) {
    if (pts.size() >= 3) {
      rec.fit_by_k[k] = estimate_rate(pts);
    } else {
      RateFit f;
      f.points_used = static_cast<int>(pts.size());
      f.saturated = true;
      f.slope = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i + 1].N == 2 * pts[i].N)
          f.pairwise.push_back(std::log2(pts[i].error / pts[i + 1].error));
      rec.fit_by_k[k] = f;
    }
  }
  for (ConvergenceRow& row : rec.rows) row.rate = rec.fit_by_k[row.k].slope;
}

// ---------------------------------------------------------------- runners

CaseResult run_extension_1d(const CaseRequest& req, const ResolvedRequest& r) {
  const Domain dom = catalog_domain(req.id);
  CaseResult out;
  out.conv.case_id = req.id;
  out.conv.reference = "none";
  const auto fd = [](int l, double x) { return fderiv_1d(l, x); };
  for (int k : r.k) {
    if (k < 0) throw std::invalid_argument("extension_1d: k >= 0");
    for (int N : r.N) {
      const Continuation cont = extend_function(fd, dom, k);
      const Grid g{1, N};
      const GridMasks masks = dom.grid_masks(g);
      const RealField h = reconstruct_extension(g, cont.basis, cont.coeffs);
      RealField f(g.size(), 0.0);
      for (int i = 0; i < N; ++i)
        if (masks.in_omega(i)) f[i] = fderiv_1d(0, g.coord(i));
      const RealField fe = composite_forcing(masks, f, h);
      const DecayFit fit = spectrum_decay(g, to_coefficients(g, fe));
      ConvergenceRow row;
      row.k = k;
      row.N = N;
      row.n_b = 2;
      row.J = cont.basis.J;
      row.error_inf = fit.top_bin_mag;
      row.rate = fit.slope;
      out.conv.rows.push_back(row);
    }
  }
  // The rate column already holds the per-row spectral decay slope; record
  // the largest-grid slope per k for the summary map.
  for (const ConvergenceRow& row : out.conv.rows) {
    RateFit f;
    f.slope = row.rate;
    f.points_used = 1;
    out.conv.fit_by_k[row.k] = f;
  }
  return out;
}

CaseResult run_poisson_1d(const CaseRequest& req, const ResolvedRequest& r,
                          bool mixed) {
  const Domain dom = catalog_domain(req.id);
  // Dirichlet u(2) = 1, u(5) = -1; mixed replaces the left condition with
  // u'(2) = 1 (outward normal derivative -1 at the left endpoint).
  const double c1 = mixed ? 0.0 : (-2.0 - 4.0 * std::log(4.0)) / 3.0;
  const double c2 = mixed ? -1.0 - 4.0 * std::log(4.0) : 1.0 - 2.0 * c1;
  const auto exact = [c1, c2](double x, double) { return exact_1d(x, c1, c2); };

  CaseResult out;
  out.conv.case_id = req.id;
  out.conv.reference = "exact";
  for (int k : r.k) {
    for (int N : r.N) {
      AssemblyConfig cfg;
      cfg.op = OperatorSymbol::laplacian();
      cfg.k = k;
      cfg.reg_path = RegularityPath::ClosedForm;
      cfg.context = SystemContext::Poisson1D;
      std::vector<double> bc_value = {1.0, -1.0};
      if (mixed) {
        cfg.bc_type = {BcType::Neumann, BcType::Dirichlet};
        bc_value = {-1.0, -1.0};  // D_n u(2) = -u'(2) = -1
      }
      EllipticMachinery mach(dom, N, cfg);
      const Grid& g = mach.grid();
      RealField f(g.size(), 0.0);
      for (int i = 0; i < N; ++i)
        if (mach.masks().in_omega(i)) f[i] = fderiv_1d(0, g.coord(i));
      TraceSource analytic = [&mach](int l, int node) {
        const double s = mach.boundary().nodes[node][0];
        const double n = mach.boundary().normals[node][0];
        return std::pow(n, l) * fderiv_1d(l, s);
      };
      const Solution sol =
          mach.solve(f, bc_value, k >= 0 ? &analytic : nullptr);
      ConvergenceRow row;
      row.k = k;
      row.N = N;
      row.n_b = mach.boundary().n_b;
      row.J = sol.diag.J;
      row.error_inf = manufactured_error(g, mach.masks(), sol.u_e.values, exact);
      out.conv.rows.push_back(row);
    }
  }
  attach_rates(out.conv);
  return out;
}

// Grid samples and analytic directional traces of the forcing passed to the
// solver: the field F in Lap u = F, sign-flipped from the -Lap u = f form.
struct Forcing2d {
  std::function<double(double, double)> value;
  std::function<double(double, double, double, double, int)> trace;
};

Forcing2d disc_forcing() {
  Forcing2d f;
  // -Lap u = 5 sin x cos y, so F = -5 sin x cos y.
  f.value = [](double x, double y) { return -5.0 * std::sin(x) * std::cos(y); };
  f.trace = [](double x, double y, double nx, double ny, int l) {
    double out = 0.0;
    for (int a2 = 0; a2 <= l; ++a2) {
      const int a1 = l - a2;
      out += binom(l, a2) * std::pow(nx, a1) * std::pow(ny, a2) *
             (-5.0) * std::sin(x + a1 * kPi / 2.0) * std::cos(y + a2 * kPi / 2.0);
    }
    return out;
  };
  return f;
}

Forcing2d manufactured_forcing() {
  Forcing2d f;
  f.value = [](double x, double y) { return -xfac(x, 0) * yfac(y, 0); };
  f.trace = [](double x, double y, double nx, double ny, int l) {
    double out = 0.0;
    for (int a2 = 0; a2 <= l; ++a2) {
      const int a1 = l - a2;
      out += binom(l, a2) * std::pow(nx, a1) * std::pow(ny, a2) *
             (-xfac(x, a1)) * yfac(y, a2);
    }
    return out;
  };
  return f;
}

CaseResult run_poisson_2d(const CaseRequest& req, const ResolvedRequest& r) {
  const Domain dom = catalog_domain(req.id);
  const bool finest = r.finest_ref;
  const Forcing2d forcing =
      req.id == "poisson_2d_disc" ? disc_forcing() : manufactured_forcing();

  CaseResult out;
  out.conv.case_id = req.id;
  out.conv.reference = finest ? "finest-grid" : "manufactured";
  struct Cell {
    int N;
    int n_b;
    int J;
    RealField u;
    Grid g;
    GridMasks masks;
  };
  for (int k : r.k) {
    std::vector<Cell> cells;
    for (int N : r.N) {
      AssemblyConfig cfg;
      cfg.op = OperatorSymbol::laplacian();
      cfg.k = k;
      cfg.reg_path = RegularityPath::ClosedForm;
      cfg.context = SystemContext::TwoD;
      EllipticMachinery mach(dom, N, cfg);
      const Grid& g = mach.grid();
      RealField f(g.size(), 0.0);
      for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
          const std::size_t idx = g.index(ix, iy);
          if (mach.masks().in_omega(idx))
            f[idx] = forcing.value(g.coord(ix), g.coord(iy));
        }
      std::vector<double> gdata(mach.boundary().n_b, 0.0);
      if (!finest)
        for (int i = 0; i < mach.boundary().n_b; ++i)
          gdata[i] = uex_2d(mach.boundary().nodes[i][0],
                            mach.boundary().nodes[i][1]);
      TraceSource analytic = [&mach, &forcing](int l, int node) {
        const Point& s = mach.boundary().nodes[node];
        const Point& n = mach.boundary().normals[node];
        return forcing.trace(s[0], s[1], n[0], n[1], l);
      };
      Solution sol = mach.solve(f, gdata, k >= 0 ? &analytic : nullptr);
      cells.push_back(Cell{N, mach.boundary().n_b, sol.diag.J,
                           std::move(sol.u_e.values), g, mach.masks()});
    }
    const std::size_t limit = finest ? cells.size() - 1 : cells.size();
    for (std::size_t i = 0; i < limit; ++i) {
      ConvergenceRow row;
      row.k = k;
      row.N = cells[i].N;
      row.n_b = cells[i].n_b;
      row.J = cells[i].J;
      row.error_inf =
          finest ? restricted_error(cells[i].g, cells[i].masks, cells[i].u,
                                    cells.back().g, cells.back().u)
                 : manufactured_error(cells[i].g, cells[i].masks, cells[i].u,
                                      uex_2d);
      out.conv.rows.push_back(row);
    }
  }
  attach_rates(out.conv);
  return out;
}

CaseResult run_heat_1d(const CaseRequest& req, const ResolvedRequest& r) {
  const HeatProblem prob = heat_case_problem(req.id);

  CaseResult out;
  out.conv.case_id = req.id;
  out.conv.reference = "finest-grid";
  const BoundaryDiscretization bd = prob.domain.boundary_nodes(r.N.front());
  for (int k : r.k) {
    std::vector<HeatRunResult> runs;
    for (int N : r.N)
      runs.push_back(run_heat(prob, N, heat_case_stepper(req.id, N, k)));
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
      ConvergenceRow row;
      row.k = k;
      row.N = r.N[i];
      row.n_b = bd.n_b;
      row.J = choose_num_modes(bd.n_b, k, 1, SystemContext::Poisson1D, false);
      row.error_inf =
          runs[i].blew_up
              ? std::numeric_limits<double>::infinity()
              : restricted_error(runs[i].grid, runs[i].masks, runs[i].u_final,
                                 runs.back().grid, runs.back().u_final);
      out.conv.rows.push_back(row);
    }
  }
  attach_rates(out.conv);
  return out;
}

CaseResult run_heat_2d(const CaseRequest& req, const ResolvedRequest& r) {
  const HeatProblem prob = heat_case_problem(req.id);

  CaseResult out;
  out.conv.case_id = req.id;
  out.conv.reference = "exact";
  for (int k : r.k) {
    for (int N : r.N) {
      const HeatRunResult res =
          run_heat(prob, N, heat_case_stepper(req.id, N, k));
      const BoundaryDiscretization bd = prob.domain.boundary_nodes(N);
      ConvergenceRow row;
      row.k = k;
      row.N = N;
      row.n_b = bd.n_b;
      row.J = choose_num_modes(bd.n_b, k, 2, SystemContext::TwoD, false);
      row.error_inf = res.blew_up ? std::numeric_limits<double>::infinity()
                                  : res.final_error;
      out.conv.rows.push_back(row);
    }
  }
  attach_rates(out.conv);
  return out;
}

CaseResult run_eigs(const CaseRequest& req, const ResolvedRequest& r) {
  const Domain dom = catalog_domain(req.id);
  EigConfig cfg;
  cfg.N = r.N.front();
  cfg.k = r.k.front();
  cfg.tau = req.tau;
  cfg.seed = req.seed;

  CaseResult out;
  out.is_eig = true;
  out.eig.case_id = req.id;
  out.eig.measure = dom.measure();

  const Grid g{dom.dim(), cfg.N};
  const GridMasks masks = dom.grid_masks(g);
  std::vector<EigResult> results;
  for (double sigma : r.shifts) {
    cfg.sigma = sigma;
    results.push_back(inverse_power(cfg, dom));
  }
  const auto to_row = [&](const EigResult& e) {
    EigRow row;
    row.sigma = e.sigma;
    row.lambda = e.lambda;
    row.lambda_scaled = e.lambda * dom.measure();
    row.iterations = e.iterations;
    row.final_dev = e.deviations.empty() ? 0.0 : e.deviations.back();
    row.residual = eigen_residual(g, masks, e.u, e.lambda);
    row.converged = e.converged;
    return row;
  };
  for (const EigResult& e : results) out.eig.rows.push_back(to_row(e));
  for (const EigResult& e : merge_eigs(results))
    out.eig.merged.push_back(to_row(e));
  return out;
}

Json domain_json(const Domain& dom) {
  Json j;
  j["name"] = dom.name();
  j["measure"] = dom.measure();
  return j;
}

}  // namespace

std::vector<std::string> catalog_ids() {
  std::vector<std::string> ids;
  for (const auto& [name, def] : catalog()) ids.push_back(name);
  return ids;
}

bool is_eig_case(const std::string& id) {
  return id.rfind("eigs_", 0) == 0;
}

Domain catalog_domain(const std::string& id) {
  defaults_for(id);  // validates the id
  if (id.find("disc") != std::string::npos || id == "heat_2d")
    return make_disc_complement({2.0, 3.0}, 1.0);
  if (id.find("eye") != std::string::npos)
    return make_eye({3.0, 3.0}, 3.0, 3.0 * kPi / 4.0);
  if (id.find("diamond") != std::string::npos)
    return make_diamond({3.0, 3.5}, 3.0);
  return make_interval(2.0, 5.0);
}

SingleSolve solve_catalog_case(const std::string& id, int N, int k) {
  const Domain dom = catalog_domain(id);
  if (id == "poisson_1d_dirichlet" || id == "poisson_1d_mixed") {
    const bool mixed = id == "poisson_1d_mixed";
    const double c1 = mixed ? 0.0 : (-2.0 - 4.0 * std::log(4.0)) / 3.0;
    const double c2 = mixed ? -1.0 - 4.0 * std::log(4.0) : 1.0 - 2.0 * c1;
    AssemblyConfig cfg;
    cfg.op = OperatorSymbol::laplacian();
    cfg.k = k;
    cfg.reg_path = RegularityPath::ClosedForm;
    cfg.context = SystemContext::Poisson1D;
    std::vector<double> bc_value = {1.0, -1.0};
    if (mixed) {
      cfg.bc_type = {BcType::Neumann, BcType::Dirichlet};
      bc_value = {-1.0, -1.0};
    }
    EllipticMachinery mach(dom, N, cfg);
    const Grid& g = mach.grid();
    RealField f(g.size(), 0.0);
    for (int i = 0; i < N; ++i)
      if (mach.masks().in_omega(i)) f[i] = fderiv_1d(0, g.coord(i));
    TraceSource analytic = [&mach](int l, int node) {
      const double s = mach.boundary().nodes[node][0];
      const double n = mach.boundary().normals[node][0];
      return std::pow(n, l) * fderiv_1d(l, s);
    };
    SingleSolve out{mach.solve(f, bc_value, k >= 0 ? &analytic : nullptr),
                    mach.boundary().n_b, -1.0};
    out.error_inf = manufactured_error(
        g, mach.masks(), out.sol.u_e.values,
        [c1, c2](double x, double) { return exact_1d(x, c1, c2); });
    return out;
  }
  if (id == "poisson_2d_disc" || id == "poisson_2d_eye" ||
      id == "poisson_2d_diamond") {
    const bool disc = id == "poisson_2d_disc";
    const Forcing2d forcing = disc ? disc_forcing() : manufactured_forcing();
    AssemblyConfig cfg;
    cfg.op = OperatorSymbol::laplacian();
    cfg.k = k;
    cfg.reg_path = RegularityPath::ClosedForm;
    cfg.context = SystemContext::TwoD;
    EllipticMachinery mach(dom, N, cfg);
    const Grid& g = mach.grid();
    RealField f(g.size(), 0.0);
    for (int ix = 0; ix < N; ++ix)
      for (int iy = 0; iy < N; ++iy) {
        const std::size_t idx = g.index(ix, iy);
        if (mach.masks().in_omega(idx))
          f[idx] = forcing.value(g.coord(ix), g.coord(iy));
      }
    std::vector<double> gdata(mach.boundary().n_b, 0.0);
    if (!disc)
      for (int i = 0; i < mach.boundary().n_b; ++i)
        gdata[i] = uex_2d(mach.boundary().nodes[i][0],
                          mach.boundary().nodes[i][1]);
    TraceSource analytic = [&mach, &forcing](int l, int node) {
      const Point& s = mach.boundary().nodes[node];
      const Point& n = mach.boundary().normals[node];
      return forcing.trace(s[0], s[1], n[0], n[1], l);
    };
    SingleSolve out{mach.solve(f, gdata, k >= 0 ? &analytic : nullptr),
                    mach.boundary().n_b, -1.0};
    if (!disc)
      out.error_inf =
          manufactured_error(g, mach.masks(), out.sol.u_e.values, uex_2d);
    return out;
  }
  throw std::invalid_argument("solve_catalog_case: not an elliptic case: " + id);
}

HeatProblem heat_case_problem(const std::string& id) {
  HeatProblem prob(catalog_domain(id));
  if (id == "heat_1d") {
    prob.forcing = [](double, double x, double) { return std::sin(x); };
    prob.boundary_value = [](double, double x, double) {
      return x < 3.5 ? 1.0 : 0.0;  // u(t,2) = 1, u(t,5) = 0
    };
    prob.initial = [](double x, double) { return std::exp(std::sin(x)); };
  } else if (id == "heat_2d") {
    prob.exact = [](double t, double x, double y) {
      return uex_2d(x, y) * std::cos(t);
    };
    prob.forcing = [](double t, double x, double y) {
      const double s = std::sin(x), c = std::cos(x);
      return std::exp(s) * std::cos(y) *
             (-std::sin(t) + std::cos(t) * (1.0 + s - c * c));
    };
    prob.boundary_value = prob.exact;
    prob.initial = [](double x, double y) { return uex_2d(x, y); };
  } else {
    throw std::invalid_argument("not a heat case: " + id);
  }
  return prob;
}

StepperConfig heat_case_stepper(const std::string& id, int N, int k) {
  StepperConfig s;
  if (id == "heat_1d") {
    s.dt = 2.5e-3;
    s.T = 1.0;
    s.scheme = StartScheme::EulerStart;
  } else if (id == "heat_2d") {
    s.dt = 1.0 / (4.0 * N);
    s.T = 2.0;
    s.scheme = StartScheme::ExactHistory;
  } else {
    throw std::invalid_argument("not a heat case: " + id);
  }
  s.k = k;
  return s;
}

DecayFit spectrum_decay(const Grid& g, const Spectrum& c) {
  if (g.d != 1) throw std::invalid_argument("spectrum_decay: 1D only");
  const int N = g.N;
  double cmax = 0.0;
  for (const Complex& v : c) cmax = std::max(cmax, std::abs(v));
  if (cmax == 0.0) throw std::invalid_argument("spectrum_decay: zero spectrum");
  int jmax = 0;
  std::vector<double> mag(N / 2, 0.0);  // mag[j] = |c_j|, j >= 1
  for (int j = 1; j < N / 2; ++j) {
    mag[j] = std::abs(c[j]);
    if (mag[j] > 1e-13 * cmax) jmax = j;
  }
  if (jmax < 4)
    throw std::invalid_argument("spectrum_decay: too few resolved modes");

  const double jlo = jmax / std::sqrt(10.0);
  constexpr int kBins = 6;
  std::array<double, kBins + 1> edges{};
  for (int i = 0; i <= kBins; ++i)
    edges[i] = std::exp(std::log(jlo) +
                        i * (std::log(static_cast<double>(jmax)) - std::log(jlo)) / kBins);
  std::vector<double> bx, by;
  for (int i = 0; i < kBins; ++i) {
    double best = 0.0;
    for (int j = 1; j < N / 2; ++j) {
      const bool in = i + 1 == kBins ? (j >= edges[i] && j <= edges[i + 1])
                                     : (j >= edges[i] && j < edges[i + 1]);
      if (in) best = std::max(best, mag[j]);
    }
    if (best > 0.0) {
      bx.push_back(std::sqrt(edges[i] * edges[i + 1]));
      by.push_back(best);
    }
  }
  if (bx.size() < 2)
    throw std::invalid_argument("spectrum_decay: not enough populated bins");

  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < bx.size(); ++i) {
    sx += std::log(bx[i]);
    sy += std::log(by[i]);
  }
  const double mx = sx / bx.size(), my = sy / bx.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < bx.size(); ++i) {
    const double dx = std::log(bx[i]) - mx;
    num += dx * (std::log(by[i]) - my);
    den += dx * dx;
  }
  DecayFit fit;
  fit.slope = num / den;
  fit.top_bin_mag = by.back();
  fit.jmax = jmax;
  return fit;
}

CaseResult run_case(const CaseRequest& req) {
  const ResolvedRequest r = resolve(req);
  CaseResult out;
  if (req.id == "extension_1d") {
    out = run_extension_1d(req, r);
  } else if (req.id == "poisson_1d_dirichlet") {
    out = run_poisson_1d(req, r, false);
  } else if (req.id == "poisson_1d_mixed") {
    out = run_poisson_1d(req, r, true);
  } else if (req.id == "heat_1d") {
    out = run_heat_1d(req, r);
  } else if (req.id == "poisson_2d_disc" || req.id == "poisson_2d_eye" ||
             req.id == "poisson_2d_diamond") {
    out = run_poisson_2d(req, r);
  } else if (req.id == "heat_2d") {
    out = run_heat_2d(req, r);
  } else if (is_eig_case(req.id)) {
    out = run_eigs(req, r);
  } else {
    throw std::invalid_argument("unknown case id: " + req.id);
  }

  Json meta;
  meta["case"] = req.id;
  meta["N"] = r.N;
  meta["k"] = r.k;
  meta["domain"] = domain_json(catalog_domain(req.id));
  meta["versions"] = versions_json();
  if (out.is_eig) {
    meta["shifts"] = r.shifts;
    meta["tau"] = req.tau;
    meta["seed"] = req.seed;
  } else {
    meta["reference"] = out.conv.reference;
  }
  if (req.id == "heat_1d")
    meta["stepper"] = {{"dt", 2.5e-3}, {"T", 1.0}, {"start", "euler"}};
  if (req.id == "heat_2d")
    meta["stepper"] = {{"dt_rule", "1/(4N)"}, {"T", 2.0}, {"start", "exact-history"}};
  out.metadata = std::move(meta);
  return out;
}

void emit(const CaseResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string base = (fs::path(out_dir) / result.metadata.at("case").get<std::string>()).string();

  if (!result.is_eig) {
    const ConvergenceRecord& rec = result.conv;
    std::vector<std::vector<std::string>> rows;
    for (const ConvergenceRow& row : rec.rows)
      rows.push_back({rec.case_id, std::to_string(row.k), std::to_string(row.N),
                      std::to_string(row.n_b), std::to_string(row.J),
                      format_sci(row.error_inf), format_sci(row.rate)});
    write_csv(base + ".csv", {"case", "k", "N", "n_b", "J", "error_inf", "rate"},
              rows);

    // gnuplot-friendly long format: one block per k, blank-line separated.
    std::string dat = "# case k N error_inf rate\n";
    int prev_k = std::numeric_limits<int>::min();
    for (const ConvergenceRow& row : rec.rows) {
      if (prev_k != std::numeric_limits<int>::min() && row.k != prev_k)
        dat += "\n";
      prev_k = row.k;
      dat += rec.case_id + " " + std::to_string(row.k) + " " +
             std::to_string(row.N) + " " + format_sci(row.error_inf) + " " +
             format_sci(row.rate) + "\n";
    }
    std::ofstream out(base + "_long.dat", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + base + "_long.dat");
    out << dat;
  } else {
    const auto emit_eig = [&](const std::vector<EigRow>& rows,
                              const std::string& path) {
      std::vector<std::vector<std::string>> text;
      for (const EigRow& row : rows)
        text.push_back({format_sci(row.sigma), format_sci(row.lambda),
                        format_sci(row.lambda_scaled),
                        std::to_string(row.iterations),
                        format_sci(row.final_dev), format_sci(row.residual),
                        row.converged ? "1" : "0"});
      write_csv(path,
                {"shift", "lambda", "lambda_scaled", "iterations", "final_dn",
                 "residual", "converged"},
                text);
    };
    emit_eig(result.eig.rows, base + ".csv");
    emit_eig(result.eig.merged, base + "_merged.csv");
  }
  write_json(base + "_meta.json", result.metadata);
}

}  // namespace sfe
