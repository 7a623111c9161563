#include "sfe/elliptic_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace sfe {

BcSpec BcSpec::dirichlet(std::vector<double> values) {
  BcSpec bc;
  bc.type.assign(values.size(), BcType::Dirichlet);
  bc.value = std::move(values);
  return bc;
}

BcSpec BcSpec::all_dirichlet(int n_b, double value) {
  BcSpec bc;
  bc.type.assign(n_b, BcType::Dirichlet);
  bc.value.assign(n_b, value);
  return bc;
}

EllipticMachinery::EllipticMachinery(const Domain& domain, int N,
                                     AssemblyConfig cfg)
    : domain_(domain),
      grid_(domain.dim(), N),
      cfg_(std::move(cfg)),
      bd_(domain.boundary_nodes(N)),
      masks_(domain.grid_masks(grid_)) {
  if (cfg_.bc_type.empty())
    cfg_.bc_type.assign(bd_.n_b, BcType::Dirichlet);
  if (static_cast<int>(cfg_.bc_type.size()) != bd_.n_b)
    throw std::invalid_argument("EllipticMachinery: bc type count mismatch");
  sys_ = assemble_extension_system(grid_, masks_, bd_, cfg_);
  solver_ = std::make_unique<MinNormSolver>(sys_.M);
}

Solution EllipticMachinery::solve(const RealField& f,
                                  const std::vector<double>& boundary_data,
                                  const TraceSource* analytic) const {
  const Eigen::VectorXd b =
      assemble_rhs(sys_, grid_, masks_, bd_, cfg_, f, boundary_data, analytic);
  const MinNormSolution mn = solver_->solve(b);

  const Eigen::Index nmodes = static_cast<Eigen::Index>(sys_.basis.modes.size());
  const RealField h = reconstruct_extension(grid_, sys_.basis, mn.x.head(nmodes));
  RealField f_e = composite_forcing(masks_, f, h);

  Spectrum c = to_coefficients(grid_, f_e);
  double U = 0.0;
  if (sys_.has_mean_unknown) {
    invert_zero_mean_laplacian_inplace(grid_, c);
    U = mn.x(mn.x.size() - 1);
  } else if (cfg_.op.kind == OperatorSymbol::Kind::Helmholtz) {
    invert_helmholtz_inplace(grid_, c, cfg_.op.alpha);
  } else {
    invert_shifted_laplacian_inplace(grid_, c, cfg_.op.sigma);
  }
  RealField u = to_values(grid_, c);
  if (U != 0.0)
    for (double& v : u) v += U;

  Solution sol{GridField::from_values(grid_, std::move(u)), U, std::move(f_e),
               mn.x,
               SolveDiagnostics{sys_.rows(), sys_.cols(), mn.rank, mn.residual,
                                mn.rank_deficient, sys_.basis.J}};
  return sol;
}

Solution solve_elliptic(const Domain& domain, int N, const OperatorSymbol& op,
                        int k, RegularityPath path, const RealField& f,
                        const BcSpec& bc, const TraceSource* analytic) {
  AssemblyConfig cfg;
  cfg.op = op;
  cfg.k = k;
  cfg.reg_path = path;
  cfg.bc_type = bc.type;
  cfg.context =
      domain.dim() == 1 ? SystemContext::Poisson1D : SystemContext::TwoD;
  EllipticMachinery mach(domain, N, std::move(cfg));
  return mach.solve(f, bc.value, analytic);
}

double manufactured_error(const Grid& g, const GridMasks& masks,
                          const RealField& u_e,
                          const std::function<double(double, double)>& exact) {
  double err = 0.0;
  if (g.d == 1) {
    for (int i = 0; i < g.N; ++i)
      if (masks.in_omega(g.index(i)))
        err = std::max(err, std::abs(u_e[g.index(i)] - exact(g.coord(i), 0.0)));
  } else {
    for (int ix = 0; ix < g.N; ++ix)
      for (int iy = 0; iy < g.N; ++iy) {
        const std::size_t idx = g.index(ix, iy);
        if (masks.in_omega(idx))
          err = std::max(err,
                         std::abs(u_e[idx] - exact(g.coord(ix), g.coord(iy))));
      }
  }
  return err;
}

}  // namespace sfe
