#pragma once

// End-to-end solution of L u = f on Omega with Dirichlet / mixed boundary
// conditions: assemble the constraint system, minimum-norm solve, rebuild
// the extended solution from the composite forcing.

#include <memory>
#include <optional>

#include "sfe/extension.hpp"

namespace sfe {

// Per-node boundary conditions. Neumann data is the outward normal
// derivative at the node.
struct BcSpec {
  std::vector<BcType> type;
  std::vector<double> value;

  static BcSpec dirichlet(std::vector<double> values);
  static BcSpec all_dirichlet(int n_b, double value = 0.0);
};

struct SolveDiagnostics {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index rank = 0;
  double residual = 0.0;
  bool rank_deficient = false;
  int J = 0;
};

struct Solution {
  GridField u_e;             // value-space field on C
  double U = 0.0;            // mean unknown on the zero-mean path
  RealField f_e;             // composite forcing that produced u_e
  Eigen::VectorXd mode_coeffs;
  SolveDiagnostics diag;
};

// Precomputed machinery for one (domain, N, k, operator, bc-types) tuple:
// boundary discretization, masks, constraint matrix, and its factorization.
// Repeated right-hand sides reuse everything.
class EllipticMachinery {
 public:
  EllipticMachinery(const Domain& domain, int N, AssemblyConfig cfg);

  // `f` holds grid samples valid on Omega (values on E are ignored).
  // `analytic` supplies forcing traces on the ClosedForm path with k >= 0.
  Solution solve(const RealField& f, const std::vector<double>& boundary_data,
                 const TraceSource* analytic = nullptr) const;

  const Grid& grid() const { return grid_; }
  const GridMasks& masks() const { return masks_; }
  const BoundaryDiscretization& boundary() const { return bd_; }
  const ExtensionSystem& system() const { return sys_; }
  const Domain& domain() const { return domain_; }
  const AssemblyConfig& config() const { return cfg_; }

 private:
  Domain domain_;
  Grid grid_;
  AssemblyConfig cfg_;
  BoundaryDiscretization bd_;
  GridMasks masks_;
  ExtensionSystem sys_;
  std::unique_ptr<MinNormSolver> solver_;
};

// One-call convenience wrapper.
Solution solve_elliptic(const Domain& domain, int N, const OperatorSymbol& op,
                        int k, RegularityPath path, const RealField& f,
                        const BcSpec& bc,
                        const TraceSource* analytic = nullptr);

// Max |u_e - exact| over Omega grid nodes.
double manufactured_error(const Grid& g, const GridMasks& masks,
                          const RealField& u_e,
                          const std::function<double(double, double)>& exact);

}  // namespace sfe
