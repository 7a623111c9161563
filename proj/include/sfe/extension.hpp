#pragma once

// Construction and solution of the under-determined constraint system for
// the forcing-extension coefficients {c_j} (plus the mean unknown U on the
// zero-mean Laplacian path): boundary rows, mean row, regularity rows, mode
// count selection, and the standalone 1D Fourier continuation.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "sfe/boundary_eval.hpp"
#include "sfe/geometry.hpp"
#include "sfe/spectral_core.hpp"

namespace sfe {

enum class SystemContext {
  Continuation1D,  // regularity rows only, J = k+1
  Poisson1D,       // J = k+2
  TwoD,            // smallest J with (2J+1)^d >= row count
};

int choose_num_modes(int n_b, int k, int d, SystemContext ctx, bool mean_row);

// Real trigonometric mode: the constant (j = 0, Cos), or cos(j.x)/sin(j.x)
// for j in the half lattice (j > 0 lexicographically).
struct RealMode {
  std::array<int, 2> j{0, 0};
  enum class Part { Cos, Sin } part = Part::Cos;
};

struct ExtensionBasis {
  int J = 0;
  int d = 1;
  std::vector<RealMode> modes;  // (2J+1)^d entries

  static ExtensionBasis build(int J, int d);
};

RealField sample_real_mode(const Grid& g, const RealMode& m);

// Exact trace D_n^l of a real mode at the boundary nodes.
std::vector<double> real_mode_trace(const RealMode& m, int d,
                                    const BoundaryDiscretization& bd, int l);

enum class BcType { Dirichlet, Neumann };

// Regularity-row flavor: exact mode traces on the matrix side with
// analytically supplied forcing traces, or spectral traces of Omega-masked
// fields on both sides. The masked flavor needs no forcing values outside
// Omega and is the one safe to iterate in time stepping.
enum class RegularityPath { ClosedForm, MaskedTraces };

struct AssemblyConfig {
  OperatorSymbol op = OperatorSymbol::laplacian();
  int k = -1;
  RegularityPath reg_path = RegularityPath::ClosedForm;
  std::vector<BcType> bc_type;  // per boundary node
  SystemContext context = SystemContext::TwoD;

  bool zero_mean() const { return op.kind == OperatorSymbol::Kind::Laplacian; }
};

enum class RowKind { Dirichlet, Neumann, Mean, Regularity };

struct ExtensionSystem {
  ExtensionBasis basis;
  Eigen::MatrixXd M;
  std::vector<RowKind> row_kind;  // per row
  std::vector<int> reg_level;     // derivative order of regularity rows, else -1
  bool has_mean_unknown = false;  // U column appended as the last column

  Eigen::Index cols() const { return M.cols(); }
  Eigen::Index rows() const { return M.rows(); }
};

// Row blocks, each with the U column appended when `cfg.zero_mean()`.
Eigen::MatrixXd assemble_boundary_rows(const ExtensionBasis& basis,
                                       const Grid& g, const GridMasks& masks,
                                       const BoundaryDiscretization& bd,
                                       const AssemblyConfig& cfg);
Eigen::RowVectorXd assemble_mean_row(const ExtensionBasis& basis, const Grid& g,
                                     const GridMasks& masks, bool mean_unknown);
Eigen::MatrixXd assemble_regularity_rows(const ExtensionBasis& basis,
                                         const Grid& g, const GridMasks& masks,
                                         const BoundaryDiscretization& bd,
                                         const AssemblyConfig& cfg);

ExtensionSystem assemble_extension_system(const Grid& g, const GridMasks& masks,
                                          const BoundaryDiscretization& bd,
                                          const AssemblyConfig& cfg);

// Analytic directional traces of the forcing: (l, node index) -> D_n^l f(s_i).
using TraceSource = std::function<double(int, int)>;

// Right-hand side for a given forcing (global grid samples, masked to Omega
// internally) and boundary data. `analytic` is required on the ClosedForm
// path when k >= 0.
Eigen::VectorXd assemble_rhs(const ExtensionSystem& sys, const Grid& g,
                             const GridMasks& masks,
                             const BoundaryDiscretization& bd,
                             const AssemblyConfig& cfg, const RealField& f,
                             const std::vector<double>& boundary_data,
                             const TraceSource* analytic = nullptr);

struct MinNormSolution {
  Eigen::VectorXd x;
  double residual = 0.0;
  Eigen::Index rank = 0;
  bool rank_deficient = false;  // residual exceeded the full-rank tolerance
};

inline constexpr double kRankEps = 1e-12;

MinNormSolution solve_min_norm(const Eigen::MatrixXd& M,
                               const Eigen::VectorXd& b);

// Same solve through a factorization computed once and reused across
// right-hand sides.
class MinNormSolver {
 public:
  explicit MinNormSolver(const Eigen::MatrixXd& M);
  MinNormSolution solve(const Eigen::VectorXd& b) const;
  Eigen::Index rank() const { return rank_; }

 private:
  Eigen::BDCSVD<Eigen::MatrixXd> svd_;
  Eigen::MatrixXd M_;
  Eigen::Index rank_ = 0;
};

// h(x) = sum of basis modes weighted by `coeffs`, evaluated on the grid by
// coefficient placement and one inverse transform.
RealField reconstruct_extension(const Grid& g, const ExtensionBasis& basis,
                                const Eigen::VectorXd& coeffs);

// f_e = chi_Omega f + chi_E h; Omega nodes keep f bitwise.
RealField composite_forcing(const GridMasks& masks, const RealField& f,
                            const RealField& h);

// Standalone 1D continuation: h matches the value and first k normal
// derivatives of f at {a, b}. `f_deriv(l, x)` evaluates f^(l).
struct Continuation {
  ExtensionBasis basis;
  Eigen::VectorXd coeffs;
  MinNormSolution diag;
};

Continuation extend_function(const std::function<double(int, double)>& f_deriv,
                             const Domain& interval, int k);

}  // namespace sfe
