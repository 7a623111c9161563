#include "sfe/extension.hpp"

#include <cmath>
#include <stdexcept>

namespace sfe {

namespace {

void invert_operator_inplace(const Grid& g, Spectrum& c,
                             const OperatorSymbol& op) {
  switch (op.kind) {
    case OperatorSymbol::Kind::Laplacian:
      invert_zero_mean_laplacian_inplace(g, c);
      return;
    case OperatorSymbol::Kind::Helmholtz:
      invert_helmholtz_inplace(g, c, op.alpha);
      return;
    case OperatorSymbol::Kind::ShiftedLaplacian:
      invert_shifted_laplacian_inplace(g, c, op.sigma);
      return;
    case OperatorSymbol::Kind::Derivative:
      throw std::invalid_argument(
          "assemble: derivative operators are not invertible");
  }
}

RealField masked(const GridMasks& masks, const RealField& f, bool keep_omega) {
  RealField out(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (masks.in_omega(i) == keep_omega) out[i] = f[i];
  return out;
}

int mode_columns(const ExtensionBasis& basis) {
  return static_cast<int>(basis.modes.size());
}

}  // namespace

int choose_num_modes(int n_b, int k, int d, SystemContext ctx, bool mean_row) {
  if (n_b < 2 || k < -1)
    throw std::invalid_argument("choose_num_modes: need n_b >= 2, k >= -1");
  switch (ctx) {
    case SystemContext::Continuation1D:
      return k + 1;
    case SystemContext::Poisson1D:
      return k + 2;
    case SystemContext::TwoD: {
      const double target = n_b * (k + 2);
      int J = static_cast<int>(std::ceil(std::sqrt(target) / 2.0 - 1.0));
      J = std::max(J, 1);
      const double rows = target + (mean_row ? 1 : 0);
      auto dof = [d](int jj) {
        double v = 1;
        for (int a = 0; a < d; ++a) v *= 2 * jj + 1;
        return v;
      };
      while (dof(J) < rows) ++J;
      return J;
    }
  }
  throw std::logic_error("choose_num_modes: unknown context");
}

ExtensionBasis ExtensionBasis::build(int J, int d) {
  ExtensionBasis basis{J, d, {}};
  basis.modes.push_back(RealMode{{0, 0}, RealMode::Part::Cos});  // constant
  auto add = [&](int jx, int jy) {
    basis.modes.push_back(RealMode{{jx, jy}, RealMode::Part::Cos});
    basis.modes.push_back(RealMode{{jx, jy}, RealMode::Part::Sin});
  };
  if (d == 1) {
    for (int j = 1; j <= J; ++j) add(j, 0);
  } else {
    for (int jy = 1; jy <= J; ++jy) add(0, jy);
    for (int jx = 1; jx <= J; ++jx)
      for (int jy = -J; jy <= J; ++jy) add(jx, jy);
  }
  return basis;
}

RealField sample_real_mode(const Grid& g, const RealMode& m) {
  RealField out(g.size());
  if (g.d == 1) {
    for (int i = 0; i < g.N; ++i) {
      const double ph = m.j[0] * g.coord(i);
      out[i] = m.part == RealMode::Part::Cos ? std::cos(ph) : std::sin(ph);
    }
  } else {
    for (int ix = 0; ix < g.N; ++ix) {
      for (int iy = 0; iy < g.N; ++iy) {
        const double ph = m.j[0] * g.coord(ix) + m.j[1] * g.coord(iy);
        out[g.index(ix, iy)] =
            m.part == RealMode::Part::Cos ? std::cos(ph) : std::sin(ph);
      }
    }
  }
  return out;
}

std::vector<double> real_mode_trace(const RealMode& m, int d,
                                    const BoundaryDiscretization& bd, int l) {
  const auto col = mode_trace_closed_form(m.j, d, bd, l);
  std::vector<double> out(bd.n_b);
  for (int i = 0; i < bd.n_b; ++i) {
    const Complex v = col[l * bd.n_b + i];
    out[i] = m.part == RealMode::Part::Cos ? v.real() : v.imag();
  }
  return out;
}

Eigen::MatrixXd assemble_boundary_rows(const ExtensionBasis& basis,
                                       const Grid& g, const GridMasks& masks,
                                       const BoundaryDiscretization& bd,
                                       const AssemblyConfig& cfg) {
  if (static_cast<int>(cfg.bc_type.size()) != bd.n_b)
    throw std::invalid_argument("assemble_boundary_rows: bc size mismatch");
  const bool mean_unknown = cfg.zero_mean();
  const int ncols = mode_columns(basis) + (mean_unknown ? 1 : 0);
  Eigen::MatrixXd rows(bd.n_b, ncols);
  bool any_neumann = false;
  for (BcType t : cfg.bc_type) any_neumann |= (t == BcType::Neumann);
  const int trace_order = any_neumann ? 1 : 0;

  for (int c = 0; c < mode_columns(basis); ++c) {
    RealField vals = sample_real_mode(g, basis.modes[c]);
    RealField ext = masked(masks, vals, /*keep_omega=*/false);
    Spectrum sc = to_coefficients(g, ext);
    invert_operator_inplace(g, sc, cfg.op);
    const TraceBlock tb = normal_derivative_traces(
        GridField::from_coefficients(g, std::move(sc)), bd, trace_order);
    for (int i = 0; i < bd.n_b; ++i)
      rows(i, c) = cfg.bc_type[i] == BcType::Dirichlet ? tb.at(0, i) : tb.at(1, i);
  }
  if (mean_unknown) {
    // U appears in Dirichlet rows only; it vanishes under differentiation.
    for (int i = 0; i < bd.n_b; ++i)
      rows(i, ncols - 1) = cfg.bc_type[i] == BcType::Dirichlet ? 1.0 : 0.0;
  }
  return rows;
}

Eigen::RowVectorXd assemble_mean_row(const ExtensionBasis& basis, const Grid& g,
                                     const GridMasks& masks, bool mean_unknown) {
  const int ncols = mode_columns(basis) + (mean_unknown ? 1 : 0);
  Eigen::RowVectorXd row(ncols);
  const double w = std::pow(g.dx(), g.d);
  for (int c = 0; c < mode_columns(basis); ++c) {
    RealField vals = sample_real_mode(g, basis.modes[c]);
    double s = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (!masks.in_omega(i)) s += vals[i];
    row(c) = w * s;
  }
  if (mean_unknown) row(ncols - 1) = 0.0;
  return row;
}

Eigen::MatrixXd assemble_regularity_rows(const ExtensionBasis& basis,
                                         const Grid& g, const GridMasks& masks,
                                         const BoundaryDiscretization& bd,
                                         const AssemblyConfig& cfg) {
  if (cfg.k < 0) return Eigen::MatrixXd(0, mode_columns(basis) +
                                               (cfg.zero_mean() ? 1 : 0));
  const int ncols = mode_columns(basis) + (cfg.zero_mean() ? 1 : 0);
  const int nrows = (cfg.k + 1) * bd.n_b;
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(nrows, ncols);
  for (int c = 0; c < mode_columns(basis); ++c) {
    if (cfg.reg_path == RegularityPath::ClosedForm) {
      for (int l = 0; l <= cfg.k; ++l) {
        const auto tr = real_mode_trace(basis.modes[c], g.d, bd, l);
        for (int i = 0; i < bd.n_b; ++i) rows(l * bd.n_b + i, c) = tr[i];
      }
    } else {
      RealField vals = sample_real_mode(g, basis.modes[c]);
      RealField om = masked(masks, vals, /*keep_omega=*/true);
      const TraceBlock tb = normal_derivative_traces(
          GridField::from_values(g, std::move(om)), bd, cfg.k);
      for (int l = 0; l <= cfg.k; ++l)
        for (int i = 0; i < bd.n_b; ++i)
          rows(l * bd.n_b + i, c) = tb.at(l, i);
    }
  }
  return rows;
}

ExtensionSystem assemble_extension_system(const Grid& g, const GridMasks& masks,
                                          const BoundaryDiscretization& bd,
                                          const AssemblyConfig& cfg) {
  const bool mean = cfg.zero_mean();
  const int J = choose_num_modes(bd.n_b, cfg.k, g.d, cfg.context, mean);
  ExtensionSystem sys;
  sys.basis = ExtensionBasis::build(J, g.d);
  sys.has_mean_unknown = mean;

  const Eigen::MatrixXd brows = assemble_boundary_rows(sys.basis, g, masks, bd, cfg);
  const Eigen::MatrixXd rrows = assemble_regularity_rows(sys.basis, g, masks, bd, cfg);
  const int nrows = bd.n_b + (mean ? 1 : 0) + static_cast<int>(rrows.rows());
  if (nrows > brows.cols())
    throw std::logic_error("assemble_extension_system: not under-determined");

  sys.M.resize(nrows, brows.cols());
  sys.M.topRows(bd.n_b) = brows;
  int r = bd.n_b;
  for (int i = 0; i < bd.n_b; ++i)
    sys.row_kind.push_back(cfg.bc_type[i] == BcType::Dirichlet
                               ? RowKind::Dirichlet
                               : RowKind::Neumann);
  sys.reg_level.assign(bd.n_b, -1);
  if (mean) {
    sys.M.row(r) = assemble_mean_row(sys.basis, g, masks, true);
    sys.row_kind.push_back(RowKind::Mean);
    sys.reg_level.push_back(-1);
    ++r;
  }
  if (rrows.rows() > 0) {
    sys.M.bottomRows(rrows.rows()) = rrows;
    for (int l = 0; l <= cfg.k; ++l)
      for (int i = 0; i < bd.n_b; ++i) {
        sys.row_kind.push_back(RowKind::Regularity);
        sys.reg_level.push_back(l);
      }
  }
  return sys;
}

Eigen::VectorXd assemble_rhs(const ExtensionSystem& sys, const Grid& g,
                             const GridMasks& masks,
                             const BoundaryDiscretization& bd,
                             const AssemblyConfig& cfg, const RealField& f,
                             const std::vector<double>& boundary_data,
                             const TraceSource* analytic) {
  if (static_cast<int>(boundary_data.size()) != bd.n_b)
    throw std::invalid_argument("assemble_rhs: boundary data size mismatch");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.rows());

  RealField fo = masked(masks, f, /*keep_omega=*/true);
  const Spectrum cf_omega = to_coefficients(g, fo);

  bool any_neumann = false;
  for (BcType t : cfg.bc_type) any_neumann |= (t == BcType::Neumann);
  Spectrum inv = cf_omega;
  invert_operator_inplace(g, inv, cfg.op);
  const TraceBlock tb = normal_derivative_traces(
      GridField::from_coefficients(g, std::move(inv)), bd, any_neumann ? 1 : 0);
  for (int i = 0; i < bd.n_b; ++i) {
    const double trace =
        cfg.bc_type[i] == BcType::Dirichlet ? tb.at(0, i) : tb.at(1, i);
    b(i) = boundary_data[i] - trace;
  }
  int r = bd.n_b;
  if (sys.has_mean_unknown) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (masks.in_omega(i)) s += f[i];
    b(r) = -std::pow(g.dx(), g.d) * s;
    ++r;
  }
  if (cfg.k >= 0) {
    if (cfg.reg_path == RegularityPath::ClosedForm) {
      if (analytic == nullptr)
        throw std::invalid_argument(
            "assemble_rhs: closed-form regularity path needs analytic traces");
      for (int l = 0; l <= cfg.k; ++l)
        for (int i = 0; i < bd.n_b; ++i) b(r + l * bd.n_b + i) = (*analytic)(l, i);
    } else {
      const TraceBlock rt = normal_derivative_traces(
          GridField::from_coefficients(g, cf_omega), bd, cfg.k);
      for (int l = 0; l <= cfg.k; ++l)
        for (int i = 0; i < bd.n_b; ++i) b(r + l * bd.n_b + i) = rt.at(l, i);
    }
  }
  return b;
}

MinNormSolver::MinNormSolver(const Eigen::MatrixXd& M)
    : svd_(M, Eigen::ComputeThinU | Eigen::ComputeThinV), M_(M) {
  svd_.setThreshold(kRankEps);
  rank_ = svd_.rank();
}

MinNormSolution MinNormSolver::solve(const Eigen::VectorXd& b) const {
  MinNormSolution sol;
  sol.x = svd_.solve(b);
  sol.rank = rank_;
  sol.residual = (M_ * sol.x - b).norm();
  sol.rank_deficient = sol.residual > 1e-10 * (1.0 + b.norm());
  return sol;
}

MinNormSolution solve_min_norm(const Eigen::MatrixXd& M,
                               const Eigen::VectorXd& b) {
  return MinNormSolver(M).solve(b);
}

RealField reconstruct_extension(const Grid& g, const ExtensionBasis& basis,
                                const Eigen::VectorXd& coeffs) {
  if (coeffs.size() < static_cast<Eigen::Index>(basis.modes.size()))
    throw std::invalid_argument("reconstruct_extension: coefficient count");
  if (2 * basis.J >= g.N)
    throw std::invalid_argument("reconstruct_extension: grid too coarse");
  Spectrum c(g.size(), Complex{0.0, 0.0});
  auto slot = [&](int j) { return j >= 0 ? j : j + g.N; };
  for (std::size_t m = 0; m < basis.modes.size(); ++m) {
    const RealMode& mode = basis.modes[m];
    const double a = coeffs(static_cast<Eigen::Index>(m));
    if (mode.j[0] == 0 && mode.j[1] == 0) {
      if (mode.part == RealMode::Part::Cos) c[0] += a;
      continue;
    }
    const Complex half = mode.part == RealMode::Part::Cos
                             ? Complex{a / 2.0, 0.0}
                             : Complex{0.0, -a / 2.0};
    const std::size_t plus =
        g.d == 1 ? slot(mode.j[0])
                 : static_cast<std::size_t>(slot(mode.j[0])) * g.N + slot(mode.j[1]);
    const std::size_t minus =
        g.d == 1 ? slot(-mode.j[0])
                 : static_cast<std::size_t>(slot(-mode.j[0])) * g.N + slot(-mode.j[1]);
    c[plus] += half;
    c[minus] += std::conj(half);
  }
  return to_values(g, c);
}

RealField composite_forcing(const GridMasks& masks, const RealField& f,
                            const RealField& h) {
  RealField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    out[i] = masks.in_omega(i) ? f[i] : h[i];
  return out;
}

Continuation extend_function(const std::function<double(int, double)>& f_deriv,
                             const Domain& interval, int k) {
  if (interval.dim() != 1)
    throw std::invalid_argument("extend_function: 1D interval expected");
  if (k < 0) throw std::invalid_argument("extend_function: k >= 0 expected");
  const BoundaryDiscretization bd = interval.boundary_nodes(8);
  const int J = choose_num_modes(bd.n_b, k, 1, SystemContext::Continuation1D, false);
  ExtensionBasis basis = ExtensionBasis::build(J, 1);

  const int ncols = static_cast<int>(basis.modes.size());
  Eigen::MatrixXd M((k + 1) * bd.n_b, ncols);
  Eigen::VectorXd b((k + 1) * bd.n_b);
  for (int l = 0; l <= k; ++l) {
    for (int c = 0; c < ncols; ++c) {
      const auto tr = real_mode_trace(basis.modes[c], 1, bd, l);
      for (int i = 0; i < bd.n_b; ++i) M(l * bd.n_b + i, c) = tr[i];
    }
    for (int i = 0; i < bd.n_b; ++i) {
      const double n = bd.normals[i][0];
      b(l * bd.n_b + i) = std::pow(n, l) * f_deriv(l, bd.nodes[i][0]);
    }
  }
  Continuation cont{std::move(basis), {}, solve_min_norm(M, b)};
  cont.coeffs = cont.diag.x;
  return cont;
}

}  // namespace sfe
