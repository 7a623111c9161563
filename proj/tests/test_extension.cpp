#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sfe/elliptic_solver.hpp"
#include "sfe/extension.hpp"

using namespace sfe;

namespace {
constexpr double kPi = two_pi / 2.0;

double fderiv(int l, double x) {  // f = 1/(x-1) and its derivatives
  double fact = 1.0;
  for (int i = 2; i <= l; ++i) fact *= i;
  if (l % 2) fact = -fact;
  return fact / std::pow(x - 1.0, l + 1);
}

double eval_basis(const ExtensionBasis& basis, const Eigen::VectorXd& c,
                  double x) {
  double s = 0.0;
  for (std::size_t m = 0; m < basis.modes.size(); ++m) {
    const auto& mode = basis.modes[m];
    const double ph = mode.j[0] * x;
    s += c[m] * (mode.part == RealMode::Part::Cos ? std::cos(ph) : std::sin(ph));
  }
  return s;
}

double eval_basis_d1(const ExtensionBasis& basis, const Eigen::VectorXd& c,
                     double x) {
  double s = 0.0;
  for (std::size_t m = 0; m < basis.modes.size(); ++m) {
    const auto& mode = basis.modes[m];
    const int j = mode.j[0];
    const double ph = j * x;
    s += c[m] * j *
         (mode.part == RealMode::Part::Cos ? -std::sin(ph) : std::cos(ph));
  }
  return s;
}

// Minimum-norm solution by the normal equations x = M^T (M M^T)^{-1} b with
// a hand-rolled Cholesky factorization: the independent check on the SVD.
Eigen::VectorXd min_norm_normal_eq(const Eigen::MatrixXd& M,
                                   const Eigen::VectorXd& b) {
  const Eigen::MatrixXd A = M * M.transpose();
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = A(i, j);
      for (int p = 0; p < j; ++p) s -= L(i, p) * L(j, p);
      if (i == j) {
        REQUIRE(s > 0.0);
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
  Eigen::VectorXd y(n), z(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int p = 0; p < i; ++p) s -= L(i, p) * y[p];
    y[i] = s / L(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int p = i + 1; p < n; ++p) s -= L(p, i) * z[p];
    z[i] = s / L(i, i);
  }
  return M.transpose() * z;
}
}  // namespace

TEST_CASE("choose_num_modes per context") {
  CHECK(choose_num_modes(2, 0, 1, SystemContext::Continuation1D, false) == 1);
  CHECK(choose_num_modes(2, 3, 1, SystemContext::Continuation1D, false) == 4);

  CHECK(choose_num_modes(2, -1, 1, SystemContext::Poisson1D, false) == 1);
  CHECK(choose_num_modes(2, 2, 1, SystemContext::Poisson1D, false) == 4);

  // Rows = n_b (k+2) + mean; smallest J with (2J+1)^2 >= rows.
  CHECK(choose_num_modes(32, 0, 2, SystemContext::TwoD, true) == 4);   // 65 rows
  CHECK(choose_num_modes(64, 1, 2, SystemContext::TwoD, true) == 7);   // 193 rows
  CHECK(choose_num_modes(32, -1, 2, SystemContext::TwoD, false) == 3); // 32 rows

  CHECK_THROWS_AS(choose_num_modes(1, 0, 1, SystemContext::Poisson1D, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(choose_num_modes(2, -2, 1, SystemContext::Poisson1D, false),
                  std::invalid_argument);
}

TEST_CASE("basis layout: constant first, cos/sin pairs") {
  auto b1 = ExtensionBasis::build(2, 1);
  REQUIRE(b1.modes.size() == 5);
  CHECK(b1.modes[0].j == std::array<int, 2>{0, 0});
  CHECK(b1.modes[0].part == RealMode::Part::Cos);
  CHECK(b1.modes[1].j == std::array<int, 2>{1, 0});
  CHECK(b1.modes[1].part == RealMode::Part::Cos);
  CHECK(b1.modes[2].j == std::array<int, 2>{1, 0});
  CHECK(b1.modes[2].part == RealMode::Part::Sin);
  CHECK(b1.modes[3].j == std::array<int, 2>{2, 0});
  CHECK(b1.modes[4].part == RealMode::Part::Sin);

  auto b2 = ExtensionBasis::build(3, 2);
  CHECK(b2.modes.size() == 49);  // (2J+1)^2
  CHECK(b2.modes[0].j == std::array<int, 2>{0, 0});
  // Every non-constant wave vector appears exactly twice (cos and sin).
  int pairs = 0;
  for (std::size_t i = 1; i + 1 < b2.modes.size(); i += 2) {
    CHECK(b2.modes[i].j == b2.modes[i + 1].j);
    CHECK(b2.modes[i].part == RealMode::Part::Cos);
    CHECK(b2.modes[i + 1].part == RealMode::Part::Sin);
    ++pairs;
  }
  CHECK(pairs == 24);
}

TEST_CASE("sample_real_mode is pointwise exact") {
  Grid g(2, 16);
  RealMode m{{2, -1}, RealMode::Part::Sin};
  auto v = sample_real_mode(g, m);
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy)
      CHECK(v[g.index(ix, iy)] ==
            doctest::Approx(std::sin(2 * g.coord(ix) - g.coord(iy)))
                .epsilon(1e-14));
}

TEST_CASE("real mode traces are parts of the complex mode trace") {
  Domain dom = make_diamond({3.0, 3.5}, 3.0);
  auto bd = dom.boundary_nodes(32);
  const std::array<int, 2> j{2, 3};
  auto closed = mode_trace_closed_form(j, 2, bd, 2);
  for (int l = 0; l <= 2; ++l) {
    auto tc = real_mode_trace(RealMode{j, RealMode::Part::Cos}, 2, bd, l);
    auto ts = real_mode_trace(RealMode{j, RealMode::Part::Sin}, 2, bd, l);
    for (int i = 0; i < bd.n_b; ++i) {
      CHECK(tc[i] == doctest::Approx(closed[l * bd.n_b + i].real()).epsilon(1e-12));
      CHECK(ts[i] == doctest::Approx(closed[l * bd.n_b + i].imag()).epsilon(1e-12));
    }
  }
}

TEST_CASE("extend_function: constant data is matched exactly") {
  Domain dom = make_interval(2.0, 5.0);
  auto cont = extend_function([](int l, double) { return l == 0 ? 3.0 : 0.0; },
                              dom, 0);
  CHECK(cont.basis.J == 1);
  CHECK(cont.coeffs.size() == 3);
  CHECK(eval_basis(cont.basis, cont.coeffs, 2.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eval_basis(cont.basis, cont.coeffs, 5.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(cont.diag.residual < 1e-12);
  CHECK(!cont.diag.rank_deficient);
}

TEST_CASE("extend_function: frozen minimum-norm coefficients for 1/(x-1)") {
  Domain dom = make_interval(2.0, 5.0);

  auto c0 = extend_function(fderiv, dom, 0);
  REQUIRE(c0.coeffs.size() == 3);
  CHECK(c0.coeffs[0] == doctest::Approx(6.218882257334151e-01).epsilon(1e-8));
  CHECK(c0.coeffs[1] == doctest::Approx(-1.730693789618674e-01).epsilon(1e-8));
  CHECK(c0.coeffs[2] == doctest::Approx(3.366219794297347e-01).epsilon(1e-8));

  auto c1 = extend_function(fderiv, dom, 1);
  REQUIRE(c1.coeffs.size() == 5);
  const double want[5] = {2.745695561875373e-01, 1.949531997027925e-01,
                          5.127899665082938e-01, -4.529951152676076e-01,
                          -5.838199132850182e-02};
  for (int i = 0; i < 5; ++i)
    CHECK(c1.coeffs[i] == doctest::Approx(want[i]).epsilon(1e-8));

  // The continuation interpolates value and slope at both endpoints.
  for (double x : {2.0, 5.0}) {
    CHECK(eval_basis(c1.basis, c1.coeffs, x) ==
          doctest::Approx(fderiv(0, x)).epsilon(1e-10));
    CHECK(eval_basis_d1(c1.basis, c1.coeffs, x) ==
          doctest::Approx(fderiv(1, x)).epsilon(1e-10));
  }

  CHECK_THROWS_AS(extend_function(fderiv, dom, -1), std::invalid_argument);
  CHECK_THROWS_AS(
      extend_function(fderiv, make_diamond({3.0, 3.5}, 3.0), 0),
      std::invalid_argument);
}

TEST_CASE("solve_min_norm matches the normal-equations route") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 4 + trial % 7, n = m + 3 + trial % 5;
    Eigen::MatrixXd M(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b[i] = dist(rng);
      for (int j = 0; j < n; ++j) M(i, j) = dist(rng);
    }
    auto sol = solve_min_norm(M, b);
    CHECK(sol.rank == m);
    CHECK(!sol.rank_deficient);
    CHECK((M * sol.x - b).norm() < 1e-10 * (1.0 + b.norm()));

    const Eigen::VectorXd ref = min_norm_normal_eq(M, b);
    CHECK((sol.x - ref).norm() < 1e-8 * (1.0 + ref.norm()));
  }
}

TEST_CASE("solve_min_norm flags inconsistent systems") {
  Eigen::MatrixXd M(2, 3);
  M << 1.0, 2.0, 3.0, 1.0, 2.0, 3.0;  // duplicated row
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;  // inconsistent with the duplication
  auto sol = solve_min_norm(M, b);
  CHECK(sol.rank == 1);
  CHECK(sol.rank_deficient);
  CHECK(sol.residual > 0.1);
}

TEST_CASE("MinNormSolver reuses one factorization across right-hand sides") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd M(6, 11);
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) M(i, j) = dist(rng);
  MinNormSolver solver(M);
  CHECK(solver.rank() == 6);
  for (int t = 0; t < 3; ++t) {
    Eigen::VectorXd b(6);
    for (int i = 0; i < 6; ++i) b[i] = dist(rng);
    auto s1 = solver.solve(b);
    auto s2 = solve_min_norm(M, b);
    CHECK((s1.x - s2.x).norm() < 1e-11 * (1.0 + s2.x.norm()));
  }
}

TEST_CASE("assembled system shape and row bookkeeping") {
  Domain dom = make_diamond({3.0, 3.5}, 3.0);
  Grid g(2, 32);
  auto masks = dom.grid_masks(g);
  auto bd = dom.boundary_nodes(32);
  REQUIRE(bd.n_b == 32);

  AssemblyConfig cfg;
  cfg.op = OperatorSymbol::laplacian();
  cfg.k = 1;
  cfg.reg_path = RegularityPath::ClosedForm;
  cfg.bc_type.assign(bd.n_b, BcType::Dirichlet);
  cfg.context = SystemContext::TwoD;

  auto sys = assemble_extension_system(g, masks, bd, cfg);
  CHECK(sys.rows() == 97);   // 32 boundary + 1 mean + 64 regularity
  CHECK(sys.cols() == 122);  // (2*5+1)^2 modes + U
  CHECK(sys.basis.J == 5);
  CHECK(sys.has_mean_unknown);
  REQUIRE(sys.row_kind.size() == 97);
  for (int i = 0; i < 32; ++i) {
    CHECK(sys.row_kind[i] == RowKind::Dirichlet);
    CHECK(sys.reg_level[i] == -1);
  }
  CHECK(sys.row_kind[32] == RowKind::Mean);
  for (int l = 0; l <= 1; ++l)
    for (int i = 0; i < 32; ++i) {
      CHECK(sys.row_kind[33 + l * 32 + i] == RowKind::Regularity);
      CHECK(sys.reg_level[33 + l * 32 + i] == l);
    }

  // U column: 1 in Dirichlet rows, 0 in mean and regularity rows.
  for (int i = 0; i < 32; ++i) CHECK(sys.M(i, 121) == 1.0);
  for (int i = 32; i < 97; ++i) CHECK(sys.M(i, 121) == 0.0);
}

TEST_CASE("composite forcing keeps Omega samples bitwise") {
  Grid g(1, 64);
  Domain dom = make_interval(2.0, 5.0);
  auto masks = dom.grid_masks(g);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RealField f(g.size()), h(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = dist(rng);
    h[i] = dist(rng);
  }
  auto fe = composite_forcing(masks, f, h);
  for (std::size_t i = 0; i < fe.size(); ++i) {
    if (masks.in_omega(i))
      CHECK(fe[i] == f[i]);  // exact, no arithmetic applied
    else
      CHECK(fe[i] == h[i]);
  }
}

TEST_CASE("masked-trace and closed-form regularity paths agree") {
  // Same 1D Poisson problem through both regularity-row flavors; the two
  // solutions must agree to discretization accuracy.
  Domain dom = make_interval(2.0, 5.0);
  const double c1 = (-2.0 - 4.0 * std::log(4.0)) / 3.0;
  const double c2 = 1.0 - 2.0 * c1;
  const auto exact = [&](double x, double) {
    return (x - 1.0) * std::log(x - 1.0) + c1 * x + c2;
  };
  const int N = 256;

  auto solve_with = [&](RegularityPath path, int k) {
    AssemblyConfig cfg;
    cfg.op = OperatorSymbol::laplacian();
    cfg.k = k;
    cfg.reg_path = path;
    cfg.context = SystemContext::Poisson1D;
    EllipticMachinery mach(dom, N, cfg);
    RealField f(mach.grid().size(), 0.0);
    for (int i = 0; i < N; ++i)
      if (mach.masks().in_omega(i)) f[i] = fderiv(0, mach.grid().coord(i));
    TraceSource analytic = [&mach](int l, int node) {
      const double s = mach.boundary().nodes[node][0];
      const double n = mach.boundary().normals[node][0];
      return std::pow(n, l) * fderiv(l, s);
    };
    return mach.solve(f, {1.0, -1.0},
                      path == RegularityPath::ClosedForm ? &analytic : nullptr);
  };

  Grid g(1, N);
  auto masks = dom.grid_masks(g);
  for (int k : {0, 1}) {
    auto a = solve_with(RegularityPath::ClosedForm, k);
    auto b = solve_with(RegularityPath::MaskedTraces, k);
    double diff = 0.0;
    for (int i = 0; i < N; ++i)
      if (masks.in_omega(i))
        diff = std::max(diff, std::abs(a.u_e.values[i] - b.u_e.values[i]));
    CHECK(diff < 1e-5);  // measured 7.7e-07 (k=0), 6.3e-08 (k=1)
    CHECK(manufactured_error(g, masks, a.u_e.values, exact) < 2e-5);
    CHECK(manufactured_error(g, masks, b.u_e.values, exact) < 2e-5);
  }
}

TEST_CASE("reconstruct_extension inverts coefficient placement") {
  Grid g(1, 64);
  auto basis = ExtensionBasis::build(3, 1);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(7);
  c[0] = 0.5;   // constant
  c[3] = 1.25;  // cos(2x)
  c[6] = -2.0;  // sin(3x)
  auto h = reconstruct_extension(g, basis, c);
  for (int i = 0; i < g.N; ++i) {
    const double x = g.coord(i);
    CHECK(h[i] == doctest::Approx(0.5 + 1.25 * std::cos(2 * x) -
                                  2.0 * std::sin(3 * x))
                      .epsilon(1e-12));
  }

  Eigen::VectorXd bad = Eigen::VectorXd::Zero(6);
  CHECK_THROWS_AS(reconstruct_extension(g, basis, bad), std::invalid_argument);
  Grid tiny(1, 4);
  CHECK_THROWS_AS(reconstruct_extension(tiny, basis, c), std::invalid_argument);
}
