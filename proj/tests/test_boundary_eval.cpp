#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sfe/boundary_eval.hpp"

using namespace sfe;

namespace {
constexpr double kPi = two_pi / 2.0;

GridField smooth_field(const Grid& g) {
  RealField v(g.size());
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy)
      v[g.index(ix, iy)] =
          std::exp(std::sin(g.coord(ix))) * std::cos(g.coord(iy));
  return GridField::from_values(g, v);
}

Spectrum random_band_limited(const Grid& g, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RealField v(g.size());
  for (auto& x : v) x = dist(rng);
  Spectrum c = to_coefficients(g, v);
  // Damp high modes so node evaluation is well-conditioned.
  for (int mx = 0; mx < g.N; ++mx)
    for (int my = 0; my < (g.d == 2 ? g.N : 1); ++my) {
      const int jx = g.wavenumber(mx), jy = g.d == 2 ? g.wavenumber(my) : 0;
      if (jx * jx + jy * jy > band * band)
        c[g.d == 2 ? g.index(mx, my) : mx] = 0.0;
    }
  return c;
}
}  // namespace

TEST_CASE("factored and serial node evaluation agree") {
  Grid g(2, 64);
  Domain dom = make_disc_complement({2.0, 3.0}, 1.0);
  auto bd = dom.boundary_nodes(64);
  Spectrum c = random_band_limited(g, 20, 99);

  auto fast = eval_at_nodes(g, c, bd.nodes);
  auto slow = eval_at_nodes_serial(g, c, bd.nodes);
  REQUIRE(fast.size() == bd.nodes.size());
  for (std::size_t i = 0; i < fast.size(); ++i)
    CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
}

TEST_CASE("node evaluation reproduces a smooth analytic field") {
  Grid g(2, 64);
  auto f = to_coefficients(smooth_field(g));
  Domain dom = make_eye({3.0, 3.0}, 3.0, 3.0 * kPi / 4.0);
  auto bd = dom.boundary_nodes(64);

  auto vals = eval_at_nodes(g, f.coeffs, bd.nodes);
  for (int i = 0; i < bd.n_b; ++i) {
    const double want =
        std::exp(std::sin(bd.nodes[i][0])) * std::cos(bd.nodes[i][1]);
    CHECK(std::abs(vals[i] - want) < 1e-10);
  }
}

TEST_CASE("normal derivative traces match directional finite differences") {
  Grid g(2, 64);
  auto f = to_coefficients(smooth_field(g));
  Domain dom = make_disc_complement({2.0, 3.0}, 1.0);
  auto bd = dom.boundary_nodes(32);

  auto tb = normal_derivative_traces(f, bd, 2);
  REQUIRE(tb.k == 2);
  REQUIRE(tb.n_b == bd.n_b);
  REQUIRE(tb.data.size() == static_cast<std::size_t>(3 * bd.n_b));

  // Evaluate the same spectral field at points offset along each normal and
  // form 4th-order centered differences as the independent route.
  const double h = 1e-3;
  std::vector<Point> offset[5];
  for (int t = -2; t <= 2; ++t)
    for (int i = 0; i < bd.n_b; ++i)
      offset[t + 2].push_back(Point{bd.nodes[i][0] + t * h * bd.normals[i][0],
                                    bd.nodes[i][1] + t * h * bd.normals[i][1]});
  std::vector<double> ring[5];
  for (int t = 0; t < 5; ++t) ring[t] = eval_at_nodes(g, f.coeffs, offset[t]);

  for (int i = 0; i < bd.n_b; ++i) {
    CHECK(std::abs(tb.at(0, i) - ring[2][i]) < 1e-11);
    const double d1 =
        (-ring[4][i] + 8 * ring[3][i] - 8 * ring[1][i] + ring[0][i]) / (12 * h);
    CHECK(std::abs(tb.at(1, i) - d1) < 1e-6);
    const double d2 = (-ring[4][i] + 16 * ring[3][i] - 30 * ring[2][i] +
                       16 * ring[1][i] - ring[0][i]) /
                      (12 * h * h);
    CHECK(std::abs(tb.at(2, i) - d2) < 1e-4);
  }
}

TEST_CASE("closed-form mode traces agree with spectral traces of cos and sin") {
  Grid g(2, 32);
  Domain dom = make_diamond({3.0, 3.5}, 3.0);
  auto bd = dom.boundary_nodes(32);
  const std::array<int, 2> j{3, -2};

  auto closed = mode_trace_closed_form(j, 2, bd, 2);
  REQUIRE(closed.size() == static_cast<std::size_t>(3 * bd.n_b));

  // cos(j.x) and sin(j.x) are the real and imaginary parts of the mode, so
  // their numeric traces must match the corresponding parts of the closed
  // form.
  RealField vc(g.size()), vs(g.size());
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy) {
      const double phase = j[0] * g.coord(ix) + j[1] * g.coord(iy);
      vc[g.index(ix, iy)] = std::cos(phase);
      vs[g.index(ix, iy)] = std::sin(phase);
    }
  auto tc = normal_derivative_traces(
      to_coefficients(GridField::from_values(g, vc)), bd, 2);
  auto ts = normal_derivative_traces(
      to_coefficients(GridField::from_values(g, vs)), bd, 2);

  for (int l = 0; l <= 2; ++l)
    for (int i = 0; i < bd.n_b; ++i) {
      const Complex z = closed[l * bd.n_b + i];
      CHECK(std::abs(tc.at(l, i) - z.real()) < 1e-10);
      CHECK(std::abs(ts.at(l, i) - z.imag()) < 1e-10);
    }
}

TEST_CASE("closed-form values on the nodes themselves") {
  Domain dom = make_disc_complement({2.0, 3.0}, 1.0);
  auto bd = dom.boundary_nodes(16);
  const std::array<int, 2> j{1, 2};
  auto closed = mode_trace_closed_form(j, 2, bd, 1);
  for (int i = 0; i < bd.n_b; ++i) {
    const double phase = j[0] * bd.nodes[i][0] + j[1] * bd.nodes[i][1];
    const Complex want = std::exp(Complex(0.0, phase));
    CHECK(std::abs(closed[i] - want) < 1e-14);
    const Complex jn(0.0, j[0] * bd.normals[i][0] + j[1] * bd.normals[i][1]);
    CHECK(std::abs(closed[bd.n_b + i] - jn * want) < 1e-14);
  }
}

TEST_CASE("1D interval traces and validation") {
  Grid g(1, 128);
  RealField v(g.size());
  for (int i = 0; i < g.N; ++i) v[i] = std::exp(std::sin(g.coord(i)));
  auto f = to_coefficients(GridField::from_values(g, v));
  Domain dom = make_interval(2.0, 5.0);
  auto bd = dom.boundary_nodes(128);

  auto tb = normal_derivative_traces(f, bd, 1);
  // u = e^{sin x}: u' = cos(x) e^{sin x}; D_n at a is -u'(a), at b is +u'(b).
  const double ua = std::exp(std::sin(2.0)), ub = std::exp(std::sin(5.0));
  CHECK(tb.at(0, 0) == doctest::Approx(ua).epsilon(1e-11));
  CHECK(tb.at(0, 1) == doctest::Approx(ub).epsilon(1e-11));
  CHECK(tb.at(1, 0) == doctest::Approx(-std::cos(2.0) * ua).epsilon(1e-10));
  CHECK(tb.at(1, 1) == doctest::Approx(std::cos(5.0) * ub).epsilon(1e-10));

  CHECK_THROWS_AS(normal_derivative_traces(f, bd, -1), std::invalid_argument);
}
