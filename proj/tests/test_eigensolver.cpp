#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sfe/eigensolver.hpp"

using namespace sfe;

namespace {

Domain disc() { return make_disc_complement({2.0, 3.0}, 1.0); }

double omega_l2(const Grid& g, const GridMasks& masks, const RealField& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (masks.in_omega(i)) s += u[i] * u[i];
  return std::sqrt(s * std::pow(g.dx(), g.d));
}

}  // namespace

TEST_CASE("validate_shift: integer sums of two squares are rejected in 2D") {
  CHECK(validate_shift(5.0, 2, 64).has_value());  // 5 = 1 + 4
  CHECK(validate_shift(5.0, 2, 64)->offending_value == 5.0);
  CHECK(validate_shift(2.0, 2, 64).has_value());  // 2 = 1 + 1
  CHECK(validate_shift(0.0, 2, 64).has_value());  // 0 = 0 + 0
  CHECK(!validate_shift(0.3, 2, 64).has_value());
  CHECK(!validate_shift(3.0, 2, 64).has_value());  // 3 is not a two-square sum
  CHECK(!validate_shift(-4.0, 2, 64).has_value()); // negative shifts always pass
  CHECK(validate_shift(5.0 + 5e-9, 2, 64).has_value());  // within the guard band
  CHECK(!validate_shift(5.001, 2, 64).has_value());
}

TEST_CASE("validate_shift: perfect squares in 1D, resolution cutoff") {
  CHECK(validate_shift(4.0, 1, 64).has_value());
  CHECK(!validate_shift(2.0, 1, 64).has_value());  // 2 is not a square
  // Above the largest attainable symbol value N^2 d / 4 nothing collides.
  CHECK(validate_shift(34.0, 2, 16).has_value());   // 34 = 9 + 25, N^2 d/4 = 128
  CHECK(!validate_shift(34.0, 2, 8).has_value());   // cutoff 32 < 34
}

TEST_CASE("disc ground state matches the frozen run") {
  EigConfig cfg;
  cfg.sigma = 0.20;
  cfg.N = 64;
  auto res = inverse_power(cfg, disc());

  CHECK(res.converged);
  CHECK(res.iterations == 6);
  CHECK(res.lambda == doctest::Approx(2.193086447036e-01).epsilon(1e-6));
  CHECK(res.boundary_max < 1e-6);  // homogeneous Dirichlet trace
  CHECK(res.sigma == 0.20);
  REQUIRE(res.deviations.size() == static_cast<std::size_t>(res.iterations));
  CHECK(res.deviations.back() <= cfg.tau);

  Grid g(2, 64);
  auto masks = disc().grid_masks(g);
  CHECK(std::abs(omega_l2(g, masks, res.u) - 1.0) < 1e-10);
  CHECK(eigen_residual(g, masks, res.u, res.lambda) < 1e-5);
}

TEST_CASE("deviations contract geometrically under a de-tuned shift") {
  EigConfig cfg;
  cfg.sigma = 0.6;  // farther from the target eigenvalue: slow contraction
  cfg.N = 64;
  auto res = inverse_power(cfg, disc());
  CHECK(res.converged);
  CHECK(res.iterations > 50);
  REQUIRE(res.deviations.size() >= 12);
  const auto& d = res.deviations;
  for (std::size_t i = d.size() - 10; i < d.size(); ++i) {
    const double ratio = d[i] / d[i - 1];
    CHECK(ratio < 0.99);  // measured contraction factor about 0.823
    CHECK(ratio > 0.5);
  }
}

TEST_CASE("eigenvalue is insensitive to seed and shift") {
  EigConfig a;
  a.sigma = 0.20;
  a.N = 64;
  auto ra = inverse_power(a, disc());

  EigConfig b = a;
  b.seed = 777;
  auto rb = inverse_power(b, disc());
  CHECK(std::abs(ra.lambda - rb.lambda) < 1e-7);

  EigConfig c = a;
  c.sigma = 0.25;
  c.tau = 1e-10;
  EigConfig d = a;
  d.tau = 1e-10;
  auto rc = inverse_power(c, disc());
  auto rd = inverse_power(d, disc());
  CHECK(std::abs(rc.lambda - rd.lambda) < 1e-8);
}

TEST_CASE("colliding shifts and bad tolerances throw") {
  EigConfig cfg;
  cfg.N = 64;
  cfg.sigma = 1.0;  // 1 = 0 + 1 is a symbol zero on the 2D lattice
  CHECK_THROWS_AS(inverse_power(cfg, disc()), std::invalid_argument);

  cfg.sigma = 0.2;
  cfg.tau = 0.0;
  CHECK_THROWS_AS(inverse_power(cfg, disc()), std::invalid_argument);

  EigConfig scfg;
  scfg.N = 64;
  CHECK_THROWS_AS(scan_spectrum({0.3, 2.0}, scfg, disc()),
                  std::invalid_argument);
}

TEST_CASE("scan merges coincident shifts, keeps input order in rows") {
  EigConfig cfg;
  cfg.N = 64;
  auto results = scan_spectrum({0.20, 0.25}, cfg, disc());
  REQUIRE(results.size() == 1);  // both shifts find the same ground state
  CHECK(results[0].converged);
  CHECK(results[0].lambda == doctest::Approx(2.193086447036e-01).epsilon(1e-5));
}

TEST_CASE("merge_eigs keeps failures and prefers converged duplicates") {
  auto mk = [](double lambda, bool conv, double last_dev) {
    EigResult r;
    r.lambda = lambda;
    r.converged = conv;
    r.deviations = {last_dev};
    return r;
  };
  auto merged = merge_eigs({mk(5.0, false, 1.0), mk(1.0, true, 1e-9),
                            mk(1.0 + 1e-8, false, 1e-3)});
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].lambda == doctest::Approx(1.0));
  CHECK(merged[0].converged);  // converged twin outranks the failed one
  CHECK(merged[1].lambda == 5.0);
  CHECK(!merged[1].converged);
}

TEST_CASE("eigen_residual is spectrally small for an exact torus mode") {
  Grid g(2, 64);
  auto masks = disc().grid_masks(g);
  RealField u(g.size());
  for (int ix = 0; ix < g.N; ++ix)
    for (int iy = 0; iy < g.N; ++iy)
      u[g.index(ix, iy)] = std::sin(3 * g.coord(ix)) * std::sin(2 * g.coord(iy));
  CHECK(eigen_residual(g, masks, u, 13.0) < 1e-10);
  CHECK(eigen_residual(g, masks, u, 12.0) > 0.1);  // wrong eigenvalue
}
