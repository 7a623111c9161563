#include "sfe/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sfe/boundary_eval.hpp"

namespace sfe {

namespace {

double omega_inner(const Grid& g, const GridMasks& masks, const RealField& a,
                   const RealField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (masks.in_omega(i)) s += a[i] * b[i];
  return s * std::pow(g.dx(), g.d);
}

double omega_norm(const Grid& g, const GridMasks& masks, const RealField& a) {
  return std::sqrt(omega_inner(g, masks, a, a));
}

double quadratic_form(const Grid& g, const GridMasks& masks,
                      const RealField& u) {
  Spectrum c = to_coefficients(g, u);
  apply_symbol_inplace(g, c, OperatorSymbol::laplacian());
  for (Complex& v : c) v = -v;
  const RealField neg_lap = to_values(g, c);
  return omega_inner(g, masks, u, neg_lap);
}

}  // namespace

std::optional<ShiftRejection> validate_shift(double sigma, int d, int N) {
  const double bound = static_cast<double>(N) * N * d / 4.0;
  const long n = std::lround(sigma);
  if (n < 0 || std::abs(sigma - n) > 1e-8 || static_cast<double>(n) > bound)
    return std::nullopt;
  if (d == 1) {
    const long m = std::lround(std::sqrt(static_cast<double>(n)));
    if (m * m == n) return ShiftRejection{static_cast<double>(n)};
    return std::nullopt;
  }
  for (long m1 = 0; m1 * m1 <= n; ++m1) {
    const long rem = n - m1 * m1;
    const long m2 = std::lround(std::sqrt(static_cast<double>(rem)));
    if (m2 * m2 == rem) return ShiftRejection{static_cast<double>(n)};
  }
  return std::nullopt;
}

EigResult inverse_power(const EigConfig& cfg, const Domain& domain) {
  if (cfg.tau <= 0.0) throw std::invalid_argument("inverse_power: tau > 0");
  if (const auto rej = validate_shift(cfg.sigma, domain.dim(), cfg.N))
    throw std::invalid_argument("inverse_power: shift collides with symbol zero " +
                                std::to_string(rej->offending_value));

  AssemblyConfig acfg;
  acfg.op = OperatorSymbol::shifted_laplacian(cfg.sigma);
  acfg.k = cfg.k;
  acfg.reg_path = RegularityPath::MaskedTraces;
  acfg.context = domain.dim() == 1 ? SystemContext::Poisson1D : SystemContext::TwoD;
  EllipticMachinery mach(domain, cfg.N, std::move(acfg));
  const Grid& g = mach.grid();
  const GridMasks& masks = mach.masks();
  const std::vector<double> zero_bc(mach.boundary().n_b, 0.0);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  RealField u(g.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (masks.in_omega(i)) u[i] = unif(rng);
  const double n0 = omega_norm(g, masks, u);
  for (double& v : u) v /= n0;

  EigResult res;
  res.sigma = cfg.sigma;
  double lambda_prev = quadratic_form(g, masks, u);

  for (int it = 0; it < cfg.max_iters; ++it) {
    Solution sol = mach.solve(u, zero_bc);
    RealField v = std::move(sol.u_e.values);
    const double vn = omega_norm(g, masks, v);
    for (double& x : v) x /= vn;
    if (omega_inner(g, masks, v, u) < 0.0)
      for (double& x : v) x = -x;

    const double lambda = quadratic_form(g, masks, v);
    RealField diff(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) diff[i] = v[i] - u[i];
    const double dev =
        std::max(std::abs(lambda - lambda_prev), omega_norm(g, masks, diff));
    res.deviations.push_back(dev);
    u = std::move(v);
    lambda_prev = lambda;
    res.iterations = it + 1;
    if (dev <= cfg.tau) {
      res.converged = true;
      break;
    }
  }

  res.lambda = lambda_prev;
  res.u = std::move(u);
  const Spectrum c = to_coefficients(g, res.u);
  const auto bvals = eval_at_nodes(g, c, mach.boundary().nodes);
  for (double bv : bvals)
    res.boundary_max = std::max(res.boundary_max, std::abs(bv));
  return res;
}

double eigen_residual(const Grid& g, const GridMasks& masks,
                      const RealField& u, double lambda) {
  Spectrum c = to_coefficients(g, u);
  apply_symbol_inplace(g, c, OperatorSymbol::laplacian());
  const RealField lap = to_values(g, c);
  RealField r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = -lap[i] - lambda * u[i];
  return omega_norm(g, masks, r);
}

std::vector<EigResult> merge_eigs(std::vector<EigResult> results) {
  std::sort(results.begin(), results.end(),
            [](const EigResult& a, const EigResult& b) {
              return a.lambda < b.lambda;
            });
  std::vector<EigResult> merged;
  for (EigResult& r : results) {
    if (!merged.empty() &&
        std::abs(r.lambda - merged.back().lambda) <=
            1e-6 * std::max(1.0, merged.back().lambda)) {
      // Keep the better-converged representative of the pair.
      const double prev_dev = merged.back().deviations.empty()
                                  ? 0.0
                                  : merged.back().deviations.back();
      const double cur_dev = r.deviations.empty() ? 0.0 : r.deviations.back();
      if (!merged.back().converged && (r.converged || cur_dev < prev_dev))
        merged.back() = std::move(r);
      continue;
    }
    merged.push_back(std::move(r));
  }
  return merged;
}

std::vector<EigResult> scan_spectrum(const std::vector<double>& shifts,
                                     EigConfig cfg, const Domain& domain) {
  // Validate up front so failures surface on the calling thread.
  if (cfg.tau <= 0.0) throw std::invalid_argument("scan_spectrum: tau > 0");
  for (double s : shifts)
    if (const auto rej = validate_shift(s, domain.dim(), cfg.N))
      throw std::invalid_argument("scan_spectrum: shift collides with symbol zero " +
                                  std::to_string(rej->offending_value));

  std::vector<EigResult> all(shifts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    EigConfig local = cfg;
    local.sigma = shifts[i];
    all[i] = inverse_power(local, domain);
  }
  return merge_eigs(std::move(all));
}

}  // namespace sfe
