#pragma once

// Dirichlet eigenvalues of -Lap on Omega via shifted inverse power
// iteration; every iteration solves (-Lap - sigma) v = u with homogeneous
// boundary data through the extension machinery.

#include <cstdint>
#include <optional>

#include "sfe/elliptic_solver.hpp"

namespace sfe {

struct EigConfig {
  double sigma = 0.0;
  double tau = 1e-8;
  int max_iters = 400;
  int N = 128;
  int k = -1;
  std::uint64_t seed = 20240803;
};

struct EigResult {
  double lambda = 0.0;        // quadratic-form estimate <u, -Lap u>_Omega
  RealField u;                // normalized eigenfield on C
  int iterations = 0;
  bool converged = false;
  std::vector<double> deviations;  // d_n history
  double sigma = 0.0;
  double boundary_max = 0.0;  // max |u| at the boundary nodes after the run
};

// Rejects shifts within 1e-8 of an attainable symbol zero sum_l m_l^2.
struct ShiftRejection {
  double offending_value = 0.0;
};
std::optional<ShiftRejection> validate_shift(double sigma, int d, int N);

EigResult inverse_power(const EigConfig& cfg, const Domain& domain);

// ||(-Lap - lambda) u||_{L2(Omega)} with spectral derivatives.
double eigen_residual(const Grid& g, const GridMasks& masks,
                      const RealField& u, double lambda);

// Sorts ascending and merges numerically coincident eigenvalues
// (|a - b| <= 1e-6 max(1, a)), keeping the better-converged representative.
std::vector<EigResult> merge_eigs(std::vector<EigResult> results);

// Runs one iteration per shift, then merge_eigs. Per-shift failures are
// kept in the output with converged = false.
std::vector<EigResult> scan_spectrum(const std::vector<double>& shifts,
                                     EigConfig cfg, const Domain& domain);

}  // namespace sfe
