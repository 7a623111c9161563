// Benchmark: serial vs OpenMP boundary-trace evaluation (the per-node
// non-uniform DFT node loop) and one full constraint-system assembly.
//
// Usage: bench_traces [N] [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <omp.h>
#include <random>

#include "sfe/boundary_eval.hpp"
#include "sfe/extension.hpp"
#include "sfe/geometry.hpp"

using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
  const int N = argc > 1 ? std::atoi(argv[1]) : 128;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 20;
  if (N < 8 || (N & (N - 1)) != 0 || reps < 1) {
    std::fprintf(stderr, "usage: bench_traces [N power of two >= 8] [reps >= 1]\n");
    return 1;
  }

  const sfe::Domain dom = sfe::make_disc_complement({2.0, 3.0}, 1.0);
  const sfe::Grid g{2, N};
  const sfe::BoundaryDiscretization bd = dom.boundary_nodes(N);

  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  sfe::RealField field(g.size());
  for (double& v : field) v = unif(rng);
  const sfe::Spectrum coeffs = sfe::to_coefficients(g, field);

  // Warm both paths once and check agreement.
  const std::vector<double> ref = sfe::eval_at_nodes_serial(g, coeffs, bd.nodes);
  const std::vector<double> par = sfe::eval_at_nodes(g, coeffs, bd.nodes);
  double diff = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    diff = std::max(diff, std::abs(ref[i] - par[i]));

  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r)
    (void)sfe::eval_at_nodes_serial(g, coeffs, bd.nodes);
  const double t_serial = ms_since(t0) / reps;

  t0 = Clock::now();
  for (int r = 0; r < reps; ++r) (void)sfe::eval_at_nodes(g, coeffs, bd.nodes);
  const double t_parallel = ms_since(t0) / reps;

  const double mode_evals = static_cast<double>(bd.n_b) * g.size();
  std::printf("traces: N=%d n_b=%d threads=%d\n", N, bd.n_b, omp_get_max_threads());
  std::printf("  serial   %9.3f ms  (%.1f Mmode-evals/s)\n", t_serial,
              mode_evals / t_serial / 1e3);
  std::printf("  parallel %9.3f ms  (%.1f Mmode-evals/s)  speedup %.2fx\n",
              t_parallel, mode_evals / t_parallel / 1e3, t_serial / t_parallel);
  std::printf("  max |serial - parallel| = %.3e\n", diff);

  sfe::AssemblyConfig cfg;
  cfg.op = sfe::OperatorSymbol::laplacian();
  cfg.k = 1;
  cfg.reg_path = sfe::RegularityPath::ClosedForm;
  cfg.bc_type.assign(bd.n_b, sfe::BcType::Dirichlet);
  cfg.context = sfe::SystemContext::TwoD;
  const sfe::GridMasks masks = dom.grid_masks(g);
  t0 = Clock::now();
  const sfe::ExtensionSystem sys =
      sfe::assemble_extension_system(g, masks, bd, cfg);
  const double t_asm = ms_since(t0);
  std::printf("assembly: k=1 rows=%ld cols=%ld  %9.3f ms\n",
              static_cast<long>(sys.rows()), static_cast<long>(sys.cols()),
              t_asm);
  return diff < 1e-11 ? 0 : 2;
}
