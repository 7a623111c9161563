#pragma once

// Evaluation of spectral fields and their normal derivatives at arbitrary
// boundary nodes by type-2 non-uniform DFT (exact direct summation), plus
// closed-form traces of single Fourier modes.

#include <vector>

#include "sfe/geometry.hpp"
#include "sfe/spectral_core.hpp"

namespace sfe {

// Traces of one field: rows ordered f(s), D_n f(s), ..., D_n^k f(s), each
// block of length n_b.
struct TraceBlock {
  int k = 0;
  int n_b = 0;
  std::vector<double> data;  // (k+1) * n_b entries

  double at(int l, int node) const { return data[l * n_b + node]; }
};

// S* interpolation: sum_j c_j exp(i j.s_i) at each node. Direct summation
// with per-node axis-factored phase vectors; nodes run in parallel.
std::vector<double> eval_at_nodes(const Grid& g, const Spectrum& coeffs,
                                  const std::vector<Point>& nodes);

// Unfactored reference implementation (one exponential per coefficient per
// node); kept serial as the comparison baseline.
std::vector<double> eval_at_nodes_serial(const Grid& g, const Spectrum& coeffs,
                                         const std::vector<Point>& nodes);

// D_n^l f(s_i) for l = 0..k via the binomial expansion of (n . grad)^l:
// grid partial derivatives by symbol application, node evaluation by S*,
// combination with per-node normal components.
TraceBlock normal_derivative_traces(const GridField& f,
                                    const BoundaryDiscretization& bd, int k);

// Exact traces of the single mode phi_j = exp(i j.x):
// D_n^l phi_j(s) = (i j.n)^l exp(i j.s). Column ordered like TraceBlock.
std::vector<Complex> mode_trace_closed_form(std::array<int, 2> j, int d,
                                            const BoundaryDiscretization& bd,
                                            int k);

}  // namespace sfe
