#pragma once

// Rate estimation for refinement studies: least-squares slope of log(error)
// against log(N) plus pairwise doubling ratios.

#include <vector>

namespace sfe {

struct RatePoint {
  int N = 0;
  double error = 0.0;
};

struct RateFit {
  double slope = 0.0;            // NaN when saturated
  std::vector<double> pairwise;  // log2(e_N / e_{2N}) for consecutive doublings
  int points_used = 0;
  bool saturated = false;        // fewer than 3 points above the error floor
};

// Points with error <= 1e-12 (10x the 1e-13 floor) are dropped before the
// fit. Requires >= 3 input points; with fewer than 3 surviving the fit is
// reported saturated.
RateFit estimate_rate(std::vector<RatePoint> points);

}  // namespace sfe
