#include "sfe/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sfe {

RateFit estimate_rate(std::vector<RatePoint> points) {
  if (points.size() < 3)
    throw std::invalid_argument("estimate_rate: need at least 3 points");
  std::sort(points.begin(), points.end(),
            [](const RatePoint& a, const RatePoint& b) { return a.N < b.N; });

  constexpr double kFloor = 1e-12;
  std::vector<RatePoint> kept;
  for (const RatePoint& p : points)
    if (p.error > kFloor) kept.push_back(p);

  RateFit fit;
  fit.points_used = static_cast<int>(kept.size());
  for (std::size_t i = 0; i + 1 < kept.size(); ++i)
    if (kept[i + 1].N == 2 * kept[i].N)
      fit.pairwise.push_back(std::log2(kept[i].error / kept[i + 1].error));

  if (kept.size() < 3) {
    fit.saturated = true;
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }

  double sx = 0.0, sy = 0.0;
  for (const RatePoint& p : kept) {
    sx += std::log(static_cast<double>(p.N));
    sy += std::log(p.error);
  }
  const double mx = sx / kept.size(), my = sy / kept.size();
  double num = 0.0, den = 0.0;
  for (const RatePoint& p : kept) {
    const double dx = std::log(static_cast<double>(p.N)) - mx;
    num += dx * (std::log(p.error) - my);
    den += dx * dx;
  }
  fit.slope = num / den;
  return fit;
}

}  // namespace sfe
