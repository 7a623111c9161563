#include "sfe/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace sfe {

namespace {

constexpr double kBoundaryTol = 1e-12;

double dist(const Point& p, const Point& q) {
  return std::hypot(p[0] - q[0], p[1] - q[1]);
}

// Circle centers of the two arcs: the "upper" arc bounding Omega from above
// belongs to the circle centered below the eye midpoint and vice versa.
std::array<Point, 2> eye_circle_centers(const Eye& e) {
  const double off = e.R * std::cos(e.theta / 2.0);
  return {Point{e.center[0], e.center[1] - off},
          Point{e.center[0], e.center[1] + off}};
}

}  // namespace

Domain::Domain(DomainSpec spec) : spec_(std::move(spec)) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          if (!(0.0 < s.a && s.a < s.b && s.b < two_pi))
            throw std::invalid_argument("interval: need 0 < a < b < 2pi");
          d_ = 1;
          measure_ = s.b - s.a;
        } else if constexpr (std::is_same_v<T, DiscComplement>) {
          d_ = 2;
          measure_ = two_pi * two_pi - M_PI * s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Eye>) {
          d_ = 2;
          // Two circular segments of opening angle theta.
          measure_ = s.R * s.R * (s.theta - std::sin(s.theta));
        } else {
          d_ = 2;
          measure_ = s.side * s.side;
        }
      },
      spec_);
}

std::string Domain::name() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) return "interval";
        else if constexpr (std::is_same_v<T, DiscComplement>) return "disc_complement";
        else if constexpr (std::is_same_v<T, Eye>) return "eye";
        else return "diamond";
      },
      spec_);
}

PointClass Domain::classify(const Point& p) const {
  return std::visit(
      [&](const auto& s) -> PointClass {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          if (std::abs(p[0] - s.a) <= kBoundaryTol ||
              std::abs(p[0] - s.b) <= kBoundaryTol)
            return PointClass::Boundary;
          return (p[0] > s.a && p[0] < s.b) ? PointClass::Omega
                                            : PointClass::Extension;
        } else if constexpr (std::is_same_v<T, DiscComplement>) {
          const double r = dist(p, s.center);
          if (std::abs(r - s.radius) <= kBoundaryTol) return PointClass::Boundary;
          return r > s.radius ? PointClass::Omega : PointClass::Extension;
        } else if constexpr (std::is_same_v<T, Eye>) {
          const auto cc = eye_circle_centers(s);
          const double r0 = dist(p, cc[0]);
          const double r1 = dist(p, cc[1]);
          if (r0 > s.R + kBoundaryTol || r1 > s.R + kBoundaryTol)
            return PointClass::Extension;
          if (r0 >= s.R - kBoundaryTol || r1 >= s.R - kBoundaryTol)
            return PointClass::Boundary;
          return PointClass::Omega;
        } else {
          const double l1 =
              std::abs(p[0] - s.center[0]) + std::abs(p[1] - s.center[1]);
          const double half = s.side / std::sqrt(2.0);
          if (std::abs(l1 - half) <= kBoundaryTol) return PointClass::Boundary;
          return l1 < half ? PointClass::Omega : PointClass::Extension;
        }
      },
      spec_);
}

BoundaryDiscretization Domain::boundary_nodes(int N) const {
  if (N < 8) throw std::invalid_argument("boundary_nodes: N >= 8 required");
  BoundaryDiscretization bd;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          bd.nodes = {Point{s.a, 0.0}, Point{s.b, 0.0}};
          bd.normals = {Point{-1.0, 0.0}, Point{1.0, 0.0}};
          bd.arc_spacing = s.b - s.a;
        } else if constexpr (std::is_same_v<T, DiscComplement>) {
          const int nb = (N + 1) / 2;  // ceil(0.5 N)
          for (int i = 0; i < nb; ++i) {
            const double th = two_pi * i / nb;
            const Point dir{std::cos(th), std::sin(th)};
            bd.nodes.push_back(Point{s.center[0] + s.radius * dir[0],
                                     s.center[1] + s.radius * dir[1]});
            // Outward from Omega means into the disc.
            bd.normals.push_back(Point{-dir[0], -dir[1]});
          }
          bd.arc_spacing = two_pi * s.radius / nb;
        } else if constexpr (std::is_same_v<T, Eye>) {
          const int total = static_cast<int>(std::ceil(s.R * s.theta * N / two_pi));
          const int per_arc = (total + 1) / 2;
          const auto cc = eye_circle_centers(s);
          // Arc owned by the circle centered below bounds Omega from above.
          for (int arc = 0; arc < 2; ++arc) {
            const double ysign = arc == 0 ? 1.0 : -1.0;
            for (int i = 0; i < per_arc; ++i) {
              const double phi =
                  -s.theta / 2.0 + (i + 0.5) * s.theta / per_arc;
              const Point dir{std::sin(phi), ysign * std::cos(phi)};
              bd.nodes.push_back(Point{cc[arc][0] + s.R * dir[0],
                                       cc[arc][1] + s.R * dir[1]});
              bd.normals.push_back(dir);
            }
          }
          bd.arc_spacing = s.R * s.theta / per_arc;
        } else {
          // ceil(s N / 4pi) nodes per side, corners excluded.
          const int m = std::max(
              static_cast<int>(std::ceil(s.side * N / (2.0 * two_pi))), 1);
          const double half = s.side / std::sqrt(2.0);
          const Point corners[4] = {
              {s.center[0] + half, s.center[1]},
              {s.center[0], s.center[1] + half},
              {s.center[0] - half, s.center[1]},
              {s.center[0], s.center[1] - half}};
          const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
          const Point side_normals[4] = {{inv_sqrt2, inv_sqrt2},
                                         {-inv_sqrt2, inv_sqrt2},
                                         {-inv_sqrt2, -inv_sqrt2},
                                         {inv_sqrt2, -inv_sqrt2}};
          for (int side = 0; side < 4; ++side) {
            const Point& pa = corners[side];
            const Point& pb = corners[(side + 1) % 4];
            for (int i = 0; i < m; ++i) {
              const double t = (i + 0.5) / m;
              bd.nodes.push_back(Point{pa[0] + t * (pb[0] - pa[0]),
                                       pa[1] + t * (pb[1] - pa[1])});
              bd.normals.push_back(side_normals[side]);
            }
          }
          bd.arc_spacing = s.side / m;
        }
      },
      spec_);
  bd.n_b = static_cast<int>(bd.nodes.size());
  return bd;
}

GridMasks Domain::grid_masks(const Grid& g) const {
  if (g.d != d_)
    throw std::invalid_argument("grid_masks: grid dimension mismatch");
  GridMasks masks{g, std::vector<std::uint8_t>(g.size(), 0), 0};
  if (d_ == 1) {
    for (int i = 0; i < g.N; ++i) {
      const bool in = classify(Point{g.coord(i), 0.0}) != PointClass::Extension;
      masks.omega[g.index(i)] = in ? 1 : 0;
    }
  } else {
    for (int ix = 0; ix < g.N; ++ix) {
      for (int iy = 0; iy < g.N; ++iy) {
        const bool in =
            classify(Point{g.coord(ix), g.coord(iy)}) != PointClass::Extension;
        masks.omega[g.index(ix, iy)] = in ? 1 : 0;
      }
    }
  }
  for (std::uint8_t v : masks.omega) masks.omega_count += v;
  return masks;
}

Domain make_interval(double a, double b) { return Domain(Interval{a, b}); }

Domain make_disc_complement(Point center, double radius) {
  return Domain(DiscComplement{center, radius});
}

Domain make_eye(Point center, double R, double theta) {
  return Domain(Eye{center, R, theta});
}

Domain make_diamond(Point center, double side) {
  return Domain(Diamond{center, side});
}

}  // namespace sfe
