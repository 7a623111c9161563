#pragma once

// Catalog of physical domains embedded in C = [0, 2pi)^d: grid masks for
// Omega and the extension region E, boundary nodes with outward unit
// normals, and closed-form measures.

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sfe/spectral_core.hpp"

namespace sfe {

using Point = std::array<double, 2>;  // first d entries meaningful

struct Interval {
  double a, b;  // Omega = [a, b], 0 < a < b < 2pi
};

struct DiscComplement {
  Point center;
  double radius;  // Omega = box minus the closed disc
};

struct Eye {
  Point center;  // midpoint between the two corners
  double R;      // arc radius
  double theta;  // subtended angle of each arc
};

struct Diamond {
  Point center;
  double side;  // square of this side length, rotated 45 degrees
};

using DomainSpec = std::variant<Interval, DiscComplement, Eye, Diamond>;

enum class PointClass { Omega, Extension, Boundary };

// Nodes on the boundary of Omega with outward unit normals.
struct BoundaryDiscretization {
  std::vector<Point> nodes;
  std::vector<Point> normals;
  int n_b = 0;
  double arc_spacing = 0.0;  // spacing between successive nodes along the boundary
};

// Indicator of Omega on the grid; chi_E is the complement.
struct GridMasks {
  Grid grid;
  std::vector<std::uint8_t> omega;  // 1 where the node belongs to Omega
  std::size_t omega_count = 0;

  bool in_omega(std::size_t idx) const { return omega[idx] != 0; }
};

class Domain {
 public:
  explicit Domain(DomainSpec spec);

  const DomainSpec& spec() const { return spec_; }
  int dim() const { return d_; }
  double measure() const { return measure_; }
  std::string name() const;

  // Boundary-exact points classify as Boundary; grid_masks assigns them to
  // Omega.
  PointClass classify(const Point& p) const;

  BoundaryDiscretization boundary_nodes(int N) const;
  GridMasks grid_masks(const Grid& g) const;

 private:
  DomainSpec spec_;
  int d_;
  double measure_;
};

Domain make_interval(double a, double b);
Domain make_disc_complement(Point center, double radius);
Domain make_eye(Point center, double R, double theta);
Domain make_diamond(Point center, double side);

}  // namespace sfe
