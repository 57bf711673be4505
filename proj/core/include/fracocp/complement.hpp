#pragma once

#include <array>
#include <vector>

#include "fracocp/kernel.hpp"
#include "fracocp/mesh.hpp"
#include "fracocp/shell.hpp"

namespace fracocp {

// rho(x) = integral over the complement of a polygon of |x - w|^{-2-2s},
// evaluated edge by edge from the divergence identity.
class ComplementDensity {
 public:
  ComplementDensity() = default;
  ComplementDensity(std::vector<Segment> boundary, double s);
  static ComplementDensity from_mesh(const Mesh& mesh, double s);

  double operator()(const Vec2& x) const;
  double boundary_distance(const Vec2& x) const;
  double s() const { return s_; }
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  struct FarPoint {
    Vec2 y;
    Vec2 n;  // Gauss weight * length * unit normal
  };
  struct SegmentData {
    Vec2 mid;
    double len2;
    std::array<int, 3> offset;  // into far_ for 2, 3 and 4 points
  };

  std::vector<Segment> segments_;
  std::vector<SegmentData> data_;
  std::vector<FarPoint> far_;
  double s_ = 0.5;
};

// (1/(2s)) * int_0^{2pi} r_b(x, phi)^{-2s} dphi, r_b the ray distance to the
// circle of radius R, by the periodic trapezoid rule.
double shell_tail(const Vec2& x, double R, double s, int angular_points = 32);

// Shell quadrature + tail beyond B(0, R) + correction for the gap between the
// outer shell polygon and the circle.
double complement_density(const Vec2& x, const Mesh& mesh, const AuxiliaryShell& shell, const KernelParams& params,
                          int angular_points = 32);

}  // namespace fracocp
