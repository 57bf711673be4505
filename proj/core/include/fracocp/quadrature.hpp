#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace fracocp {

using Vec2 = Eigen::Vector2d;

// Gauss-Legendre rule on [0,1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Symmetric triangle rule in barycentric coordinates, weights sum to one.
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;
  std::size_t size() const { return w.size(); }
};

const GaussRule& gauss_legendre(int n);

// Exact for polynomials of total degree <= `degree` (1 <= degree <= 30).
const TriangleRule& triangle_rule(int degree);

inline Vec2 bary_point(const Vec2& a, const Vec2& b, const Vec2& c, const std::array<double, 3>& l) {
  return l[0] * a + l[1] * b + l[2] * c;
}

}  // namespace fracocp
