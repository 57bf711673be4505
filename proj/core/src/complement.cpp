#include "fracocp/complement.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fracocp {

ComplementDensity::ComplementDensity(std::vector<Segment> boundary, double s) : segments_(std::move(boundary)), s_(s) {
  for (const auto& seg : segments_) {
    Vec2 d = seg.b - seg.a;
    double len = d.norm();
    Vec2 n = Vec2(d.y(), -d.x()) / len;
    SegmentData sd{0.5 * (seg.a + seg.b), len * len, {}};
    for (int k = 0; k < 3; ++k) {
      sd.offset[k] = static_cast<int>(far_.size());
      const GaussRule& g = gauss_legendre(k + 2);
      for (std::size_t i = 0; i < g.x.size(); ++i) far_.push_back({seg.a + g.x[i] * d, g.w[i] * len * n});
    }
    data_.push_back(sd);
  }
}

ComplementDensity ComplementDensity::from_mesh(const Mesh& mesh, double s) {
  return ComplementDensity(boundary_segments(mesh, true), s);
}

double ComplementDensity::operator()(const Vec2& x) const {
  const KernelFunction k(s_);
  double sum = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const SegmentData& sd = data_[i];
    double ratio2 = (sd.mid - x).squaredNorm() / sd.len2;
    int n = ratio2 > 1600.0 ? 2 : ratio2 > 225.0 ? 3 : ratio2 > 36.0 ? 4 : 0;
    if (n == 0) {
      sum += edge_flux(x, segments_[i].a, segments_[i].b, s_);
      continue;
    }
    const FarPoint* fp = far_.data() + sd.offset[n - 2];
    for (int j = 0; j < n; ++j) {
      Vec2 r = fp[j].y - x;
      sum += r.dot(fp[j].n) * k(r.squaredNorm());
    }
  }
  return sum / (2.0 * s_);
}

double ComplementDensity::boundary_distance(const Vec2& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& seg : segments_) d = std::min(d, point_segment_distance(x, seg.a, seg.b));
  return d;
}

namespace {

double ray_to_circle(const Vec2& x, const Vec2& e, double R) {
  double b = x.dot(e);
  return -b + std::sqrt(b * b + R * R - x.squaredNorm());
}

double rule_on_triangle(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c, double s) {
  const TriangleRule& q = triangle_rule(6);
  double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += q.w[i] * kernel_r2((bary_point(a, b, c, q.bary[i]) - x).squaredNorm(), s);
  return sum * area;
}

double adaptive_kernel(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c, double s, double coarse, int depth) {
  Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  double q[4] = {rule_on_triangle(x, a, ab, ca, s), rule_on_triangle(x, ab, b, bc, s), rule_on_triangle(x, ca, bc, c, s),
                 rule_on_triangle(x, ab, bc, ca, s)};
  double fine = q[0] + q[1] + q[2] + q[3];
  if (depth >= 14 || std::abs(fine - coarse) <= 1e-10 * std::abs(fine)) return fine;
  return adaptive_kernel(x, a, ab, ca, s, q[0], depth + 1) + adaptive_kernel(x, ab, b, bc, s, q[1], depth + 1) +
         adaptive_kernel(x, ca, bc, c, s, q[2], depth + 1) + adaptive_kernel(x, ab, bc, ca, s, q[3], depth + 1);
}

}  // namespace

double shell_tail(const Vec2& x, double R, double s, int angular_points) {
  if (angular_points < 2) throw std::invalid_argument("shell_tail: need at least two angular points");
  double sum = 0.0;
  for (int k = 0; k < angular_points; ++k) {
    double phi = 2.0 * std::numbers::pi * k / angular_points;
    sum += std::pow(ray_to_circle(x, Vec2(std::cos(phi), std::sin(phi)), R), -2.0 * s);
  }
  return sum * (2.0 * std::numbers::pi / angular_points) / (2.0 * s);
}

double complement_density(const Vec2& x, const Mesh& mesh, const AuxiliaryShell& shell, const KernelParams& params,
                          int angular_points) {
  const double s = params.s;
  if (locate(mesh, x) < 0) throw std::domain_error("complement_density: point outside the domain");
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& be : mesh.boundary_edges)
    dist = std::min(dist, point_segment_distance(x, mesh.vertices[be[0]], mesh.vertices[be[1]]));
  if (dist < 1e-14) throw std::domain_error("complement_density: point on the boundary");

  double sum = 0.0;
  for (const auto& t : shell.triangles) {
    const Vec2 &a = shell.vertices[t[0]], &b = shell.vertices[t[1]], &c = shell.vertices[t[2]];
    sum += adaptive_kernel(x, a, b, c, s, rule_on_triangle(x, a, b, c, s), 0);
  }
  sum += shell_tail(x, shell.R, s, angular_points);

  const GaussRule& g = gauss_legendre(24);
  for (const auto& oe : shell.outer_edges) {
    const Vec2 &q1 = shell.vertices[oe[0]], &q2 = shell.vertices[oe[1]];
    Vec2 d = (q2 - q1).normalized();
    Vec2 n(d.y(), -d.x());
    double p = (q1 - x).dot(n);
    double t1 = std::atan2((q1 - x).y(), (q1 - x).x());
    double dt = std::remainder(std::atan2((q2 - x).y(), (q2 - x).x()) - t1, 2.0 * std::numbers::pi);
    double gap = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      double th = t1 + g.x[i] * dt;
      Vec2 e(std::cos(th), std::sin(th));
      double rc = p / e.dot(n);
      gap += g.w[i] * (std::pow(rc, -2.0 * s) - std::pow(ray_to_circle(x, e, shell.R), -2.0 * s));
    }
    sum += std::abs(gap * dt) / (2.0 * s);
  }
  return sum;
}

}  // namespace fracocp
