#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracocp/kernel.hpp"
#include "fracocp/quadrature.hpp"

namespace fracocp::oracle {

// Brute-force value of int_T int_T' Psi Psi^T |x - w|^{-2-2s} with
// Psi_n = phi^T_n(x) - phi^T'_n(w). Both triangles are split uniformly into
// 4^level pieces, sub-pairs sharing a corner are dropped, and the rest use a
// tensor degree-2 rule. idx/idxp map local vertices to the union numbering.
inline Eigen::MatrixXd subdivided_pair(const std::array<Vec2, 3>& t, const std::array<int, 3>& idx,
                                       const std::array<Vec2, 3>& tp, const std::array<int, 3>& idxp, int m,
                                       double s, int level) {
  struct Piece {
    std::array<Vec2, 3> p;
    std::array<std::array<double, 3>, 3> L;
  };
  auto pieces = [&](const std::array<Vec2, 3>& tri) {
    std::vector<Piece> cur = {{tri, {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}}};
    for (int l = 0; l < level; ++l) {
      std::vector<Piece> nxt;
      for (const auto& c : cur) {
        auto mid = [&](int i, int j) {
          std::array<double, 3> q;
          for (int k = 0; k < 3; ++k) q[k] = 0.5 * (c.L[i][k] + c.L[j][k]);
          return std::make_pair(Vec2(0.5 * (c.p[i] + c.p[j])), q);
        };
        auto [a, la] = mid(0, 1);
        auto [b, lb] = mid(1, 2);
        auto [d, ld] = mid(2, 0);
        nxt.push_back({{c.p[0], a, d}, {c.L[0], la, ld}});
        nxt.push_back({{a, c.p[1], b}, {la, c.L[1], lb}});
        nxt.push_back({{d, b, c.p[2]}, {ld, lb, c.L[2]}});
        nxt.push_back({{a, b, d}, {la, lb, ld}});
      }
      cur.swap(nxt);
    }
    return cur;
  };
  const auto P = pieces(t), Q = pieces(tp);
  const TriangleRule& r = triangle_rule(2);
  auto area = [](const std::array<Vec2, 3>& p) {
    return 0.5 * std::abs((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
  };
  auto touching = [](const Piece& a, const Piece& b) {
    for (const auto& u : a.p)
      for (const auto& v : b.p)
        if ((u - v).norm() < 1e-13) return true;
    return false;
  };
  struct Pt {
    Vec2 x;
    Eigen::VectorXd phi;
    double w;
  };
  auto points = [&](const std::vector<Piece>& ps, const std::array<int, 3>& ix, double sign) {
    std::vector<std::vector<Pt>> out;
    for (const auto& pc : ps) {
      std::vector<Pt> v;
      double A = area(pc.p);
      for (std::size_t i = 0; i < r.size(); ++i) {
        Pt q{bary_point(pc.p[0], pc.p[1], pc.p[2], r.bary[i]), Eigen::VectorXd::Zero(m), r.w[i] * A};
        for (int k = 0; k < 3; ++k)
          for (int j = 0; j < 3; ++j) q.phi[ix[j]] += sign * r.bary[i][k] * pc.L[k][j];
        v.push_back(q);
      }
      out.push_back(v);
    }
    return out;
  };
  const auto PX = points(P, idx, 1.0), QY = points(Q, idxp, -1.0);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t a = 0; a < P.size(); ++a)
    for (std::size_t b = 0; b < Q.size(); ++b) {
      if (touching(P[a], Q[b])) continue;
      for (const auto& x : PX[a])
        for (const auto& y : QY[b]) {
          Eigen::VectorXd psi = x.phi + y.phi;
          block.noalias() += (x.w * y.w * kernel_r2((x.x - y.x).squaredNorm(), s)) * psi * psi.transpose();
        }
    }
  return block;
}

// Richardson extrapolation of a sequence computed at levels L0, L0+1, ... with
// leading error terms 2^{-L p_k} for the given exponents p_k.
inline Eigen::MatrixXd richardson(std::vector<Eigen::MatrixXd> seq, const std::vector<double>& exponents) {
  for (double p : exponents) {
    double f = std::pow(2.0, p);
    std::vector<Eigen::MatrixXd> nxt;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) nxt.push_back((f * seq[i + 1] - seq[i]) / (f - 1.0));
    seq.swap(nxt);
  }
  return seq.back();
}

// C * int_0^pi int_0^inf (2 v(x) - v(x + r e) - v(x - r e)) r^{-1-2s} dr dtheta for a
// function v vanishing outside B(x, outer). breaks(e) lists the radii in (0, outer) where
// r -> v(x +- r e) is not smooth.
inline double polar_frac_laplacian(const std::function<double(const Vec2&)>& v, const Vec2& x, double s, double C,
                                   double outer, const std::function<std::vector<double>(const Vec2&)>& breaks) {
  using boost::math::quadrature::gauss_kronrod;
  const double vx = v(x);
  auto radial = [&](double theta) {
    Vec2 e(std::cos(theta), std::sin(theta));
    std::vector<double> r = breaks(e);
    r.push_back(0.0);
    r.push_back(outer);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    auto g = [&](double t) {
      if (t <= 0.0) return 0.0;
      double vp = v(x + t * e), vm = v(x - t * e);
      double d = 2 * vx - vp - vm;
      if (std::abs(d) <= 64 * std::numeric_limits<double>::epsilon() * (std::abs(vx) + std::abs(vp) + std::abs(vm)))
        return 0.0;
      return d * std::pow(t, -1 - 2 * s);
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      double a = r[i], b = r[i + 1];
      if (b <= a + 1e-15) continue;
      // t = a + (b - a) w^2, w in [0, 1]
      auto h = [&](double w) { return 2 * w * (b - a) * g(a + (b - a) * w * w); };
      sum += gauss_kronrod<double, 61>::integrate(h, 0.0, 1.0, 8, 1e-10);
    }
    return sum + 2 * vx * std::pow(outer, -2 * s) / (2 * s);
  };
  double total = 0.0;
  const int pieces = 128;
  for (int k = 0; k < pieces; ++k)
    total += gauss_kronrod<double, 15>::integrate(radial, std::numbers::pi * k / pieces,
                                                  std::numbers::pi * (k + 1) / pieces, 3, 1e-9);
  return C * total;
}

// Radii at which the lines x +- r e cross the segment (a, b).
inline void segment_crossings(const Vec2& x, const Vec2& e, const Vec2& a, const Vec2& b, std::vector<double>& out) {
  Vec2 d = b - a;
  double den = e.x() * d.y() - e.y() * d.x();
  if (std::abs(den) < 1e-14) return;
  Vec2 w = a - x;
  double t = (w.x() * d.y() - w.y() * d.x()) / den;
  double u = (w.x() * e.y() - w.y() * e.x()) / den;
  if (u >= 0 && u <= 1) out.push_back(std::abs(t));
}

}  // namespace fracocp::oracle
