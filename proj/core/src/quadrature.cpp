#include "fracocp/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracocp {
namespace {

GaussRule make_gauss(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p1 = z, p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[n - 1 - i] = 0.5 * (1.0 + z);
    r.w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

void add_orbit3(TriangleRule& r, double w, double a, double b) {
  r.bary.push_back({a, b, b});
  r.bary.push_back({b, a, b});
  r.bary.push_back({b, b, a});
  for (int i = 0; i < 3; ++i) r.w.push_back(w);
}

void add_orbit6(TriangleRule& r, double w, double a, double b, double c) {
  const std::array<std::array<double, 3>, 6> p = {{{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const auto& q : p) {
    r.bary.push_back(q);
    r.w.push_back(w);
  }
}

TriangleRule collapsed(int degree) {
  int n = (degree + 3) / 2;
  const GaussRule& g = gauss_legendre(n);
  TriangleRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double u = g.x[i], v = g.x[j];
      r.bary.push_back({1.0 - u, u * (1.0 - v), u * v});
      r.w.push_back(2.0 * u * g.w[i] * g.w[j]);
    }
  return r;
}

TriangleRule make_triangle(int degree) {
  TriangleRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      r.bary.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
      r.w.push_back(1.0);
      return r;
    case 2:
      add_orbit3(r, 1.0 / 3, 2.0 / 3, 1.0 / 6);
      return r;
    case 3:
    case 4:
      add_orbit3(r, 0.223381589678011, 0.108103018168070, 0.445948490915965);
      add_orbit3(r, 0.109951743655322, 0.816847572980459, 0.091576213509771);
      r.degree = 4;
      return r;
    case 5:
      r.bary.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
      r.w.push_back(0.225);
      add_orbit3(r, 0.132394152788506, 0.059715871789770, 0.470142064105115);
      add_orbit3(r, 0.125939180544827, 0.797426985353087, 0.101286507323456);
      return r;
    case 6:
      add_orbit3(r, 0.116786275726379, 0.501426509658179, 0.249286745170910);
      add_orbit3(r, 0.050844906370207, 0.873821971016996, 0.063089014491502);
      add_orbit6(r, 0.082851075618374, 0.053145049844817, 0.310352451033784, 0.636502499121399);
      return r;
    default:
      return collapsed(degree);
  }
}

constexpr int kMaxGauss = 64;
constexpr int kMaxTriDegree = 30;

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const std::vector<GaussRule> table = [] {
    std::vector<GaussRule> t(kMaxGauss + 1);
    for (int k = 1; k <= kMaxGauss; ++k) t[k] = make_gauss(k);
    return t;
  }();
  if (n < 1 || n > kMaxGauss) throw std::invalid_argument("gauss_legendre: unsupported point count");
  return table[n];
}

const TriangleRule& triangle_rule(int degree) {
  static const std::vector<TriangleRule> table = [] {
    std::vector<TriangleRule> t(kMaxTriDegree + 1);
    for (int k = 1; k <= kMaxTriDegree; ++k) t[k] = make_triangle(k);
    return t;
  }();
  if (degree < 1 || degree > kMaxTriDegree) throw std::invalid_argument("triangle_rule: unsupported degree");
  return table[degree];
}

}  // namespace fracocp
