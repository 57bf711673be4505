#include "fracocp/kernel.hpp"

#include <array>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace fracocp {

double normalization_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional order must lie in (0,1)");
  return std::pow(2.0, 2.0 * s) * s * std::tgamma(s + 1.0) / (std::numbers::pi * std::tgamma(1.0 - s));
}

KernelParams make_kernel_params(double s) {
  KernelParams p;
  p.s = s;
  p.C = normalization_constant(s);
  return p;
}

namespace {

// Coefficients of int_0^u sin^{2s} v dv = sum_k c_k u^{2s+1+2k}.
struct SinPowerSeries {
  double s = -1.0;
  double total = 0.0;  // int_0^{pi/2} cos^{2s}
  std::array<double, 40> c{};
};

const SinPowerSeries& sin_power_series(double s) {
  thread_local SinPowerSeries cache;
  if (cache.s == s) return cache;
  std::array<double, 40> g{}, h{};
  double fact = 1.0;
  for (int k = 0; k < 40; ++k) {
    if (k > 0) fact *= (2.0 * k) * (2.0 * k + 1.0);
    g[k] = (k % 2 ? -1.0 : 1.0) / fact;
  }
  const double alpha = 2.0 * s;
  h[0] = 1.0;
  for (int n = 1; n < 40; ++n) {
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) sum += ((alpha + 1.0) * k - n) * g[k] * h[n - k];
    h[n] = sum / n;
  }
  cache.s = s;
  for (int k = 0; k < 40; ++k) cache.c[k] = h[k] / (alpha + 1.0 + 2.0 * k);
  cache.total = 0.5 * boost::math::beta(0.5, s + 0.5);
  return cache;
}

}  // namespace

double angular_primitive(double psi, double s) {
  const SinPowerSeries& ser = sin_power_series(s);
  double u = 0.5 * std::numbers::pi - std::abs(psi);
  if (u <= 0.0) return psi < 0 ? -ser.total : ser.total;
  double w = u * u, acc = 0.0;
  for (int k = 39; k >= 0; --k) acc = acc * w + ser.c[k];
  double v = ser.total - acc * std::pow(u, 2.0 * s + 1.0);
  return psi < 0 ? -v : v;
}

namespace {

struct EdgeFrame {
  double p, t1, t2, len;
  double dist2_mid;
};

EdgeFrame frame(const Vec2& x, const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  double len = d.norm();
  Vec2 u = d / len;
  Vec2 n(u.y(), -u.x());
  Vec2 r = a - x;
  return {r.dot(n), r.dot(u), r.dot(u) + len, len, (0.5 * (a + b) - x).squaredNorm()};
}

template <class F>
double gauss_on_segment(const EdgeFrame& f, int n, F&& g) {
  const GaussRule& q = gauss_legendre(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) sum += q.w[i] * g(f.t1 + q.x[i] * f.len);
  return sum * f.len;
}

int far_points(const EdgeFrame& f) {
  double ratio2 = f.dist2_mid / (f.len * f.len);
  if (ratio2 > 1600.0) return 2;
  if (ratio2 > 225.0) return 3;
  if (ratio2 > 36.0) return 4;
  return 0;
}

}  // namespace

double edge_flux(const Vec2& x, const Vec2& a, const Vec2& b, double s) {
  EdgeFrame f = frame(x, a, b);
  if (int n = far_points(f)) {
    double p2 = f.p * f.p;
    const KernelFunction k(s);
    return f.p * gauss_on_segment(f, n, [&](double t) { return k(p2 + t * t); });
  }
  double ap = std::abs(f.p);
  if (ap < 1e-14 * f.len) return 0.0;
  double g = angular_primitive(std::atan(f.t2 / ap), s) - angular_primitive(std::atan(f.t1 / ap), s);
  return (f.p > 0 ? 1.0 : -1.0) * std::pow(ap, -2.0 * s) * g;
}

double edge_moment(const Vec2& x, const Vec2& a, const Vec2& b, double s) {
  EdgeFrame f = frame(x, a, b);
  double p2 = f.p * f.p;
  if (int n = far_points(f)) return gauss_on_segment(f, n, [&](double t) { return std::pow(p2 + t * t, -s); });
  double ap = std::abs(f.p);
  if (ap < 1e-13 * f.len) {
    if (f.t1 < 0 && f.t2 > 0) throw std::domain_error("edge_moment: point on segment");
    double lo = std::min(std::abs(f.t1), std::abs(f.t2)), hi = std::max(std::abs(f.t1), std::abs(f.t2));
    if (std::abs(s - 0.5) < 1e-14) return std::log(hi / lo);
    return (std::pow(hi, 1.0 - 2.0 * s) - std::pow(lo, 1.0 - 2.0 * s)) / (1.0 - 2.0 * s);
  }
  double u1 = std::asinh(f.t1 / ap), u2 = std::asinh(f.t2 / ap);
  const GaussRule& q = gauss_legendre(20);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    double u = u1 + q.x[i] * (u2 - u1);
    sum += q.w[i] * std::pow(std::cosh(u), 1.0 - 2.0 * s);
  }
  return std::pow(ap, 1.0 - 2.0 * s) * sum * (u2 - u1);
}

double triangle_kernel_integral(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c, double s) {
  return -(edge_flux(x, a, b, s) + edge_flux(x, b, c, s) + edge_flux(x, c, a, s)) / (2.0 * s);
}

Vec2 triangle_first_moment(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c, double s) {
  Vec2 sum = Vec2::Zero();
  const Vec2* v[3] = {&a, &b, &c};
  for (int i = 0; i < 3; ++i) {
    const Vec2& p = *v[i];
    const Vec2& q = *v[(i + 1) % 3];
    Vec2 d = (q - p).normalized();
    sum += Vec2(d.y(), -d.x()) * edge_moment(x, p, q, s);
  }
  return -sum / (2.0 * s);
}

}  // namespace fracocp
