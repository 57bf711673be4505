#pragma once

#include <cmath>

#include "fracocp/quadrature.hpp"

namespace fracocp {

struct KernelParams {
  double s = 0.5;
  int d = 2;
  double C = 0.0;
};

// C(2, s) = 2^{2s} s Gamma(s + 1) / (pi Gamma(1 - s)).
double normalization_constant(double s);
KernelParams make_kernel_params(double s);

// |x - w|^{-2-2s} given the squared distance.
inline double kernel_r2(double r2, double s) { return std::exp((-1.0 - s) * std::log(r2)); }

// Evaluates r2^{-1-s} with square roots when s is a multiple of 1/4.
class KernelFunction {
 public:
  explicit KernelFunction(double s) : s_(s), mode_(0) {
    if (std::abs(s - 0.25) < 1e-15) mode_ = 1;
    if (std::abs(s - 0.5) < 1e-15) mode_ = 2;
    if (std::abs(s - 0.75) < 1e-15) mode_ = 3;
  }
  double operator()(double r2) const {
    switch (mode_) {
      case 1:
        return 1.0 / (r2 * std::sqrt(std::sqrt(r2)));
      case 2:
        return 1.0 / (r2 * std::sqrt(r2));
      case 3:
        return 1.0 / (r2 * std::sqrt(r2 * std::sqrt(r2)));
      default:
        return kernel_r2(r2, s_);
    }
  }

 private:
  double s_;
  int mode_;
};

// Integral of cos^{2s} over [0, psi], psi in [-pi/2, pi/2].
double angular_primitive(double psi, double s);

// Integral over the segment a->b of (y - x).n |y - x|^{-2-2s}, with n the
// right-hand unit normal of a->b (outward when the region lies on the left).
double edge_flux(const Vec2& x, const Vec2& a, const Vec2& b, double s);

// Integral over the segment a->b of |y - x|^{-2s}.
double edge_moment(const Vec2& x, const Vec2& a, const Vec2& b, double s);

// Integral of |x - w|^{-2-2s} over the triangle (a, b, c) for x outside it.
double triangle_kernel_integral(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c, double s);

// Integral (or principal value, for x inside) of (w - x)|x - w|^{-2-2s} over
// the counter-clockwise triangle (a, b, c).
Vec2 triangle_first_moment(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c, double s);

}  // namespace fracocp
