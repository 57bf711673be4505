#include "fracocp/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracocp {

Scheme parse_scheme(const std::string& name) {
  if (name == "full") return Scheme::Full;
  if (name == "semi") return Scheme::Semi;
  throw std::invalid_argument("unknown scheme: " + name);
}

std::string scheme_name(Scheme s) { return s == Scheme::Full ? "full" : "semi"; }

void ProblemSpec::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional order must lie in (0,1)");
  if (!(lambda > 0.0)) throw std::invalid_argument("regularization weight must be positive");
  if (!(a < b)) throw std::invalid_argument("control bounds must satisfy a < b");
  if (!f || !yd) throw std::invalid_argument("source and desired state must be set");
}

double clamp(double v, double a, double b) {
  if (a > b) throw std::invalid_argument("clamp: lower bound exceeds upper bound");
  return std::min(b, std::max(a, v));
}

Control Control::piecewise_constant(const Mesh& mesh, Eigen::VectorXd values) {
  if (values.size() != mesh.num_elements()) throw std::invalid_argument("Control: one value per element expected");
  Control c;
  c.kind_ = Kind::PiecewiseConstant;
  c.mesh_ = &mesh;
  c.values_ = std::move(values);
  return c;
}

Control Control::constant(const Mesh& mesh, double value) {
  return piecewise_constant(mesh, Eigen::VectorXd::Constant(mesh.num_elements(), value));
}

Control Control::pointwise(FeFunction y, FeFunction z, double lambda, double a, double b) {
  if (y.mesh != z.mesh) throw std::invalid_argument("Control: state and adjoint live on different meshes");
  Control c;
  c.kind_ = Kind::Pointwise;
  c.mesh_ = y.mesh;
  c.y_ = std::move(y);
  c.z_ = std::move(z);
  c.lambda_ = lambda;
  c.a_ = a;
  c.b_ = b;
  return c;
}

double Control::operator()(int e, const std::array<double, 3>& l) const {
  if (kind_ == Kind::PiecewiseConstant) return values_[e];
  return clamp(y_.eval(e, l) * z_.eval(e, l) / lambda_, a_, b_);
}

ElementField Control::field() const {
  return [this](int e, const std::array<double, 3>& l, const Vec2&) { return (*this)(e, l); };
}

Control control_update_full(const Mesh& mesh, const FeFunction& y, const FeFunction& z, const ProblemSpec& spec) {
  const TriangleRule& q = triangle_rule(4);
  Eigen::VectorXd u(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (!(mesh.areas[e] > 0)) throw std::domain_error("control_update_full: zero-area element");
    double integral = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) integral += q.w[i] * y.eval(e, q.bary[i]) * z.eval(e, q.bary[i]);
    integral *= mesh.areas[e];
    u[e] = clamp(integral / (spec.lambda * mesh.areas[e]), spec.a, spec.b);
  }
  return Control::piecewise_constant(mesh, std::move(u));
}

Control control_update_semi(const FeFunction& y, const FeFunction& z, const ProblemSpec& spec) {
  return Control::pointwise(y, z, spec.lambda, spec.a, spec.b);
}

double cost_functional(const FeFunction& y, const Control& u, const ProblemSpec& spec) {
  const Mesh& mesh = *y.mesh;
  const TriangleRule& q = triangle_rule(6);
  double track = 0.0, reg = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double te = 0.0, re = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double d = y.eval(e, q.bary[i]) - spec.yd(mesh.point(e, q.bary[i]));
      double uv = u(e, q.bary[i]);
      te += q.w[i] * d * d;
      re += q.w[i] * uv * uv;
    }
    track += te * mesh.areas[e];
    reg += re * mesh.areas[e];
  }
  return 0.5 * track + 0.5 * spec.lambda * reg;
}

namespace {

// Control values stored at the points the optimizer works with: one per
// element for the fully discrete scheme, the degree-6 rule points otherwise.
struct Samples {
  Scheme scheme;
  const Mesh* mesh;
  Eigen::VectorXd v;

  int per_element() const { return scheme == Scheme::Full ? 1 : static_cast<int>(triangle_rule(6).size()); }

  static Samples from(const Mesh& mesh, Scheme scheme, const Control& u) {
    Samples s{scheme, &mesh, {}};
    if (scheme == Scheme::Full) {
      if (u.kind() == Control::Kind::PiecewiseConstant) {
        s.v = u.values();
      } else {
        const TriangleRule& q = triangle_rule(6);
        s.v.resize(mesh.num_elements());
        for (int e = 0; e < mesh.num_elements(); ++e) {
          double m = 0.0;
          for (std::size_t i = 0; i < q.size(); ++i) m += q.w[i] * u(e, q.bary[i]);
          s.v[e] = m;
        }
      }
      return s;
    }
    const TriangleRule& q = triangle_rule(6);
    const int n = static_cast<int>(q.size());
    s.v.resize(static_cast<Eigen::Index>(mesh.num_elements()) * n);
    for (int e = 0; e < mesh.num_elements(); ++e)
      for (int i = 0; i < n; ++i) s.v[e * n + i] = u(e, q.bary[i]);
    return s;
  }

  Eigen::MatrixXd mass() const {
    if (scheme == Scheme::Full) return assemble_piecewise_constant_mass(*mesh, v);
    const TriangleRule& q = triangle_rule(6);
    const int n = static_cast<int>(q.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(mesh->num_dofs, mesh->num_dofs);
    for (int e = 0; e < mesh->num_elements(); ++e) {
      Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
      for (int i = 0; i < n; ++i) {
        Eigen::Vector3d l(q.bary[i][0], q.bary[i][1], q.bary[i][2]);
        m += q.w[i] * v[e * n + i] * l * l.transpose();
      }
      auto d = mesh->element_dofs(e);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          if (d[a] >= 0 && d[b] >= 0) M(d[a], d[b]) += mesh->areas[e] * m(a, b);
    }
    return M;
  }

  double l2_squared() const {
    const int n = per_element();
    const TriangleRule& q = triangle_rule(6);
    double sum = 0.0;
    for (int e = 0; e < mesh->num_elements(); ++e) {
      double se = 0.0;
      for (int i = 0; i < n; ++i) se += (n == 1 ? 1.0 : q.w[i]) * v[e * n + i] * v[e * n + i];
      sum += se * mesh->areas[e];
    }
    return sum;
  }
};

double tracking(const FeFunction& y, const ScalarField& yd) {
  const Mesh& mesh = *y.mesh;
  const TriangleRule& q = triangle_rule(6);
  double sum = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double te = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double d = y.eval(e, q.bary[i]) - yd(mesh.point(e, q.bary[i]));
      te += q.w[i] * d * d;
    }
    sum += te * mesh.areas[e];
  }
  return sum;
}

}  // namespace

OptimizerResult projection_gradient_solve(const Mesh& mesh, const Eigen::MatrixXd& A, const ProblemSpec& spec,
                                          Scheme scheme, const Control& u0, double tol, int max_iter) {
  spec.validate();
  if (!(tol > 0)) throw std::invalid_argument("projection_gradient_solve: tolerance must be positive");
  const Eigen::VectorXd F = assemble_load(mesh, spec.f);
  Samples u = Samples::from(mesh, scheme, u0);
  OptimizerResult out;
  double rho = 1.0, prev_cost = std::numeric_limits<double>::infinity(), prev_err = out.error = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 1; it <= max_iter; ++it) {
    GalerkinSolver solver(mesh, A, u.mass());
    FeFunction y = solver.solve(F);
    FeFunction z = solver.solve(adjoint_rhs(y, spec.yd));
    double cost = 0.5 * tracking(y, spec.yd) + 0.5 * spec.lambda * u.l2_squared();
    Control next = scheme == Scheme::Full ? control_update_full(mesh, y, z, spec) : control_update_semi(y, z, spec);
    Samples un = Samples::from(mesh, scheme, next);
    double err = (un.v - u.v).lpNorm<Eigen::Infinity>();
    out.log.push_back({it, err, cost, rho});
    out.iterations = it;
    out.error = err;
    out.y = std::move(y);
    out.z = std::move(z);
    out.u = std::move(next);
    if (err <= tol) {
      out.converged = true;
      break;
    }
    if (cost > prev_cost + 1e-10 * std::max(1.0, std::abs(prev_cost))) rho *= 0.5;
    growth = err > prev_err ? growth + 1 : 0;
    if (growth >= 3) {
      rho *= 0.5;
      growth = 0;
    }
    prev_cost = cost;
    prev_err = err;
    u.v += rho * (un.v - u.v);
  }
  return out;
}

}  // namespace fracocp
