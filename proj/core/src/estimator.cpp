#include "fracocp/estimator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace fracocp {

FracLaplacian::FracLaplacian(const Mesh& mesh, const KernelParams& params)
    : mesh_(&mesh), params_(params), kernel_(params.s), rho_(ComplementDensity::from_mesh(mesh, params.s)) {
  const TriangleRule& q2 = triangle_rule(2);
  const TriangleRule& q4 = triangle_rule(4);
  if (q2.size() != 3 || q4.size() != 6) throw std::logic_error("FracLaplacian: unexpected rule sizes");
  mid_points_.resize(mesh.num_elements());
  deg4_points_.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int i = 0; i < 3; ++i) mid_points_[e][i] = mesh.point(e, q2.bary[i]);
    for (int i = 0; i < 6; ++i) deg4_points_[e][i] = mesh.point(e, q4.bary[i]);
  }
}

double FracLaplacian::operator()(const FeFunction& v, int e, const Vec2& x) const {
  double out;
  apply({&v}, e, x, &out);
  return out;
}

void FracLaplacian::apply(const std::vector<const FeFunction*>& fns, int e, const Vec2& x, double* out) const {
  const Mesh& m = *mesh_;
  const double s = params_.s;
  const int nf = static_cast<int>(fns.size());
  auto lx = m.barycentric(e, x);
  if (std::min({lx[0], lx[1], lx[2]}) <= 1e-12) throw std::domain_error("fractional Laplacian requested on the skeleton");

  std::vector<double> vx(nf), acc(nf);
  const double rx = rho_(x);
  const auto& te = m.elements[e];
  Vec2 P = triangle_first_moment(x, m.vertices[te[0]], m.vertices[te[1]], m.vertices[te[2]], s);
  for (int k = 0; k < nf; ++k) {
    vx[k] = fns[k]->eval(e, lx);
    acc[k] = vx[k] * rx - fns[k]->gradient(e).dot(P);
  }
  const TriangleRule& q4 = triangle_rule(4);
  std::array<double, 3> val;
  for (int t = 0; t < m.num_elements(); ++t) {
    if (t == e) continue;
    const Vec2 d = x - m.centroids[t];
    const double ratio = (d.norm() - m.radii[t]) / m.diams[t];
    const auto& el = m.elements[t];
    if (ratio >= 12.0) {
      double w = m.areas[t] * kernel_(d.squaredNorm());
      for (int k = 0; k < nf; ++k) {
        for (int i = 0; i < 3; ++i) val[i] = fns[k]->nodal(el[i]);
        acc[k] += w * (vx[k] - (val[0] + val[1] + val[2]) / 3.0);
      }
    } else if (ratio >= 5.0) {
      // degree-2 rule: points at barycentric (2/3, 1/6, 1/6) and permutations
      double w[3];
      for (int i = 0; i < 3; ++i) w[i] = m.areas[t] / 3.0 * kernel_((x - mid_points_[t][i]).squaredNorm());
      const TriangleRule& q2 = triangle_rule(2);
      for (int k = 0; k < nf; ++k) {
        for (int i = 0; i < 3; ++i) val[i] = fns[k]->nodal(el[i]);
        for (int i = 0; i < 3; ++i) {
          double vw = q2.bary[i][0] * val[0] + q2.bary[i][1] * val[1] + q2.bary[i][2] * val[2];
          acc[k] += w[i] * (vx[k] - vw);
        }
      }
    } else if (ratio >= 2.0) {
      double w[6];
      for (int i = 0; i < 6; ++i) w[i] = m.areas[t] * q4.w[i] * kernel_((x - deg4_points_[t][i]).squaredNorm());
      for (int k = 0; k < nf; ++k) {
        for (int i = 0; i < 3; ++i) val[i] = fns[k]->nodal(el[i]);
        for (int i = 0; i < 6; ++i) {
          double vw = q4.bary[i][0] * val[0] + q4.bary[i][1] * val[1] + q4.bary[i][2] * val[2];
          acc[k] += w[i] * (vx[k] - vw);
        }
      }
    } else {
      const Vec2 &a = m.vertices[el[0]], &b = m.vertices[el[1]], &c = m.vertices[el[2]];
      double I0 = triangle_kernel_integral(x, a, b, c, s);
      Vec2 I1 = triangle_first_moment(x, a, b, c, s);
      auto lt = m.barycentric(t, x);
      for (int k = 0; k < nf; ++k) {
        for (int i = 0; i < 3; ++i) val[i] = fns[k]->nodal(el[i]);
        double ext = lt[0] * val[0] + lt[1] * val[1] + lt[2] * val[2];
        acc[k] += (vx[k] - ext) * I0 - fns[k]->gradient(t).dot(I1);
      }
    }
  }
  for (int k = 0; k < nf; ++k) out[k] = params_.C * acc[k];
}

double eval_frac_laplacian_p1(const FeFunction& v, const Vec2& x, const KernelParams& params) {
  std::array<double, 3> l;
  int e = locate(*v.mesh, x, &l);
  if (e < 0) throw std::domain_error("eval_frac_laplacian_p1: point outside the domain");
  return FracLaplacian(*v.mesh, params)(v, e, x);
}

namespace {

template <class F>
void parallel_elements(int ne, int workers, F&& body) {
  if (workers <= 0) workers = worker_count();
  workers = std::max(1, std::min(workers, ne));
  if (workers == 1) {
    for (int e = 0; e < ne; ++e) body(e);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int e = w; e < ne; e += workers) body(e);
    });
  for (auto& t : pool) t.join();
}

IndicatorField make_field(IndicatorKind kind, int n) { return IndicatorField{kind, Eigen::VectorXd::Zero(n)}; }

}  // namespace

std::pair<IndicatorField, IndicatorField> state_adjoint_indicators(const Mesh& mesh, const FeFunction& y,
                                                                   const FeFunction& z, const Control& u,
                                                                   const ProblemSpec& spec, const KernelParams& params,
                                                                   int workers) {
  FracLaplacian lap(mesh, params);
  const TriangleRule& q = triangle_rule(4);
  auto ey = make_field(IndicatorKind::State, mesh.num_elements());
  auto ez = make_field(IndicatorKind::Adjoint, mesh.num_elements());
  const std::vector<const FeFunction*> fns = {&y, &z};
  parallel_elements(mesh.num_elements(), workers, [&](int e) {
    double sy = 0.0, sz = 0.0, L[2];
    for (std::size_t i = 0; i < q.size(); ++i) {
      const Vec2 x = mesh.point(e, q.bary[i]);
      lap.apply(fns, e, x, L);
      double h = local_mesh_width(mesh, e, x, params.s);
      double uv = u(e, q.bary[i]), yv = y.eval(e, q.bary[i]), zv = z.eval(e, q.bary[i]);
      double ry = spec.f(x) - uv * yv - L[0];
      double rz = yv - spec.yd(x) - uv * zv - L[1];
      sy += q.w[i] * h * h * ry * ry;
      sz += q.w[i] * h * h * rz * rz;
    }
    ey.values[e] = sy * mesh.areas[e];
    ez.values[e] = sz * mesh.areas[e];
  });
  return {ey, ez};
}

IndicatorField state_indicator(const Mesh& mesh, const FeFunction& y, const Control& u, const ScalarField& f,
                               const KernelParams& params) {
  FracLaplacian lap(mesh, params);
  const TriangleRule& q = triangle_rule(4);
  auto out = make_field(IndicatorKind::State, mesh.num_elements());
  parallel_elements(mesh.num_elements(), 0, [&](int e) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const Vec2 x = mesh.point(e, q.bary[i]);
      double h = local_mesh_width(mesh, e, x, params.s);
      double r = f(x) - u(e, q.bary[i]) * y.eval(e, q.bary[i]) - lap(y, e, x);
      sum += q.w[i] * h * h * r * r;
    }
    out.values[e] = sum * mesh.areas[e];
  });
  return out;
}

IndicatorField adjoint_indicator(const Mesh& mesh, const FeFunction& z, const FeFunction& y, const Control& u,
                                 const ScalarField& yd, const KernelParams& params) {
  FracLaplacian lap(mesh, params);
  const TriangleRule& q = triangle_rule(4);
  auto out = make_field(IndicatorKind::Adjoint, mesh.num_elements());
  parallel_elements(mesh.num_elements(), 0, [&](int e) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const Vec2 x = mesh.point(e, q.bary[i]);
      double h = local_mesh_width(mesh, e, x, params.s);
      double r = y.eval(e, q.bary[i]) - yd(x) - u(e, q.bary[i]) * z.eval(e, q.bary[i]) - lap(z, e, x);
      sum += q.w[i] * h * h * r * r;
    }
    out.values[e] = sum * mesh.areas[e];
  });
  return out;
}

IndicatorField control_indicator(const Mesh& mesh, const Control& u_full, const FeFunction& y, const FeFunction& z,
                                 const ProblemSpec& spec) {
  if (u_full.kind() != Control::Kind::PiecewiseConstant)
    throw std::invalid_argument("control_indicator: defined for the fully discrete control only");
  const TriangleRule& q = triangle_rule(6);
  auto out = make_field(IndicatorKind::Control, mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double ut = clamp(y.eval(e, q.bary[i]) * z.eval(e, q.bary[i]) / spec.lambda, spec.a, spec.b);
      double d = ut - u_full.values()[e];
      sum += q.w[i] * d * d;
    }
    out.values[e] = sum * mesh.areas[e];
  }
  return out;
}

IndicatorField combine_ocp(const IndicatorField& state, const IndicatorField& adjoint, const IndicatorField* control,
                           Scheme scheme, const EstimatorConstants& c) {
  if (state.values.size() != adjoint.values.size() || (control && control->values.size() != state.values.size()))
    throw std::invalid_argument("combine_ocp: indicator fields belong to different meshes");
  if (scheme == Scheme::Full && !control) throw std::invalid_argument("combine_ocp: the fully discrete scheme needs the control indicator");
  IndicatorField out{IndicatorKind::Combined, c.state * state.values + c.adjoint * adjoint.values};
  if (scheme == Scheme::Full) out.values += c.control * control->values;
  return out;
}

double ErrorTriple::total() const { return std::sqrt(state * state + adjoint * adjoint + control * control); }

double effectivity_index(double eta_total, const ErrorTriple& errors) {
  double e = errors.total();
  if (!(e > 0)) throw std::domain_error("effectivity_index: zero error norm");
  return eta_total / e;
}

void write_indicators(std::ostream& os, const IndicatorField& state, const IndicatorField& adjoint,
                      const IndicatorField* control, const IndicatorField& combined) {
  os.precision(12);
  for (Eigen::Index e = 0; e < state.values.size(); ++e)
    os << e << " " << state.values[e] << " " << adjoint.values[e] << " " << (control ? control->values[e] : 0.0) << " "
       << combined.values[e] << "\n";
}

}  // namespace fracocp
