#include "fracocp/fe_function.hpp"

#include <cmath>
#include <stdexcept>

#include "fracocp/assembly.hpp"

namespace fracocp {

FeFunction::FeFunction(const Mesh& m, Eigen::VectorXd c) : mesh(&m), coeffs(std::move(c)) {
  if (coeffs.size() != m.num_dofs) throw std::invalid_argument("FeFunction: coefficient count differs from interior node count");
}

FeFunction FeFunction::zero(const Mesh& m) { return FeFunction(m, Eigen::VectorXd::Zero(m.num_dofs)); }

double FeFunction::nodal(int vertex) const {
  int d = mesh->dof[vertex];
  return d < 0 ? 0.0 : coeffs[d];
}

std::array<double, 3> FeFunction::element_values(int e) const {
  const auto& t = mesh->elements[e];
  return {nodal(t[0]), nodal(t[1]), nodal(t[2])};
}

double FeFunction::eval(int e, const std::array<double, 3>& l) const {
  auto v = element_values(e);
  return l[0] * v[0] + l[1] * v[1] + l[2] * v[2];
}

Vec2 FeFunction::gradient(int e) const {
  auto g = mesh->gradients(e);
  auto v = element_values(e);
  return v[0] * g[0] + v[1] * g[1] + v[2] * g[2];
}

double fe_eval(const FeFunction& v, const Vec2& x) {
  std::array<double, 3> l;
  int e = locate(*v.mesh, x, &l);
  return e < 0 ? 0.0 : v.eval(e, l);
}

FeFunction interpolate(const Mesh& mesh, const ScalarField& f) {
  Eigen::VectorXd c(mesh.num_dofs);
  for (int i = 0; i < mesh.num_vertices(); ++i)
    if (mesh.dof[i] >= 0) c[mesh.dof[i]] = f(mesh.vertices[i]);
  return FeFunction(mesh, std::move(c));
}

FeFunction prolongate(const FeFunction& v, const RefineResult& refined) {
  const Mesh& m = refined.mesh;
  Eigen::VectorXd c(m.num_dofs);
  for (int i = 0; i < m.num_vertices(); ++i) {
    if (m.dof[i] < 0) continue;
    auto [a, b] = refined.vertex_parents[i];
    c[m.dof[i]] = 0.5 * (v.nodal(a) + v.nodal(b));
  }
  return FeFunction(m, std::move(c));
}

double energy_norm(const Eigen::MatrixXd& A, const FeFunction& v) {
  return std::sqrt(std::max(0.0, v.coeffs.dot(A * v.coeffs)));
}

GalerkinSolver::GalerkinSolver(const Mesh& mesh, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Mu)
    : mesh_(&mesh), K_(A + Mu), llt_(K_) {
  if (llt_.info() != Eigen::Success) throw std::runtime_error("Cholesky factorization failed: system is not positive definite");
}

FeFunction GalerkinSolver::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = llt_.solve(rhs);
  double res = (K_ * x - rhs).norm();
  if (res > 1e-10 * std::max(rhs.norm(), 1e-300) && rhs.norm() > 0)
    throw std::runtime_error("Galerkin solve: residual above tolerance");
  return FeFunction(*mesh_, std::move(x));
}

FeFunction solve_state(const Mesh& mesh, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Mu, const Eigen::VectorXd& F) {
  return GalerkinSolver(mesh, A, Mu).solve(F);
}

Eigen::VectorXd adjoint_rhs(const FeFunction& y, const ScalarField& yd, int degree) {
  return assemble_load(
      *y.mesh, ElementField([&](int e, const std::array<double, 3>& l, const Vec2& x) { return y.eval(e, l) - yd(x); }),
      degree);
}

FeFunction solve_adjoint(const Mesh& mesh, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Mu, const FeFunction& y,
                         const ScalarField& yd) {
  return GalerkinSolver(mesh, A, Mu).solve(adjoint_rhs(y, yd));
}

}  // namespace fracocp
