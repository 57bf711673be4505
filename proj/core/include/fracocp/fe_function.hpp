#pragma once

#include <array>
#include <functional>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "fracocp/assembly.hpp"
#include "fracocp/mesh.hpp"

namespace fracocp {

// Continuous piecewise linear function vanishing on the boundary, with
// coefficients over the interior nodes of `mesh`.
struct FeFunction {
  const Mesh* mesh = nullptr;
  Eigen::VectorXd coeffs;

  FeFunction() = default;
  FeFunction(const Mesh& m, Eigen::VectorXd c);
  static FeFunction zero(const Mesh& m);

  double nodal(int vertex) const;
  std::array<double, 3> element_values(int e) const;
  double eval(int e, const std::array<double, 3>& l) const;
  Vec2 gradient(int e) const;
};

// Zero outside the meshed domain.
double fe_eval(const FeFunction& v, const Vec2& x);

FeFunction interpolate(const Mesh& mesh, const ScalarField& f);

// Exact transfer to a refined mesh (new vertices are edge midpoints).
FeFunction prolongate(const FeFunction& v, const RefineResult& refined);

double energy_norm(const Eigen::MatrixXd& A, const FeFunction& v);

// Cholesky factorization of A + M_u, reused for state and adjoint solves.
class GalerkinSolver {
 public:
  GalerkinSolver(const Mesh& mesh, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Mu);
  FeFunction solve(const Eigen::VectorXd& rhs) const;
  const Eigen::MatrixXd& system() const { return K_; }

 private:
  const Mesh* mesh_;
  Eigen::MatrixXd K_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

FeFunction solve_state(const Mesh& mesh, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Mu, const Eigen::VectorXd& F);

// G_i = int (y_h - y_d) phi_i.
Eigen::VectorXd adjoint_rhs(const FeFunction& y, const ScalarField& yd, int degree = 8);

FeFunction solve_adjoint(const Mesh& mesh, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Mu, const FeFunction& y,
                         const ScalarField& yd);

}  // namespace fracocp
