#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracocp/assembly.hpp"
#include "fracocp/fe_function.hpp"
#include "fracocp/mesh.hpp"

namespace fracocp {

enum class Scheme { Full, Semi };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

struct ProblemSpec {
  double s = 0.5;
  double lambda = 1.0;
  double a = 0.0;
  double b = 1.0;
  ScalarField f;
  ScalarField yd;
  Domain domain = Domain::Disk;
  int initial_resolution = 2;

  void validate() const;
};

double clamp(double v, double a, double b);

// Either one constant per element, or the pointwise projection of y z / lambda.
class Control {
 public:
  enum class Kind { PiecewiseConstant, Pointwise };

  Control() = default;
  static Control piecewise_constant(const Mesh& mesh, Eigen::VectorXd values);
  static Control constant(const Mesh& mesh, double value);
  static Control pointwise(FeFunction y, FeFunction z, double lambda, double a, double b);

  Kind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  const Eigen::VectorXd& values() const { return values_; }
  const FeFunction& state() const { return y_; }
  const FeFunction& adjoint() const { return z_; }

  double operator()(int e, const std::array<double, 3>& l) const;
  ElementField field() const;

 private:
  Kind kind_ = Kind::PiecewiseConstant;
  const Mesh* mesh_ = nullptr;
  Eigen::VectorXd values_;
  FeFunction y_, z_;
  double lambda_ = 1.0, a_ = 0.0, b_ = 1.0;
};

// u|_T = clamp(int_T y z / (lambda |T|)).
Control control_update_full(const Mesh& mesh, const FeFunction& y, const FeFunction& z, const ProblemSpec& spec);
// u = clamp(y z / lambda) pointwise.
Control control_update_semi(const FeFunction& y, const FeFunction& z, const ProblemSpec& spec);

// 1/2 ||y - y_d||^2 + lambda/2 ||u||^2.
double cost_functional(const FeFunction& y, const Control& u, const ProblemSpec& spec);

struct OptimizerLogEntry {
  int iteration;
  double change;
  double cost;
  double damping;
};

struct OptimizerResult {
  FeFunction y;
  FeFunction z;
  Control u;
  int iterations = 0;
  double error = 0.0;
  bool converged = false;
  std::vector<OptimizerLogEntry> log;
};

// Projection fixed point: solve state, solve adjoint, project, until the sup
// norm of the control change drops below tol. The new control is blended with
// the old one when the cost increases or the change grows three times in a row.
OptimizerResult projection_gradient_solve(const Mesh& mesh, const Eigen::MatrixXd& A, const ProblemSpec& spec,
                                          Scheme scheme, const Control& u0, double tol = 1e-6, int max_iter = 200);

}  // namespace fracocp
