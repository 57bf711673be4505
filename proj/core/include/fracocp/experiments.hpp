#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracocp/afem.hpp"

namespace fracocp {

// Closed-form optimal triple on the unit disk with y = z = c (1 - |x|^2)^s,
// c = 2^{-2s} / Gamma(1+s)^2, and the data that make it optimal.
struct ExactSolution {
  double s = 0.5, lambda = 0.1, a = 0.4, b = 1.5;
  double c = 0.0;
  ScalarField y, z, u, f, yd;
  // Right sides of the energy identities: a(y, v) = (state_rhs, v), a(z, v) = (adjoint_rhs, v).
  ScalarField state_rhs, adjoint_rhs;
  double state_energy = 0.0;    // (state_rhs, y) = a(y, y)
  double adjoint_energy = 0.0;  // (adjoint_rhs, z) = a(z, z)
};

ExactSolution exact_solution_disk(double s, double lambda, double a, double b);

ProblemSpec setup_example1(double s, double lambda = 0.1, double a = 0.4, double b = 1.5);
ProblemSpec setup_example2(double s = 0.5);

// Energy errors from ||y - y_h||^2 = a(y,y) - 2 (g, y_h) + y_h^T A y_h; control error in L2 over the mesh.
ErrorTriple exact_errors(const FeFunction& y, const FeFunction& z, const Control& u, const ExactSolution& exact,
                         const Eigen::MatrixXd& A);

// Least-squares slope of log(values) against log(dofs) over the last `count`
// entries (max(3, half) when count is 0). Non-positive or missing values are skipped.
double fit_slope(const std::vector<double>& dofs, const std::vector<double>& values, int count = 0);

struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN for empty cells

  std::vector<double> column(const std::string& name) const;
};

TraceTable trace_table(const AfemTrace& trace);
TraceTable read_trace_csv(std::istream& is);

// Slopes of every error and estimator column against N.
std::map<std::string, double> trace_slopes(const TraceTable& table);
void write_rates(std::ostream& os, const std::map<std::string, double>& slopes);

struct StudyConfig {
  int example = 1;
  double s = 0.75;
  double theta = 0.5;
  Scheme scheme = Scheme::Semi;
  std::optional<double> lambda, a, b;
  int max_dofs = 4000;
  int max_iterations = 100;
  double tol = 0.0;
  bool uniform = false;
  std::string out_dir;  // nothing is written when empty
  bool write_indicators = false;
  bool write_meshes = true;
  QuadratureConfig quadrature;
};

struct StudyResult {
  AfemTrace trace;
  std::map<std::string, double> slopes;
};

StudyResult run_study(const StudyConfig& config, const std::function<void(const std::string&)>& log = {});

struct GetoorResult {
  std::vector<int> dofs;
  std::vector<double> integral;       // int y_h
  std::vector<double> energy_error;   // ||y - y_h|| in the energy norm
  double exact_integral = 0.0;
  double slope = 0.0;
};

// Forward problem with u = 0 and f = 1 on the disk, on uniformly refined meshes
// until the next level would exceed max_dofs.
GetoorResult getoor_study(double s, int max_dofs, int initial_resolution = 4,
                          const std::function<void(const std::string&)>& log = {});

}  // namespace fracocp
