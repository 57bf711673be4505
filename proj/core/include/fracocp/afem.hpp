#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracocp/control.hpp"
#include "fracocp/estimator.hpp"
#include "fracocp/pair_integrals.hpp"

namespace fracocp {

// Shortest prefix of the indicators sorted in descending order (ties by id)
// whose sum reaches theta^2 times the total.
std::vector<int> dorfler_mark(const IndicatorField& indicators, double theta);

struct AfemRecord {
  int iteration = 0;
  int dofs = 0;
  int elements = 0;
  double eta_y = 0.0;
  double eta_z = 0.0;
  double eta_u = 0.0;
  double eta_ocp = 0.0;
  std::optional<ErrorTriple> errors;
  double effectivity = 0.0;
  int optimizer_iterations = 0;
  bool optimizer_converged = true;
  int marked = 0;
  int marked_on_boundary = 0;
};

struct AfemTrace {
  Scheme scheme = Scheme::Semi;
  double theta = 0.5;
  std::vector<AfemRecord> records;
  Mesh final_mesh;
  bool aborted = false;
  std::string diagnostic;
};

// State of one adaptive step handed to observers.
struct AfemStep {
  const Mesh& mesh;
  const Eigen::MatrixXd& A;
  const OptimizerResult& solution;
  const IndicatorField& state;
  const IndicatorField& adjoint;
  const IndicatorField* control;
  const IndicatorField& combined;
};

using ErrorFunction = std::function<ErrorTriple(const AfemStep&)>;
using StepObserver = std::function<void(const AfemStep&, const AfemRecord&)>;

struct AfemConfig {
  Scheme scheme = Scheme::Semi;
  double theta = 0.5;
  bool uniform = false;
  int max_dofs = 4000;
  int max_iterations = 100;
  double tol = 0.0;  // stop once eta_ocp <= tol (disabled when 0)
  double optimizer_tol = 1e-6;
  int optimizer_max_iter = 200;
  QuadratureConfig quadrature;
  ErrorFunction errors;
  StepObserver observer;
  std::function<void(const std::string&)> log;
};

AfemTrace afem_loop(const ProblemSpec& spec, const AfemConfig& cfg);
AfemTrace afem_loop(const ProblemSpec& spec, const AfemConfig& cfg, Mesh initial);

// Columns: iter, N, eta_y, eta_z, eta_u, eta_ocp, err_y, err_z, err_u, eff, opt_iters.
void write_trace_csv(std::ostream& os, const AfemTrace& trace);

}  // namespace fracocp
