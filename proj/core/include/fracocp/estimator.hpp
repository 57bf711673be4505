#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "fracocp/complement.hpp"
#include "fracocp/control.hpp"
#include "fracocp/fe_function.hpp"
#include "fracocp/kernel.hpp"

namespace fracocp {

enum class IndicatorKind { State, Adjoint, Control, Combined };

// Squared per-element indicators.
struct IndicatorField {
  IndicatorKind kind = IndicatorKind::State;
  Eigen::VectorXd values;
  double total() const { return values.sum(); }
};

// Evaluates (-Delta)^s of P1 functions at points strictly inside elements.
class FracLaplacian {
 public:
  FracLaplacian(const Mesh& mesh, const KernelParams& params);

  double operator()(const FeFunction& v, int e, const Vec2& x) const;
  // Evaluates several functions on the same mesh at once.
  void apply(const std::vector<const FeFunction*>& fns, int e, const Vec2& x, double* out) const;

 private:
  const Mesh* mesh_;
  KernelParams params_;
  KernelFunction kernel_;
  ComplementDensity rho_;
  std::vector<std::array<Vec2, 3>> mid_points_;  // degree-2 rule points per element
  std::vector<std::array<Vec2, 6>> deg4_points_;
};

double eval_frac_laplacian_p1(const FeFunction& v, const Vec2& x, const KernelParams& params);

struct EstimatorConstants {
  double state = 1.0;
  double adjoint = 1.0;
  double control = 1.0;
};

// ||h~^s (f - u y - (-Delta)^s y)||^2 per element.
IndicatorField state_indicator(const Mesh& mesh, const FeFunction& y, const Control& u, const ScalarField& f,
                               const KernelParams& params);
// ||h~^s (y - y_d - u z - (-Delta)^s z)||^2 per element.
IndicatorField adjoint_indicator(const Mesh& mesh, const FeFunction& z, const FeFunction& y, const Control& u,
                                 const ScalarField& yd, const KernelParams& params);
// Both at once, sharing the kernel evaluations.
std::pair<IndicatorField, IndicatorField> state_adjoint_indicators(const Mesh& mesh, const FeFunction& y,
                                                                   const FeFunction& z, const Control& u,
                                                                   const ProblemSpec& spec, const KernelParams& params,
                                                                   int workers = 0);

// ||clamp(y z / lambda) - u||^2 per element, for the fully discrete control.
IndicatorField control_indicator(const Mesh& mesh, const Control& u_full, const FeFunction& y, const FeFunction& z,
                                 const ProblemSpec& spec);

IndicatorField combine_ocp(const IndicatorField& state, const IndicatorField& adjoint, const IndicatorField* control,
                           Scheme scheme, const EstimatorConstants& c = {});

struct ErrorTriple {
  double state = 0.0;    // energy norm
  double adjoint = 0.0;  // energy norm
  double control = 0.0;  // L2 norm
  double total() const;
};

double effectivity_index(double eta_total, const ErrorTriple& errors);

// One line per element: id, eta_y^2, eta_z^2, eta_u^2, eta_ocp^2.
void write_indicators(std::ostream& os, const IndicatorField& state, const IndicatorField& adjoint,
                      const IndicatorField* control, const IndicatorField& combined);

}  // namespace fracocp
