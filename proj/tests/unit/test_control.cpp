#include <gtest/gtest.h>

#include <cmath>

#include "fracocp/control.hpp"
#include "fracocp/experiments.hpp"

using namespace fracocp;

namespace {

ProblemSpec saturated_spec(double s) {
  ProblemSpec spec;
  spec.s = s;
  spec.lambda = 0.01;
  spec.a = 0.4;
  spec.b = 1.5;
  spec.f = [](const Vec2&) { return 10.0; };
  spec.yd = [](const Vec2&) { return -100.0; };
  return spec;
}

Mesh unit_triangle() { return make_mesh(Domain::Polygon, {{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}}); }

// FeFunction on a single triangle whose "interior" nodes are all three vertices.
Mesh free_triangle() {
  Mesh m = unit_triangle();
  m.boundary.assign(3, 0);
  m.dof = {0, 1, 2};
  m.num_dofs = 3;
  return m;
}

}  // namespace

TEST(Clamp, Values) {
  EXPECT_EQ(clamp(2.0, 0.4, 1.5), 1.5);
  EXPECT_EQ(clamp(0.1, 0.4, 1.5), 0.4);
  EXPECT_EQ(clamp(1.0, 0.4, 1.5), 1.0);
  EXPECT_THROW(clamp(1.0, 2.0, 1.0), std::invalid_argument);
}

TEST(Clamp, IdempotentAndMonotone) {
  double prev = -1e300;
  for (double v = -2; v <= 3; v += 0.01) {
    double c = clamp(v, 0.4, 1.5);
    EXPECT_EQ(clamp(c, 0.4, 1.5), c);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(ProblemSpec, Validation) {
  ProblemSpec spec = setup_example1(0.5);
  EXPECT_NO_THROW(spec.validate());
  spec.a = 2.0;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = setup_example1(0.5);
  spec.lambda = 0.0;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  EXPECT_THROW(parse_scheme("half"), std::invalid_argument);
  EXPECT_EQ(parse_scheme("full"), Scheme::Full);
  EXPECT_EQ(scheme_name(Scheme::Semi), "semi");
}

TEST(ControlUpdateFull, ConstantProductGivesClampedConstant) {
  Mesh m = free_triangle();
  ProblemSpec spec = setup_example1(0.5, 1.0, 0.4, 1.5);
  for (double c : {0.2, 0.9, 2.0}) {
    FeFunction y(m, Eigen::Vector3d::Constant(std::sqrt(c)));
    Control u = control_update_full(m, y, y, spec);
    EXPECT_NEAR(u.values()[0], clamp(c, 0.4, 1.5), 1e-14);
  }
}

TEST(ControlUpdateFull, HatProductOnUnitTriangle) {
  Mesh m = free_triangle();
  ProblemSpec spec = setup_example1(0.5, 0.1, 0.4, 1.5);
  FeFunction y(m, Eigen::Vector3d(1, 0, 0));
  Control u = control_update_full(m, y, y, spec);
  EXPECT_NEAR(u.values()[0], 1.5, 1e-14);
  ProblemSpec wide = setup_example1(0.5, 0.1, 0.4, 5.0);
  EXPECT_NEAR(control_update_full(m, y, y, wide).values()[0], 5.0 / 3.0, 1e-13);
}

TEST(ControlUpdateFull, SaturatedEverywhere) {
  Mesh m = initial_mesh(Domain::Disk, 2);
  ProblemSpec spec = setup_example1(0.5, 0.01, 0.4, 1.5);
  FeFunction y = interpolate(m, [](const Vec2& x) { return 10.0 * (1.2 - x.squaredNorm()); });
  // boundary values vanish but the element averages stay large
  Control u = control_update_full(m, y, y, spec);
  EXPECT_EQ(u.values().minCoeff(), 1.5);
}

TEST(ControlUpdateSemi, PointwiseProjection) {
  Mesh m = initial_mesh(Domain::Disk, 2);
  ProblemSpec spec = setup_example1(0.5, 0.5, 0.4, 1.5);
  FeFunction y = interpolate(m, [](const Vec2& x) { return 1 - x.squaredNorm(); });
  Control u = control_update_semi(y, y, spec);
  const TriangleRule& r = triangle_rule(6);
  for (int e = 0; e < m.num_elements(); ++e)
    for (std::size_t q = 0; q < r.size(); ++q) {
      double yv = y.eval(e, r.bary[q]);
      double val = u(e, r.bary[q]);
      EXPECT_GE(val, 0.4);
      EXPECT_LE(val, 1.5);
      if (yv * yv / 0.5 > 0.4 && yv * yv / 0.5 < 1.5) EXPECT_NEAR(val, yv * yv / 0.5, 1e-14);
    }
  // on the boundary y vanishes, so the lower bound is active
  int e = m.vertex_elements[m.elements[0][0]][0];
  for (int k = 0; k < 3; ++k)
    if (m.boundary[m.elements[e][k]]) {
      std::array<double, 3> l = {0, 0, 0};
      l[k] = 1;
      EXPECT_EQ(u(e, l), 0.4);
    }
}

TEST(CostFunctional, ZeroWhenTrackingExactAndControlZero) {
  Mesh m = initial_mesh(Domain::Disk, 2);
  FeFunction y = interpolate(m, [](const Vec2& x) { return 1 - x.squaredNorm(); });
  ProblemSpec spec = setup_example1(0.5, 0.1, 0.0, 1.5);
  spec.yd = [&](const Vec2& x) { return fe_eval(y, x); };
  EXPECT_NEAR(cost_functional(y, Control::constant(m, 0.0), spec), 0.0, 1e-14);
}

TEST(CostFunctional, LowerBoundFromControlBounds) {
  Mesh m = initial_mesh(Domain::Disk, 2);
  ProblemSpec spec = setup_example1(0.5);
  FeFunction y = interpolate(m, [](const Vec2& x) { return std::cos(x.x()); });
  double area = 0.0;
  for (double a : m.areas) area += a;
  Control u = control_update_semi(y, y, spec);
  EXPECT_GE(cost_functional(y, u, spec), 0.5 * spec.lambda * spec.a * spec.a * area);
}

TEST(Optimizer, FixedPointReturnsAfterOneIteration) {
  ProblemSpec spec = saturated_spec(0.5);
  Mesh m = initial_mesh(Domain::Square, 1);
  Eigen::MatrixXd A = assemble_stiffness(m, make_kernel_params(spec.s));
  for (Scheme scheme : {Scheme::Full, Scheme::Semi}) {
    OptimizerResult first = projection_gradient_solve(m, A, spec, scheme, Control::constant(m, spec.b));
    ASSERT_TRUE(first.converged);
    OptimizerResult again = projection_gradient_solve(m, A, spec, scheme, first.u);
    EXPECT_EQ(again.iterations, 1);
    EXPECT_LE(again.error, 1e-6);
  }
  OptimizerResult full = projection_gradient_solve(m, A, spec, Scheme::Full, Control::constant(m, spec.b));
  EXPECT_EQ(full.iterations, 1);
  EXPECT_EQ(full.error, 0.0);
}

TEST(Optimizer, ExampleOneControlWithinBounds) {
  ProblemSpec spec = setup_example1(0.75);
  Mesh m = uniform_refine(initial_mesh(Domain::Disk, 2));
  Eigen::MatrixXd A = assemble_stiffness(m, make_kernel_params(spec.s));
  for (Scheme scheme : {Scheme::Full, Scheme::Semi}) {
    OptimizerResult res =
        projection_gradient_solve(m, A, spec, scheme, Control::constant(m, 0.5 * (spec.a + spec.b)), 1e-6, 200);
    ASSERT_TRUE(res.converged);
    EXPECT_LE(res.iterations, 200);
    if (scheme == Scheme::Full) {
      EXPECT_GE(res.u.values().minCoeff(), 0.4);
      EXPECT_LE(res.u.values().maxCoeff(), 1.5);
    }
    for (std::size_t k = 1; k + 1 < res.log.size(); ++k)
      if (res.log[k].cost > res.log[k - 1].cost + 1e-10 * std::max(1.0, res.log[k - 1].cost))
        EXPECT_LE(res.log[k + 1].damping, 0.5 * res.log[k].damping) << "cost increase at iteration " << k;
    EXPECT_LE(res.log.back().cost, res.log.front().cost);
  }
}

TEST(Optimizer, FullSchemeVariationalInequality) {
  ProblemSpec spec = setup_example1(0.75);
  Mesh m = uniform_refine(initial_mesh(Domain::Disk, 2));
  Eigen::MatrixXd A = assemble_stiffness(m, make_kernel_params(spec.s));
  OptimizerResult res = projection_gradient_solve(m, A, spec, Scheme::Full, Control::constant(m, 1.0), 1e-10, 400);
  ASSERT_TRUE(res.converged);
  const TriangleRule& r = triangle_rule(4);
  for (int e = 0; e < m.num_elements(); ++e) {
    double yz = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) yz += r.w[q] * res.y.eval(e, r.bary[q]) * res.z.eval(e, r.bary[q]);
    yz *= m.areas[e];
    double u = res.u.values()[e];
    double g = spec.lambda * u * m.areas[e] - yz;
    for (double v : {spec.a, spec.b, 0.5 * (spec.a + spec.b)}) EXPECT_GE(g * (v - u), -1e-6 * m.areas[e]);
  }
}

TEST(Optimizer, RejectsNonPositiveTolerance) {
  ProblemSpec spec = setup_example1(0.5);
  Mesh m = initial_mesh(Domain::Disk, 1);
  Eigen::MatrixXd A = assemble_stiffness(m, make_kernel_params(spec.s));
  EXPECT_THROW(projection_gradient_solve(m, A, spec, Scheme::Full, Control::constant(m, 1.0), 0.0),
               std::invalid_argument);
}
