#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracocp/complement.hpp"
#include "fracocp/kernel.hpp"
#include "fracocp/pair_integrals.hpp"
#include "oracles.hpp"

using namespace fracocp;
using boost::math::quadrature::gauss_kronrod;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Mesh two_far_triangles(double gap) {
  return make_mesh(Domain::Polygon, {{0, 0}, {0.1, 0}, {0, 0.1}, {gap, 0}, {gap + 0.1, 0}, {gap, 0.1}},
                   {{{0, 1, 2}}, {{3, 4, 5}}});
}

}  // namespace

TEST(Kernel, NormalizationConstant) {
  EXPECT_NEAR(normalization_constant(0.5), 1.0 / (2 * std::numbers::pi), 1e-14);
  for (double s : {0.1, 0.25, 0.75, 0.9}) {
    double expect = std::pow(2.0, 2 * s) * s * std::tgamma(1 + s) / (std::numbers::pi * std::tgamma(1 - s));
    EXPECT_NEAR(normalization_constant(s), expect, 1e-13 * expect);
    EXPECT_GT(normalization_constant(s), 0.0);
  }
}

TEST(Kernel, KernelFunctionMatchesPow) {
  for (double s : {0.25, 0.5, 0.75, 0.3})
    for (double r2 : {1e-6, 0.3, 2.0, 50.0}) {
      KernelFunction k(s);
      EXPECT_NEAR(k(r2), std::pow(r2, -1 - s), 1e-13 * std::pow(r2, -1 - s));
    }
}

TEST(Kernel, AngularPrimitiveMatchesQuadrature) {
  for (double s : {0.25, 0.5, 0.75, 0.9})
    for (double psi : {-1.5, -0.7, 0.0, 0.2, 1.0, 1.5707}) {
      double ref = gauss_kronrod<double, 61>::integrate([&](double t) { return std::pow(std::cos(t), 2 * s); }, 0.0,
                                                        psi, 10, 1e-13);
      EXPECT_NEAR(angular_primitive(psi, s), ref, 1e-11) << "s=" << s << " psi=" << psi;
    }
}

TEST(Kernel, EdgeFluxMatchesQuadrature) {
  Vec2 a(0.3, -0.2), b(-0.4, 0.9);
  Vec2 n(b.y() - a.y(), a.x() - b.x());
  double len = n.norm();
  n /= len;
  for (double s : {0.25, 0.75})
    for (Vec2 x : {Vec2(0, 0), Vec2(0.5, 0.5), Vec2(-0.05, 0.33)}) {
      auto g = [&](double t) {
        Vec2 y = a + t * (b - a);
        return (y - x).dot(n) * std::pow((y - x).squaredNorm(), -1 - s) * len;
      };
      double ref = gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 15, 1e-13);
      EXPECT_NEAR(edge_flux(x, a, b, s), ref, 1e-9 * std::max(1.0, std::abs(ref)));
    }
}

TEST(Kernel, TriangleKernelIntegralFarPoint) {
  Vec2 a(0, 0), b(1, 0), c(0, 1), x(2.5, 1.7);
  double s = 0.6;
  auto inner = [&](double u) {
    return gauss_kronrod<double, 31>::integrate(
        [&](double v) { return std::pow((a + u * (b - a) + v * (c - a) - x).squaredNorm(), -1 - s); }, 0.0, 1.0 - u,
        8, 1e-13);
  };
  double ref = gauss_kronrod<double, 31>::integrate(inner, 0.0, 1.0, 8, 1e-13);
  EXPECT_NEAR(triangle_kernel_integral(x, a, b, c, s), ref, 1e-9 * ref);
}

TEST(PairIntegrals, Classification) {
  Mesh m = initial_mesh(Domain::Square, 1);
  int identical = 0, edge = 0, vertex = 0, disjoint = 0;
  for (int T = 0; T < m.num_elements(); ++T)
    for (int Tp = 0; Tp < m.num_elements(); ++Tp) switch (classify_pair(m, T, Tp)) {
        case PairKind::Identical: ++identical; break;
        case PairKind::CommonEdge: ++edge; break;
        case PairKind::CommonVertex: ++vertex; break;
        case PairKind::Disjoint: ++disjoint; break;
      }
  EXPECT_EQ(identical, 8);
  EXPECT_EQ(identical + edge + vertex + disjoint, 64);
  EXPECT_EQ(edge % 2, 0);
}

TEST(PairIntegrals, FarDisjointMidpointOracle) {
  double s = 0.5;
  KernelParams p = make_kernel_params(s);
  Mesh m = two_far_triangles(2.0);
  ASSERT_GE(separation_ratio(m, 0, 1), 10.0);
  // for piecewise constants on T and T' the cross term of the block is -(C/2) int int k
  PairBlock blk = pair_interaction(m, 0, 1, p, {});
  double dist2 = (m.centroids[0] - m.centroids[1]).squaredNorm();
  double oracle = kernel_r2(dist2, s) * m.areas[0] * m.areas[1];
  double cross = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 3; j < 6; ++j) cross += blk.block(i, j);
  EXPECT_NEAR(-2.0 * cross / p.C, oracle, 0.01 * oracle);
}

TEST(PairIntegrals, SwapGivesTransposedBlock) {
  KernelParams p = make_kernel_params(0.75);
  Mesh m = initial_mesh(Domain::Disk, 2);
  for (auto [T, Tp] : {std::pair{0, 1}, std::pair{0, 5}, std::pair{2, 17}}) {
    PairBlock a = pair_interaction(m, T, Tp, p, {});
    PairBlock b = pair_interaction(m, Tp, T, p, {});
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i)
      for (std::size_t j = 0; j < a.nodes.size(); ++j) {
        auto bi = std::find(b.nodes.begin(), b.nodes.end(), a.nodes[i]) - b.nodes.begin();
        auto bj = std::find(b.nodes.begin(), b.nodes.end(), a.nodes[j]) - b.nodes.begin();
        EXPECT_NEAR(a.block(i, j), b.block(bj, bi), 1e-8 * max_abs(a.block));
      }
  }
}

TEST(PairIntegrals, CommonEdgeMatchesSubdivisionOracle) {
  double s = 0.5;
  std::array<Vec2, 3> t = {Vec2(1, 0), Vec2(0, 1), Vec2(0, 0)};
  Vec2 wp(1, 1);
  std::vector<Eigen::MatrixXd> seq;
  for (int L = 2; L <= 4; ++L) seq.push_back(oracle::subdivided_pair(t, {0, 1, 2}, {t[0], t[1], wp}, {0, 1, 3}, 4, s, L));
  Eigen::MatrixXd ref = oracle::richardson(seq, {3 - 2 * s, 4 - 2 * s});
  Eigen::MatrixXd got = common_edge_block(t, wp, s, QuadratureConfig{}.touching_points);
  EXPECT_LE(max_abs(got - ref), 1e-3 * max_abs(ref));
}

TEST(PairIntegrals, RowsSumToZeroForConstants) {
  // Psi vanishes for the constant function, so every row of a block sums to zero
  double s = 0.4;
  std::array<Vec2, 3> t = {Vec2(0, 0), Vec2(1, 0), Vec2(0.2, 0.8)};
  Eigen::MatrixXd B = identical_block(t, s, 8);
  EXPECT_LE(B.rowwise().sum().cwiseAbs().maxCoeff(), 1e-10 * max_abs(B));
  Eigen::MatrixXd E = common_edge_block(t, Vec2(0.9, 0.9), s, 8);
  EXPECT_LE(E.rowwise().sum().cwiseAbs().maxCoeff(), 1e-10 * max_abs(E));
  Eigen::MatrixXd V = common_vertex_block(t, Vec2(-1, 0.1), Vec2(-0.5, -0.9), s, 8);
  EXPECT_LE(V.rowwise().sum().cwiseAbs().maxCoeff(), 1e-10 * max_abs(V));
}

TEST(Complement, DiskCenterHalf) {
  Mesh m = initial_mesh(Domain::Disk, 2);
  for (int k = 0; k < 5; ++k) m = uniform_refine(m);
  AuxiliaryShell sh = auxiliary_shell(m);
  double rho = complement_density(Vec2(0, 0), m, sh, make_kernel_params(0.5));
  EXPECT_NEAR(rho, 2 * std::numbers::pi, 0.005 * 2 * std::numbers::pi);
  double rho_poly = ComplementDensity::from_mesh(m, 0.5)(Vec2(0, 0));
  EXPECT_NEAR(rho_poly, 2 * std::numbers::pi, 0.005 * 2 * std::numbers::pi);
}

TEST(Complement, IncreasesTowardBoundary) {
  Mesh m = initial_mesh(Domain::Disk, 3);
  ComplementDensity rho = ComplementDensity::from_mesh(m, 0.75);
  double prev = 0.0;
  for (double r : {0.0, 0.3, 0.6, 0.8, 0.9}) {
    double v = rho(Vec2(r * std::cos(0.1), r * std::sin(0.1)));
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Complement, ShellTailAtCenter) {
  EXPECT_NEAR(shell_tail(Vec2(0, 0), 1.5, 0.5), 2 * std::numbers::pi / 1.5, 1e-12);
}

TEST(Complement, SquareMatchesPolarIntegral) {
  // rho(0) for the square (-1,1)^2 is 8 int_0^{pi/4} cos(phi)^{2s} dphi / (2s)
  double s = 0.25;
  Mesh m = initial_mesh(Domain::Square, 1);
  ComplementDensity rho = ComplementDensity::from_mesh(m, s);
  double ref = 8.0 * angular_primitive(std::numbers::pi / 4, s) / (2 * s);
  EXPECT_NEAR(rho(Vec2(0, 0)), ref, 1e-10 * ref);
}
