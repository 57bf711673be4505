#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "fracocp/kernel.hpp"
#include "fracocp/mesh.hpp"

namespace fracocp {

enum class PairKind { Identical, CommonEdge, CommonVertex, Disjoint };

struct DisjointTier {
  double min_ratio;  // applies when separation ratio >= min_ratio
  int degree;        // triangle rule degree used on both elements
};

struct QuadratureConfig {
  int touching_points = 8;
  // Ordered from far to near; pairs below the last threshold are subdivided.
  std::vector<DisjointTier> disjoint_tiers = {{8.0, 2}, {2.0, 4}, {0.5, 6}};
  int subdivision_depth = 6;
  int angular_points = 32;

  QuadratureConfig doubled() const;
};

struct PairBlock {
  PairKind kind = PairKind::Disjoint;
  std::vector<int> nodes;  // mesh vertex ids, element T first then the new ones of T'
  Eigen::MatrixXd block;
};

PairKind classify_pair(const Mesh& mesh, int T, int Tp);

// (dist(centroids) - r_T - r_T') / max(diam), a lower bound of the gap in units of element size.
double separation_ratio(const Mesh& mesh, int T, int Tp);

// Triangle rule degree for a disjoint pair, 0 when the pair must be subdivided.
int disjoint_degree(double ratio, const QuadratureConfig& cfg);

// Contribution of the ordered pair (T, T') to
// (C/2) * int_T int_T' (phi_i(x) - phi_i(w)) (phi_j(x) - phi_j(w)) |x - w|^{-2-2s}.
PairBlock pair_interaction(const Mesh& mesh, int T, int Tp, const KernelParams& params, const QuadratureConfig& cfg);

// Geometric variants. Vertices are listed with the shared ones first:
// identical (a, b, c); edge (u, v, w | u, v, w'); vertex (u, v1, w1 | u, v2, w2).
// They return int int Psi Psi^T |x - w|^{-2-2s} without the C/2 factor.
Eigen::MatrixXd identical_block(const std::array<Vec2, 3>& t, double s, int n);
Eigen::MatrixXd common_edge_block(const std::array<Vec2, 3>& t, const Vec2& wp, double s, int n);
Eigen::MatrixXd common_vertex_block(const std::array<Vec2, 3>& t, const Vec2& v2, const Vec2& w2, double s, int n);
Eigen::MatrixXd disjoint_block(const std::array<Vec2, 3>& t, const std::array<Vec2, 3>& tp, double s,
                               const QuadratureConfig& cfg);

}  // namespace fracocp
