#include "fracocp/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace fracocp {

int worker_count() {
  if (const char* env = std::getenv("FRACOCP_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

namespace {

using Mat3 = Eigen::Matrix3d;

struct WeightedPoint {
  Vec2 x;
  std::array<double, 3> l;
  double w;  // includes the area factor
};

struct ElementRule {
  std::vector<Vec2> x;
  std::vector<Eigen::Vector3d> l;
  std::vector<double> w;  // w_i * |T|
};

void scatter(Eigen::MatrixXd& A, const std::vector<int>& dofs, const Eigen::MatrixXd& B, double scale) {
  const int n = static_cast<int>(dofs.size());
  for (int i = 0; i < n; ++i) {
    if (dofs[i] < 0) continue;
    for (int j = 0; j < n; ++j)
      if (dofs[j] >= 0) A(dofs[i], dofs[j]) += scale * B(i, j);
  }
}

// Quadrature points for int_T g(x) rho(x) when rho is singular on the part of
// the boundary touching T.
std::vector<WeightedPoint> graded_vertex_rule(const Vec2& V, const Vec2& P, const Vec2& Q,
                                              const std::array<double, 3>& lV, const std::array<double, 3>& lP,
                                              const std::array<double, 3>& lQ, int n) {
  const GaussRule& g = gauss_legendre(n);
  double twice = std::abs((P - V).x() * (Q - V).y() - (P - V).y() * (Q - V).x());
  std::vector<WeightedPoint> out;
  for (int i = 0; i < n; ++i) {
    double u = g.x[i], r = u * u * u, dr = 3.0 * u * u;
    for (int j = 0; j < n; ++j) {
      double t = g.x[j];
      double a = r * (1.0 - t), b = r * t;
      WeightedPoint wp;
      wp.x = V + a * (P - V) + b * (Q - V);
      for (int k = 0; k < 3; ++k) wp.l[k] = (1.0 - a - b) * lV[k] + a * lP[k] + b * lQ[k];
      wp.w = g.w[i] * g.w[j] * dr * r * twice;
      out.push_back(wp);
    }
  }
  return out;
}

std::vector<WeightedPoint> graded_edge_rule(const Vec2& A, const Vec2& B, const Vec2& C, const std::array<double, 3>& lA,
                                            const std::array<double, 3>& lB, const std::array<double, 3>& lC, int n) {
  const GaussRule& g = gauss_legendre(n);
  double twice = std::abs((B - A).x() * (C - A).y() - (B - A).y() * (C - A).x());
  std::vector<WeightedPoint> out;
  for (int i = 0; i < n; ++i) {
    double u = g.x[i], d = u * u * u, dd = 3.0 * u * u;
    for (int half = 0; half < 2; ++half)
      for (int j = 0; j < n; ++j) {
        double v = g.x[j], tt = 0.5 * v * v, dt = v;
        double t = half == 0 ? tt : 1.0 - tt;
        WeightedPoint wp;
        wp.x = (1.0 - d) * (A + t * (B - A)) + d * C;
        for (int k = 0; k < 3; ++k) wp.l[k] = (1.0 - d) * ((1.0 - t) * lA[k] + t * lB[k]) + d * lC[k];
        wp.w = g.w[i] * g.w[j] * dd * dt * (1.0 - d) * twice;
        out.push_back(wp);
      }
  }
  return out;
}

Mat3 outer(const std::array<double, 3>& l) {
  Eigen::Vector3d v(l[0], l[1], l[2]);
  return v * v.transpose();
}

Mat3 rule_on_sub(const std::array<Vec2, 3>& p, const std::array<std::array<double, 3>, 3>& L, const ComplementDensity& rho,
                 int degree) {
  const TriangleRule& q = triangle_rule(degree);
  double area = 0.5 * std::abs((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
  Mat3 m = Mat3::Zero();
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::array<double, 3> l{};
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 3; ++c) l[c] += q.bary[i][k] * L[k][c];
    m += q.w[i] * area * rho(bary_point(p[0], p[1], p[2], q.bary[i])) * outer(l);
  }
  return m;
}

using SubTriangle = std::pair<std::array<Vec2, 3>, std::array<std::array<double, 3>, 3>>;

std::array<SubTriangle, 4> split4(const std::array<Vec2, 3>& p, const std::array<std::array<double, 3>, 3>& L) {
  auto mid = [&](int i, int j) {
    std::array<double, 3> l;
    for (int k = 0; k < 3; ++k) l[k] = 0.5 * (L[i][k] + L[j][k]);
    return std::make_pair(Vec2(0.5 * (p[i] + p[j])), l);
  };
  auto [a, la] = mid(0, 1);
  auto [b, lb] = mid(1, 2);
  auto [c, lc] = mid(2, 0);
  return {SubTriangle{{p[0], a, c}, {L[0], la, lc}}, SubTriangle{{a, p[1], b}, {la, L[1], lb}},
          SubTriangle{{c, b, p[2]}, {lc, lb, L[2]}}, SubTriangle{{a, b, c}, {la, lb, lc}}};
}

// int_T lambda lambda^T rho restricted to entries of interior nodes.
Mat3 element_rho_matrix(const Mesh& mesh, int e, const ComplementDensity& rho, double bdist) {
  const auto& t = mesh.elements[e];
  const std::array<Vec2, 3> p = {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
  const std::array<std::array<double, 3>, 3> I = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  std::array<bool, 3> bv = {mesh.boundary[t[0]] != 0, mesh.boundary[t[1]] != 0, mesh.boundary[t[2]] != 0};
  int nb = bv[0] + bv[1] + bv[2];
  if (nb == 3) return Mat3::Zero();
  auto sum_points = [&](const std::vector<WeightedPoint>& pts) {
    Mat3 m = Mat3::Zero();
    for (const auto& wp : pts) m += wp.w * rho(wp.x) * outer(wp.l);
    return m;
  };
  const int n = 7;
  if (nb == 1) {
    int v = bv[0] ? 0 : bv[1] ? 1 : 2;
    int a = (v + 1) % 3, b = (v + 2) % 3;
    return sum_points(graded_vertex_rule(p[v], p[a], p[b], I[v], I[a], I[b], n));
  }
  if (nb == 2) {
    int c = !bv[0] ? 0 : !bv[1] ? 1 : 2;
    int a = (c + 1) % 3, b = (c + 2) % 3;
    bool edge_on_boundary = false;
    for (const auto& be : mesh.boundary_edges)
      if ((be[0] == t[a] && be[1] == t[b]) || (be[0] == t[b] && be[1] == t[a])) edge_on_boundary = true;
    if (edge_on_boundary) return sum_points(graded_edge_rule(p[a], p[b], p[c], I[a], I[b], I[c], n));
    Vec2 m = 0.5 * (p[a] + p[b]);
    std::array<double, 3> lm{};
    lm[a] = lm[b] = 0.5;
    return sum_points(graded_vertex_rule(p[a], m, p[c], I[a], lm, I[c], n)) +
           sum_points(graded_vertex_rule(p[b], p[c], m, I[b], I[c], lm, n));
  }
  double ratio = bdist / mesh.diams[e];
  if (ratio >= 1.0) return rule_on_sub(p, I, rho, 6);
  if (ratio >= 0.25) return rule_on_sub(p, I, rho, 12);
  Mat3 sum = Mat3::Zero();
  for (const auto& [cp, cl] : split4(p, I)) sum += rule_on_sub(cp, cl, rho, 12);
  return sum;
}

struct TierRules {
  std::vector<ElementRule> per_element;
};

ElementRule make_rule(const Mesh& mesh, int e, int degree) {
  const TriangleRule& q = triangle_rule(degree);
  ElementRule r;
  for (std::size_t i = 0; i < q.size(); ++i) {
    r.x.push_back(mesh.point(e, q.bary[i]));
    r.l.emplace_back(q.bary[i][0], q.bary[i][1], q.bary[i][2]);
    r.w.push_back(q.w[i] * mesh.areas[e]);
  }
  return r;
}

}  // namespace

Eigen::MatrixXd assemble_complement_term(const Mesh& mesh, const KernelParams& params, const ComplementDensity& rho) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(mesh.num_dofs, mesh.num_dofs);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double bdist = rho.boundary_distance(mesh.centroids[e]) - mesh.radii[e];
    scatter(A, mesh.element_dofs(e), element_rho_matrix(mesh, e, rho, bdist), params.C);
  }
  return A;
}

Eigen::MatrixXd assemble_stiffness(const Mesh& mesh, const KernelParams& params, const QuadratureConfig& cfg,
                                   int workers) {
  const int ne = mesh.num_elements();
  const int nd = mesh.num_dofs;
  const double s = params.s, C = params.C;
  if (workers <= 0) workers = worker_count();
  workers = std::max(1, std::min(workers, ne));
  const KernelFunction kern(s);
  const int ntiers = static_cast<int>(cfg.disjoint_tiers.size());

  std::vector<TierRules> tiers(ntiers);
  for (int k = 0; k < ntiers; ++k)
    for (int e = 0; e < ne; ++e) tiers[k].per_element.push_back(make_rule(mesh, e, cfg.disjoint_tiers[k].degree));
  std::vector<std::vector<int>> dofs(ne);
  for (int e = 0; e < ne; ++e) dofs[e] = mesh.element_dofs(e);

  struct Local {
    Eigen::MatrixXd A;
    std::vector<std::vector<std::vector<double>>> row;  // [tier][element][point]
  };
  std::vector<Local> locals(workers);

  auto work = [&](int wid) {
    Local& L = locals[wid];
    L.A = Eigen::MatrixXd::Zero(nd, nd);
    L.row.assign(ntiers, {});
    for (int k = 0; k < ntiers; ++k) {
      L.row[k].resize(ne);
      for (int e = 0; e < ne; ++e) L.row[k][e].assign(tiers[k].per_element[e].w.size(), 0.0);
    }
    std::vector<char> touching(ne, 0);
    std::vector<int> touched;
    for (int T = wid; T < ne; T += workers) {
      if (dofs[T][0] < 0 && dofs[T][1] < 0 && dofs[T][2] < 0) {
        // Boundary-only elements still couple through the cross terms of other pairs.
      }
      touched.clear();
      for (int v : mesh.elements[T])
        for (int Tp : mesh.vertex_elements[v])
          if (!touching[Tp]) {
            touching[Tp] = 1;
            touched.push_back(Tp);
          }
      for (int Tp : touched) {
        if (Tp < T) continue;
        PairBlock pb = pair_interaction(mesh, T, Tp, params, cfg);
        std::vector<int> d(pb.nodes.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = mesh.dof[pb.nodes[i]];
        scatter(L.A, d, pb.block, Tp == T ? 1.0 : 2.0);
      }
      const Vec2& cT = mesh.centroids[T];
      for (int Tp = T + 1; Tp < ne; ++Tp) {
        if (touching[Tp]) continue;
        double ratio =
            ((cT - mesh.centroids[Tp]).norm() - mesh.radii[T] - mesh.radii[Tp]) / std::max(mesh.diams[T], mesh.diams[Tp]);
        int tier = -1;
        for (int k = 0; k < ntiers; ++k)
          if (ratio >= cfg.disjoint_tiers[k].min_ratio) {
            tier = k;
            break;
          }
        bool has1 = dofs[T][0] >= 0 || dofs[T][1] >= 0 || dofs[T][2] >= 0;
        bool has2 = dofs[Tp][0] >= 0 || dofs[Tp][1] >= 0 || dofs[Tp][2] >= 0;
        if (!has1 && !has2) continue;
        if (tier < 0) {
          PairBlock pb = pair_interaction(mesh, T, Tp, params, cfg);
          std::vector<int> d(6);
          for (int i = 0; i < 6; ++i) d[i] = mesh.dof[pb.nodes[i]];
          scatter(L.A, d, pb.block, 2.0);
          continue;
        }
        const ElementRule& r1 = tiers[tier].per_element[T];
        const ElementRule& r2 = tiers[tier].per_element[Tp];
        auto& row1 = L.row[tier][T];
        auto& row2 = L.row[tier][Tp];
        Mat3 cross = Mat3::Zero();
        const std::size_t n1 = r1.w.size(), n2 = r2.w.size();
        for (std::size_t i = 0; i < n1; ++i) {
          double acc_i = 0.0;
          Eigen::Vector3d ly = Eigen::Vector3d::Zero();
          for (std::size_t j = 0; j < n2; ++j) {
            double k = kern((r1.x[i] - r2.x[j]).squaredNorm());
            double kw = k * r2.w[j];
            acc_i += kw;
            row2[j] += k * r1.w[i];
            ly += kw * r2.l[j];
          }
          row1[i] += acc_i;
          cross.noalias() += r1.w[i] * r1.l[i] * ly.transpose();
        }
        for (int a = 0; a < 3; ++a) {
          int da = dofs[T][a];
          if (da < 0) continue;
          for (int b = 0; b < 3; ++b) {
            int db = dofs[Tp][b];
            if (db < 0) continue;
            double v = C * cross(a, b);
            L.A(da, db) -= v;
            L.A(db, da) -= v;
          }
        }
      }
      for (int Tp : touched) touching[Tp] = 0;
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  Eigen::MatrixXd A = std::move(locals[0].A);
  for (int w = 1; w < workers; ++w) {
    A += locals[w].A;
    for (int k = 0; k < ntiers; ++k)
      for (int e = 0; e < ne; ++e)
        for (std::size_t i = 0; i < locals[0].row[k][e].size(); ++i) locals[0].row[k][e][i] += locals[w].row[k][e][i];
    locals[w] = Local{};
  }
  for (int e = 0; e < ne; ++e) {
    Mat3 m = Mat3::Zero();
    for (int k = 0; k < ntiers; ++k) {
      const ElementRule& r = tiers[k].per_element[e];
      for (std::size_t i = 0; i < r.w.size(); ++i) m += r.w[i] * locals[0].row[k][e][i] * (r.l[i] * r.l[i].transpose());
    }
    scatter(A, dofs[e], m, C);
  }
  A += assemble_complement_term(mesh, params, ComplementDensity::from_mesh(mesh, s));
  return A;
}

Eigen::MatrixXd assemble_weighted_mass(const Mesh& mesh, const ElementField& u, int degree, bool all_nodes) {
  const int n = all_nodes ? mesh.num_vertices() : mesh.num_dofs;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  const TriangleRule& q = triangle_rule(degree);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Mat3 m = Mat3::Zero();
    for (std::size_t i = 0; i < q.size(); ++i) {
      double val = u(e, q.bary[i], mesh.point(e, q.bary[i]));
      if (val < 0) throw std::domain_error("assemble_weighted_mass: negative coefficient");
      m += q.w[i] * val * outer(q.bary[i]);
    }
    std::vector<int> d(3);
    for (int k = 0; k < 3; ++k) d[k] = all_nodes ? mesh.elements[e][k] : mesh.dof[mesh.elements[e][k]];
    scatter(M, d, m, mesh.areas[e]);
  }
  return M;
}

Eigen::MatrixXd assemble_piecewise_constant_mass(const Mesh& mesh, const Eigen::VectorXd& u, bool all_nodes) {
  const int n = all_nodes ? mesh.num_vertices() : mesh.num_dofs;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Mat3 ref;
  ref << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (u[e] < 0) throw std::domain_error("assemble_piecewise_constant_mass: negative coefficient");
    std::vector<int> d(3);
    for (int k = 0; k < 3; ++k) d[k] = all_nodes ? mesh.elements[e][k] : mesh.dof[mesh.elements[e][k]];
    scatter(M, d, ref, u[e] * mesh.areas[e] / 12.0);
  }
  return M;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ElementField& f, int degree, bool all_nodes) {
  const int n = all_nodes ? mesh.num_vertices() : mesh.num_dofs;
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
  const TriangleRule& q = triangle_rule(degree);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::Vector3d loc = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < q.size(); ++i) {
      double val = f(e, q.bary[i], mesh.point(e, q.bary[i]));
      for (int k = 0; k < 3; ++k) loc[k] += q.w[i] * val * q.bary[i][k];
    }
    for (int k = 0; k < 3; ++k) {
      int d = all_nodes ? mesh.elements[e][k] : mesh.dof[mesh.elements[e][k]];
      if (d >= 0) F[d] += mesh.areas[e] * loc[k];
    }
  }
  return F;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f, int degree, bool all_nodes) {
  return assemble_load(mesh, ElementField([&](int, const std::array<double, 3>&, const Vec2& x) { return f(x); }),
                       degree, all_nodes);
}

void write_dense_matrix(std::ostream& os, const Eigen::MatrixXd& A) {
  os.precision(17);
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) os << (j ? " " : "") << A(i, j);
    os << "\n";
  }
}

}  // namespace fracocp
