#include "fracocp/pair_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracocp {
namespace {

using Mat = Eigen::MatrixXd;

double tri_area(const std::array<Vec2, 3>& t) {
  return 0.5 * std::abs((t[1] - t[0]).x() * (t[2] - t[0]).y() - (t[1] - t[0]).y() * (t[2] - t[0]).x());
}

template <int N>
void add_outer(Mat& m, const Eigen::Matrix<double, N, 1>& psi, double w) {
  m.noalias() += (w * psi) * psi.transpose();
}

struct Sub {
  std::array<Vec2, 3> p;
  std::array<std::array<double, 3>, 3> L;  // parent barycentrics of the corners
};

Sub root(const std::array<Vec2, 3>& t) { return {t, {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}}; }

std::array<Sub, 4> split(const Sub& s) {
  auto mid = [&](int i, int j) {
    std::array<double, 3> l;
    for (int k = 0; k < 3; ++k) l[k] = 0.5 * (s.L[i][k] + s.L[j][k]);
    return std::make_pair(Vec2(0.5 * (s.p[i] + s.p[j])), l);
  };
  auto [p01, l01] = mid(0, 1);
  auto [p12, l12] = mid(1, 2);
  auto [p20, l20] = mid(2, 0);
  return {Sub{{s.p[0], p01, p20}, {s.L[0], l01, l20}}, Sub{{p01, s.p[1], p12}, {l01, s.L[1], l12}},
          Sub{{p20, p12, s.p[2]}, {l20, l12, s.L[2]}}, Sub{{p01, p12, p20}, {l01, l12, l20}}};
}

struct Shape {
  Vec2 c;
  double r, diam;
};

Shape shape(const std::array<Vec2, 3>& p) {
  Vec2 c = (p[0] + p[1] + p[2]) / 3.0;
  double r = std::max({(p[0] - c).norm(), (p[1] - c).norm(), (p[2] - c).norm()});
  double d = std::max({(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[0] - p[2]).norm()});
  return {c, r, d};
}

double ratio_of(const Shape& a, const Shape& b) {
  return ((a.c - b.c).norm() - a.r - b.r) / std::max(a.diam, b.diam);
}

void tensor_disjoint(const Sub& A, const Sub& B, double s, int degree, Mat& block) {
  const TriangleRule& q = triangle_rule(degree);
  const double wa = tri_area(A.p), wb = tri_area(B.p);
  const std::size_t n = q.size();
  std::vector<Vec2> xa(n), xb(n);
  std::vector<Eigen::Matrix<double, 6, 1>> pa(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    xa[i] = bary_point(A.p[0], A.p[1], A.p[2], q.bary[i]);
    xb[i] = bary_point(B.p[0], B.p[1], B.p[2], q.bary[i]);
    pa[i].setZero();
    pb[i].setZero();
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m) {
        pa[i][m] += q.bary[i][k] * A.L[k][m];
        pb[i][3 + m] -= q.bary[i][k] * B.L[k][m];
      }
  }
  Eigen::Matrix<double, 6, 6> acc = Eigen::Matrix<double, 6, 6>::Zero();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Eigen::Matrix<double, 6, 1> psi = pa[i] + pb[j];
      acc.noalias() += (q.w[i] * q.w[j] * kernel_r2((xa[i] - xb[j]).squaredNorm(), s)) * psi * psi.transpose();
    }
  block += wa * wb * acc;
}

void recurse_disjoint(const Sub& A, const Sub& B, double s, const QuadratureConfig& cfg, int depth, Mat& block) {
  Shape sa = shape(A.p), sb = shape(B.p);
  int deg = disjoint_degree(ratio_of(sa, sb), cfg);
  if (deg == 0 && depth >= cfg.subdivision_depth) deg = cfg.disjoint_tiers.back().degree;
  if (deg > 0) {
    tensor_disjoint(A, B, s, deg, block);
    return;
  }
  if (sa.diam >= sb.diam) {
    for (const Sub& c : split(A)) recurse_disjoint(c, B, s, cfg, depth + 1, block);
  } else {
    for (const Sub& c : split(B)) recurse_disjoint(A, c, s, cfg, depth + 1, block);
  }
}

Eigen::Matrix2d frame(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  Eigen::Matrix2d B;
  B.col(0) = p1 - p0;
  B.col(1) = p2 - p1;
  return B;
}

}  // namespace

QuadratureConfig QuadratureConfig::doubled() const {
  QuadratureConfig c = *this;
  c.touching_points *= 2;
  for (auto& t : c.disjoint_tiers) t.degree = std::min(30, 2 * t.degree);
  c.angular_points *= 2;
  return c;
}

PairKind classify_pair(const Mesh& mesh, int T, int Tp) {
  if (T == Tp) return PairKind::Identical;
  int shared = 0;
  for (int a : mesh.elements[T])
    for (int b : mesh.elements[Tp]) shared += (a == b);
  switch (shared) {
    case 3:
      return PairKind::Identical;
    case 2:
      return PairKind::CommonEdge;
    case 1:
      return PairKind::CommonVertex;
    default:
      return PairKind::Disjoint;
  }
}

double separation_ratio(const Mesh& mesh, int T, int Tp) {
  return ((mesh.centroids[T] - mesh.centroids[Tp]).norm() - mesh.radii[T] - mesh.radii[Tp]) /
         std::max(mesh.diams[T], mesh.diams[Tp]);
}

int disjoint_degree(double ratio, const QuadratureConfig& cfg) {
  for (const auto& t : cfg.disjoint_tiers)
    if (ratio >= t.min_ratio) return t.degree;
  return 0;
}

Eigen::MatrixXd identical_block(const std::array<Vec2, 3>& t, double s, int n) {
  const Eigen::Matrix2d B = frame(t[0], t[1], t[2]);
  const GaussRule& g = gauss_legendre(n);
  Mat block = Mat::Zero(3, 3);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    double c = g.x[i];
    const Eigen::Vector2d dirs[3] = {{c, 1.0}, {1.0, c}, {-c, 1.0 - c}};
    for (const auto& d : dirs) {
      Eigen::Vector3d psi(-d.x(), d.x() - d.y(), d.y());
      add_outer<3>(block, psi, 2.0 * g.w[i] * kernel_r2((B * d).squaredNorm(), s));
    }
  }
  double area = tri_area(t);
  return block * (4.0 * area * area / ((4.0 - 2.0 * s) * (3.0 - 2.0 * s) * (2.0 - 2.0 * s)));
}

Eigen::MatrixXd common_edge_block(const std::array<Vec2, 3>& t, const Vec2& wp, double s, int n) {
  const Vec2 &u = t[0], &v = t[1], &w = t[2];
  const GaussRule& g = gauss_legendre(n);
  Mat block = Mat::Zero(4, 4);
  for (std::size_t i = 0; i < g.x.size(); ++i)
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      double b = g.x[i], c = g.x[j], wt = g.w[i] * g.w[j];
      struct R {
        double x1, x2, y1, y2, J;
      };
      const R regions[5] = {{1.0, c, 1.0 - b, 1.0 - b, 1.0},
                            {1.0, 1.0, 1.0 - b * c, b * (1.0 - c), b},
                            {1.0 - b, 1.0 - b, 1.0, b * c, b},
                            {1.0 - b * c, b * (1.0 - c), 1.0, 1.0, b},
                            {1.0 - b * c, 1.0 - b * c, 1.0, b, b}};
      for (const R& r : regions) {
        double z1 = r.x1 - r.y1;
        Eigen::Vector4d psi(-z1, z1 - r.x2 + r.y2, r.x2, -r.y2);
        Vec2 diff = (v - u) * z1 + (w - v) * r.x2 - (wp - v) * r.y2;
        add_outer<4>(block, psi, wt * r.J * kernel_r2(diff.squaredNorm(), s));
      }
    }
  double a1 = tri_area(t), a2 = tri_area({u, v, wp});
  return block * (4.0 * a1 * a2 / ((4.0 - 2.0 * s) * (3.0 - 2.0 * s)));
}

Eigen::MatrixXd common_vertex_block(const std::array<Vec2, 3>& t, const Vec2& v2, const Vec2& w2, double s, int n) {
  const Eigen::Matrix2d B1 = frame(t[0], t[1], t[2]);
  const Eigen::Matrix2d B2 = frame(t[0], v2, w2);
  const GaussRule& g = gauss_legendre(n);
  Mat block = Mat::Zero(5, 5);
  for (std::size_t i = 0; i < g.x.size(); ++i)
    for (std::size_t j = 0; j < g.x.size(); ++j)
      for (std::size_t k = 0; k < g.x.size(); ++k) {
        double a = g.x[i], b = g.x[j], c = g.x[k], wt = g.w[i] * g.w[j] * g.w[k] * b;
        const Eigen::Vector2d p1(1.0, a), p2(b, b * c);
        for (int r = 0; r < 2; ++r) {
          const Eigen::Vector2d& xh = r == 0 ? p1 : p2;
          const Eigen::Vector2d& yh = r == 0 ? p2 : p1;
          Eigen::Matrix<double, 5, 1> psi;
          psi << yh.x() - xh.x(), xh.x() - xh.y(), xh.y(), -(yh.x() - yh.y()), -yh.y();
          add_outer<5>(block, psi, wt * kernel_r2((B1 * xh - B2 * yh).squaredNorm(), s));
        }
      }
  double a1 = tri_area(t), a2 = tri_area({t[0], v2, w2});
  return block * (4.0 * a1 * a2 / (4.0 - 2.0 * s));
}

Eigen::MatrixXd disjoint_block(const std::array<Vec2, 3>& t, const std::array<Vec2, 3>& tp, double s,
                               const QuadratureConfig& cfg) {
  Mat block = Mat::Zero(6, 6);
  recurse_disjoint(root(t), root(tp), s, cfg, 0, block);
  return block;
}

PairBlock pair_interaction(const Mesh& mesh, int T, int Tp, const KernelParams& params, const QuadratureConfig& cfg) {
  if (T < 0 || Tp < 0 || T >= mesh.num_elements() || Tp >= mesh.num_elements())
    throw std::out_of_range("pair_interaction: invalid element id");
  if (!(mesh.areas[T] > 0) || !(mesh.areas[Tp] > 0)) throw std::domain_error("pair_interaction: degenerate element");
  const auto& e1 = mesh.elements[T];
  const auto& e2 = mesh.elements[Tp];
  auto X = [&](int v) { return mesh.vertices[v]; };
  auto in = [](const std::array<int, 3>& e, int v) { return std::find(e.begin(), e.end(), v) != e.end(); };
  PairBlock out;
  out.kind = classify_pair(mesh, T, Tp);
  const double s = params.s, half = 0.5 * params.C;
  switch (out.kind) {
    case PairKind::Identical:
      out.nodes = {e1[0], e1[1], e1[2]};
      out.block = half * identical_block({X(e1[0]), X(e1[1]), X(e1[2])}, s, cfg.touching_points);
      break;
    case PairKind::CommonEdge: {
      std::vector<int> sh, o1;
      for (int v : e1) (in(e2, v) ? sh : o1).push_back(v);
      int op = -1;
      for (int v : e2)
        if (!in(e1, v)) op = v;
      out.nodes = {sh[0], sh[1], o1[0], op};
      out.block = half * common_edge_block({X(sh[0]), X(sh[1]), X(o1[0])}, X(op), s, cfg.touching_points);
      break;
    }
    case PairKind::CommonVertex: {
      int u = -1;
      std::vector<int> o1, o2;
      for (int v : e1) {
        if (in(e2, v))
          u = v;
        else
          o1.push_back(v);
      }
      for (int v : e2)
        if (v != u) o2.push_back(v);
      out.nodes = {u, o1[0], o1[1], o2[0], o2[1]};
      out.block = half * common_vertex_block({X(u), X(o1[0]), X(o1[1])}, X(o2[0]), X(o2[1]), s, cfg.touching_points);
      break;
    }
    case PairKind::Disjoint:
      out.nodes = {e1[0], e1[1], e1[2], e2[0], e2[1], e2[2]};
      out.block = half * disjoint_block({X(e1[0]), X(e1[1]), X(e1[2])}, {X(e2[0]), X(e2[1]), X(e2[2])}, s, cfg);
      break;
  }
  return out;
}

}  // namespace fracocp
