#include "fracocp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace fracocp {
namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * cross(b - a, c - a); }

// Counter-clockwise, longest edge first.
std::array<int, 3> normalize_element(const std::vector<Vec2>& v, std::array<int, 3> t) {
  if (signed_area(v[t[0]], v[t[1]], v[t[2]]) < 0) std::swap(t[0], t[1]);
  int best = 0;
  double len = -1.0;
  for (int i = 0; i < 3; ++i) {
    double l = (v[t[(i + 1) % 3]] - v[t[i]]).squaredNorm();
    if (l > len * (1.0 + 1e-12)) {
      len = l;
      best = i;
    }
  }
  return {t[best], t[(best + 1) % 3], t[(best + 2) % 3]};
}

Mesh disk_mesh(int r) {
  std::vector<Vec2> v;
  v.emplace_back(0.0, 0.0);
  std::vector<int> ring_start = {0};
  for (int k = 1; k <= r; ++k) {
    ring_start.push_back(static_cast<int>(v.size()));
    double rad = static_cast<double>(k) / r;
    for (int j = 0; j < 6 * k; ++j) {
      double phi = 2.0 * std::numbers::pi * j / (6.0 * k);
      v.emplace_back(rad * std::cos(phi), rad * std::sin(phi));
    }
    if (k == r)
      for (int j = 0; j < 6 * k; ++j) v[ring_start[k] + j] /= v[ring_start[k] + j].norm();
  }
  auto ring = [&](int k, int j) {
    if (k == 0) return 0;
    return ring_start[k] + (j % (6 * k));
  };
  std::vector<std::array<int, 3>> el;
  for (int k = 1; k <= r; ++k)
    for (int t = 0; t < 6; ++t) {
      for (int i = 0; i < k; ++i) el.push_back({ring(k, t * k + i), ring(k, t * k + i + 1), ring(k - 1, t * (k - 1) + i)});
      for (int i = 0; i + 1 < k; ++i)
        el.push_back({ring(k - 1, t * (k - 1) + i), ring(k, t * k + i + 1), ring(k - 1, t * (k - 1) + i + 1)});
    }
  return make_mesh(Domain::Disk, std::move(v), std::move(el));
}

Mesh square_mesh(int r) {
  int n = 2 * r;
  double h = 2.0 / n;
  std::vector<Vec2> v;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.emplace_back(-1.0 + i * h, -1.0 + j * h);
  auto id = [&](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> el;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int ll = id(i, j), lr = id(i + 1, j), ur = id(i + 1, j + 1), ul = id(i, j + 1);
      double cx = -1.0 + (i + 0.5) * h, cy = -1.0 + (j + 0.5) * h;
      if (cx * cy > 0) {
        el.push_back({ll, lr, ur});
        el.push_back({ll, ur, ul});
      } else {
        el.push_back({ll, lr, ul});
        el.push_back({lr, ur, ul});
      }
    }
  return make_mesh(Domain::Square, std::move(v), std::move(el));
}

bool on_domain_boundary(Domain d, const Vec2& a, const Vec2& b) {
  const double tol = 1e-10;
  switch (d) {
    case Domain::Disk:
      return std::abs(a.norm() - 1.0) < tol && std::abs(b.norm() - 1.0) < tol;
    case Domain::Square:
      for (int c = 0; c < 2; ++c)
        for (double side : {-1.0, 1.0})
          if (std::abs(a[c] - side) < tol && std::abs(b[c] - side) < tol) return true;
      return false;
    case Domain::Polygon:
      return true;
  }
  return true;
}

}  // namespace

Domain parse_domain(const std::string& name) {
  if (name == "disk") return Domain::Disk;
  if (name == "square") return Domain::Square;
  if (name == "polygon") return Domain::Polygon;
  throw std::invalid_argument("unsupported domain descriptor: " + name);
}

std::string domain_name(Domain d) {
  switch (d) {
    case Domain::Disk:
      return "disk";
    case Domain::Square:
      return "square";
    case Domain::Polygon:
      return "polygon";
  }
  return "polygon";
}

void Mesh::finalize() {
  const int ne = num_elements(), nv = num_vertices();
  generation.resize(ne, 0);
  areas.resize(ne);
  diams.resize(ne);
  radii.resize(ne);
  centroids.resize(ne);
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(3 * ne);
  for (int e = 0; e < ne; ++e) {
    const auto& t = elements[e];
    const Vec2 &a = vertices[t[0]], &b = vertices[t[1]], &c = vertices[t[2]];
    areas[e] = signed_area(a, b, c);
    if (!(areas[e] > 0)) throw std::runtime_error("degenerate or clockwise element");
    centroids[e] = (a + b + c) / 3.0;
    diams[e] = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    radii[e] = std::max({(a - centroids[e]).norm(), (b - centroids[e]).norm(), (c - centroids[e]).norm()});
    for (int i = 0; i < 3; ++i) ++count[edge_key(t[i], t[(i + 1) % 3])];
  }
  boundary.assign(nv, 0);
  boundary_edges.clear();
  for (int e = 0; e < ne; ++e) {
    const auto& t = elements[e];
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      if (count[edge_key(a, b)] == 1) {
        boundary_edges.push_back({a, b});
        boundary[a] = boundary[b] = 1;
      }
    }
  }
  dof.assign(nv, -1);
  num_dofs = 0;
  for (int v = 0; v < nv; ++v)
    if (!boundary[v]) dof[v] = num_dofs++;
  vertex_elements.assign(nv, {});
  for (int e = 0; e < ne; ++e)
    for (int v : elements[e]) vertex_elements[v].push_back(e);
}

double Mesh::h(int e) const { return std::sqrt(areas[e]); }

std::array<Vec2, 3> Mesh::gradients(int e) const {
  const Vec2 &a = vertex(e, 0), &b = vertex(e, 1), &c = vertex(e, 2);
  double twice = 2.0 * areas[e];
  auto perp = [&](const Vec2& p, const Vec2& q) -> Vec2 { return Vec2(p.y() - q.y(), q.x() - p.x()) / twice; };
  return {perp(b, c), perp(c, a), perp(a, b)};
}

std::array<double, 3> Mesh::barycentric(int e, const Vec2& x) const {
  const Vec2 &a = vertex(e, 0), &b = vertex(e, 1), &c = vertex(e, 2);
  double A = 2.0 * areas[e];
  double l1 = cross(c - b, x - b) / A;
  double l2 = cross(a - c, x - c) / A;
  return {l1, l2, 1.0 - l1 - l2};
}

std::vector<int> Mesh::element_dofs(int e) const {
  return {dof[elements[e][0]], dof[elements[e][1]], dof[elements[e][2]]};
}

Mesh make_mesh(Domain domain, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements) {
  Mesh m;
  m.domain = domain;
  for (auto& t : elements) t = normalize_element(vertices, t);
  m.vertices = std::move(vertices);
  m.elements = std::move(elements);
  m.finalize();
  return m;
}

Mesh initial_mesh(Domain domain, int resolution) {
  if (resolution < 1) throw std::invalid_argument("initial_mesh: resolution must be >= 1");
  switch (domain) {
    case Domain::Disk:
      return disk_mesh(resolution);
    case Domain::Square:
      return square_mesh(resolution);
    default:
      throw std::invalid_argument("initial_mesh: unsupported domain descriptor");
  }
}

RefineResult refine(const Mesh& mesh, const std::vector<int>& marked) {
  std::unordered_map<std::uint64_t, int> mid;
  for (int e : marked) {
    if (e < 0 || e >= mesh.num_elements()) throw std::out_of_range("refine: invalid element id");
    mid.emplace(edge_key(mesh.elements[e][0], mesh.elements[e][1]), -1);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : mesh.elements) {
      auto ref = edge_key(t[0], t[1]);
      if (mid.count(ref)) continue;
      if (mid.count(edge_key(t[1], t[2])) || mid.count(edge_key(t[2], t[0]))) {
        mid.emplace(ref, -1);
        changed = true;
      }
    }
  }
  std::unordered_set<std::uint64_t> on_boundary;
  for (const auto& be : mesh.boundary_edges) on_boundary.insert(edge_key(be[0], be[1]));

  RefineResult out;
  Mesh& m = out.mesh;
  m.domain = mesh.domain;
  m.vertices = mesh.vertices;
  out.vertex_parents.resize(mesh.vertices.size());
  for (int v = 0; v < mesh.num_vertices(); ++v) out.vertex_parents[v] = {v, v};

  auto midpoint = [&](int a, int b) {
    int& slot = mid[edge_key(a, b)];
    if (slot < 0) {
      Vec2 p = 0.5 * (m.vertices[a] + m.vertices[b]);
      if (mesh.domain == Domain::Disk && on_boundary.count(edge_key(a, b))) p /= p.norm();
      slot = static_cast<int>(m.vertices.size());
      m.vertices.push_back(p);
      out.vertex_parents.push_back({std::min(a, b), std::max(a, b)});
    }
    return slot;
  };

  struct Item {
    std::array<int, 3> t;
    int gen;
  };
  std::vector<Item> stack;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    stack.push_back({mesh.elements[e], mesh.generation[e]});
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      const auto& t = it.t;
      if (!mid.count(edge_key(t[0], t[1]))) {
        m.elements.push_back(t);
        m.generation.push_back(it.gen);
        out.parent.push_back(e);
        continue;
      }
      int c = midpoint(t[0], t[1]);
      stack.push_back({{t[1], t[2], c}, it.gen + 1});
      stack.push_back({{t[2], t[0], c}, it.gen + 1});
    }
  }
  m.finalize();
  return out;
}

Mesh uniform_refine(const Mesh& mesh) {
  std::vector<int> all(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) all[e] = e;
  return refine(mesh, all).mesh;
}

std::vector<int> element_patch(const Mesh& mesh, int element, int order) {
  if (element < 0 || element >= mesh.num_elements()) throw std::out_of_range("element_patch: invalid element id");
  if (order < 0) throw std::invalid_argument("element_patch: negative order");
  std::set<int> patch = {element};
  for (int k = 0; k < order; ++k) {
    std::set<int> next = patch;
    for (int e : patch)
      for (int v : mesh.elements[e]) next.insert(mesh.vertex_elements[v].begin(), mesh.vertex_elements[v].end());
    patch.swap(next);
  }
  return {patch.begin(), patch.end()};
}

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (x - a - t * d).norm();
}

double element_boundary_distance(const Mesh& mesh, int e, const Vec2& x) {
  const Vec2 &a = mesh.vertex(e, 0), &b = mesh.vertex(e, 1), &c = mesh.vertex(e, 2);
  return std::min({point_segment_distance(x, a, b), point_segment_distance(x, b, c), point_segment_distance(x, c, a)});
}

double skeleton_distance(const Mesh& mesh, const Vec2& x) {
  double d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_elements(); ++e) d = std::min(d, element_boundary_distance(mesh, e, x));
  return d;
}

double local_mesh_width(const Mesh& mesh, int element, const Vec2& x, double s) {
  double h = mesh.h(element);
  if (s <= 0.5) return std::pow(h, s);
  double beta = s - 0.5;
  double omega = element_boundary_distance(mesh, element, x);
  return std::pow(h, s - beta) * std::pow(omega, beta);
}

double shape_regularity(const Mesh& mesh) {
  double g = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) g = std::max(g, mesh.diams[e] / std::sqrt(mesh.areas[e]));
  return g;
}

bool is_conforming(const Mesh& mesh, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  std::unordered_map<std::uint64_t, int> count;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.elements[e];
    if (!(signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) > 0))
      return fail("non-positive element area");
    for (int i = 0; i < 3; ++i) ++count[edge_key(t[i], t[(i + 1) % 3])];
  }
  for (const auto& [key, n] : count) {
    if (n > 2) return fail("edge shared by more than two elements");
    if (n == 1) {
      int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
      if (!on_domain_boundary(mesh.domain, mesh.vertices[a], mesh.vertices[b]))
        return fail("unmatched interior edge (hanging node)");
    }
  }
  return true;
}

std::vector<Segment> boundary_segments(const Mesh& mesh, bool merge_collinear) {
  std::unordered_map<int, int> next;
  for (const auto& be : mesh.boundary_edges) next[be[0]] = be[1];
  std::vector<Segment> out;
  std::unordered_set<int> seen;
  for (const auto& be : mesh.boundary_edges) {
    if (seen.count(be[0])) continue;
    std::vector<int> loop;
    for (int v = be[0]; !seen.count(v); v = next.at(v)) {
      seen.insert(v);
      loop.push_back(v);
    }
    const int n = static_cast<int>(loop.size());
    if (!merge_collinear) {
      for (int i = 0; i < n; ++i) out.push_back({mesh.vertices[loop[i]], mesh.vertices[loop[(i + 1) % n]]});
      continue;
    }
    auto corner = [&](int i) {
      const Vec2& p = mesh.vertices[loop[(i + n - 1) % n]];
      const Vec2& q = mesh.vertices[loop[i]];
      const Vec2& r = mesh.vertices[loop[(i + 1) % n]];
      Vec2 d1 = q - p, d2 = r - q;
      return std::abs(cross(d1, d2)) > 1e-12 * d1.norm() * d2.norm() || d1.dot(d2) < 0;
    };
    int start = -1;
    for (int i = 0; i < n && start < 0; ++i)
      if (corner(i)) start = i;
    if (start < 0) start = 0;
    int seg_begin = start;
    for (int k = 1; k <= n; ++k) {
      int i = (start + k) % n;
      if (k == n || corner(i)) {
        out.push_back({mesh.vertices[loop[seg_begin]], mesh.vertices[loop[i]]});
        seg_begin = i;
      }
    }
  }
  return out;
}

int locate(const Mesh& mesh, const Vec2& x, std::array<double, 3>* bary) {
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if ((x - mesh.centroids[e]).norm() > mesh.radii[e] * (1 + 1e-12) + 1e-14) continue;
    auto l = mesh.barycentric(e, x);
    if (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) {
      if (bary) *bary = l;
      return e;
    }
  }
  return -1;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  std::unordered_set<std::uint64_t> bnd;
  for (const auto& be : mesh.boundary_edges) bnd.insert(edge_key(be[0], be[1]));
  os.precision(17);
  os << "fracocp-mesh 1\n";
  os << "domain " << domain_name(mesh.domain) << "\n";
  os << "vertices " << mesh.num_vertices() << "\n";
  for (const auto& v : mesh.vertices) os << v.x() << " " << v.y() << "\n";
  os << "elements " << mesh.num_elements() << "\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.elements[e];
    int mask = 0;
    for (int i = 0; i < 3; ++i)
      if (bnd.count(edge_key(t[i], t[(i + 1) % 3]))) mask |= 1 << i;
    os << t[0] << " " << t[1] << " " << t[2] << " 0 " << mask << " " << mesh.generation[e] << "\n";
  }
}

Mesh read_mesh(std::istream& is) {
  std::string tag, word;
  int version = 0;
  if (!(is >> tag >> version) || tag != "fracocp-mesh") throw std::runtime_error("read_mesh: bad header");
  Mesh m;
  std::string dom;
  is >> word >> dom;
  m.domain = parse_domain(dom);
  int nv = 0, ne = 0;
  is >> word >> nv;
  m.vertices.resize(nv);
  for (auto& v : m.vertices) is >> v.x() >> v.y();
  is >> word >> ne;
  m.elements.resize(ne);
  m.generation.resize(ne);
  for (int e = 0; e < ne; ++e) {
    std::array<int, 3> t;
    int ref = 0, mask = 0;
    is >> t[0] >> t[1] >> t[2] >> ref >> mask >> m.generation[e];
    if (ref < 0 || ref > 2) throw std::runtime_error("read_mesh: bad refinement edge index");
    m.elements[e] = {t[ref], t[(ref + 1) % 3], t[(ref + 2) % 3]};
  }
  if (!is) throw std::runtime_error("read_mesh: truncated input");
  m.finalize();
  return m;
}

}  // namespace fracocp
