#include "fracocp/shell.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace fracocp {

double default_shell_radius(Domain d) { return d == Domain::Square ? 2.5 : 1.5; }

AuxiliaryShell auxiliary_shell(const Mesh& mesh) {
  return auxiliary_shell(mesh, default_shell_radius(mesh.domain), 4, 1.8);
}

AuxiliaryShell auxiliary_shell(const Mesh& mesh, double R, int layers, double ratio) {
  if (layers < 1) throw std::invalid_argument("auxiliary_shell: layers must be >= 1");
  double extent = 0.0;
  for (const auto& v : mesh.vertices) extent = std::max(extent, v.norm());
  if (!(R > extent * (1.0 + 1e-12))) throw std::invalid_argument("auxiliary_shell: radius too small");

  AuxiliaryShell sh;
  sh.R = R;
  sh.layers = layers;
  std::unordered_map<int, int> local;
  for (const auto& be : mesh.boundary_edges)
    for (int v : be)
      if (!local.count(v)) {
        local[v] = static_cast<int>(sh.inner_vertices.size());
        sh.inner_vertices.push_back(v);
      }
  const int nb = static_cast<int>(sh.inner_vertices.size());
  for (int v : sh.inner_vertices) sh.vertices.push_back(mesh.vertices[v]);
  double total = std::pow(ratio, layers) - 1.0;
  for (int l = 1; l <= layers; ++l) {
    double g = (std::pow(ratio, l) - 1.0) / total;
    for (int i = 0; i < nb; ++i) {
      const Vec2& p = mesh.vertices[sh.inner_vertices[i]];
      Vec2 outer = R * p.normalized();
      sh.vertices.push_back(l == layers ? outer : Vec2(p + g * (outer - p)));
    }
  }
  auto id = [&](int layer, int v) { return layer * nb + local.at(v); };
  auto push = [&](int a, int b, int c) {
    const Vec2 &pa = sh.vertices[a], &pb = sh.vertices[b], &pc = sh.vertices[c];
    double area = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
    if (area < 0) std::swap(b, c);
    sh.triangles.push_back({a, b, c});
  };
  for (const auto& be : mesh.boundary_edges) {
    for (int l = 0; l < layers; ++l) {
      int a0 = id(l, be[0]), b0 = id(l, be[1]), a1 = id(l + 1, be[0]), b1 = id(l + 1, be[1]);
      push(a0, b1, b0);
      push(a0, a1, b1);
    }
    sh.outer_edges.push_back({id(layers, be[0]), id(layers, be[1])});
  }
  return sh;
}

}  // namespace fracocp
