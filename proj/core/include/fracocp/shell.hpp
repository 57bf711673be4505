#pragma once

#include <array>
#include <vector>

#include "fracocp/mesh.hpp"

namespace fracocp {

// Triangulation of B(0, R) minus the meshed domain, obtained by extruding the
// boundary edges radially in geometrically graded layers.
struct AuxiliaryShell {
  double R = 0.0;
  int layers = 0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> inner_vertices;  // mesh vertex id of shell vertex i for i < inner_vertices.size()
  std::vector<std::array<int, 2>> outer_edges;
};

double default_shell_radius(Domain d);

AuxiliaryShell auxiliary_shell(const Mesh& mesh, double R, int layers, double ratio = 1.8);
AuxiliaryShell auxiliary_shell(const Mesh& mesh);

}  // namespace fracocp
