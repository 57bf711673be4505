#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracocp/quadrature.hpp"

namespace fracocp {

enum class Domain { Disk, Square, Polygon };

Domain parse_domain(const std::string& name);
std::string domain_name(Domain d);

// Conforming triangulation. Element (a, b, c) is counter-clockwise and its
// refinement edge is (a, b); newest-vertex bisection inserts the midpoint of
// (a, b) and produces the children (c, a, m) and (b, c, m).
struct Mesh {
  Domain domain = Domain::Polygon;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> elements;
  std::vector<int> generation;

  // Filled by finalize().
  std::vector<char> boundary;
  std::vector<int> dof;
  int num_dofs = 0;
  std::vector<double> areas;
  std::vector<double> diams;
  std::vector<double> radii;
  std::vector<Vec2> centroids;
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<std::vector<int>> vertex_elements;

  void finalize();

  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  const Vec2& vertex(int e, int i) const { return vertices[elements[e][i]]; }
  Vec2 point(int e, const std::array<double, 3>& l) const {
    return bary_point(vertex(e, 0), vertex(e, 1), vertex(e, 2), l);
  }
  double h(int e) const;
  std::array<Vec2, 3> gradients(int e) const;
  std::array<double, 3> barycentric(int e, const Vec2& x) const;
  std::vector<int> element_dofs(int e) const;
};

struct RefineResult {
  Mesh mesh;
  std::vector<int> parent;                     // new element -> element of the input mesh
  std::vector<std::array<int, 2>> vertex_parents;  // new vertex -> edge endpoints (a == b for inherited vertices)
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

Mesh initial_mesh(Domain domain, int resolution);
Mesh make_mesh(Domain domain, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements);

RefineResult refine(const Mesh& mesh, const std::vector<int>& marked);
Mesh uniform_refine(const Mesh& mesh);

std::vector<int> element_patch(const Mesh& mesh, int element, int order);
double element_boundary_distance(const Mesh& mesh, int element, const Vec2& x);
double skeleton_distance(const Mesh& mesh, const Vec2& x);
double local_mesh_width(const Mesh& mesh, int element, const Vec2& x, double s);
double shape_regularity(const Mesh& mesh);
bool is_conforming(const Mesh& mesh, std::string* reason = nullptr);

// Oriented boundary of the mesh (domain on the left). With merge_collinear,
// consecutive collinear edges are joined into one segment.
std::vector<Segment> boundary_segments(const Mesh& mesh, bool merge_collinear);

int locate(const Mesh& mesh, const Vec2& x, std::array<double, 3>* bary = nullptr);

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b);

}  // namespace fracocp
