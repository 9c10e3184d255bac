#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace plap {

struct Vertex {
  double x = 0.0;
  double y = 0.0;
  bool on_boundary = false;
  /// Lies on the unit circle; midpoints of boundary edges between two such
  /// vertices are projected back onto the circle during refinement.
  bool on_curved_boundary = false;
};

/// Counterclockwise vertex triple. Local edge k is the edge opposite v[k];
/// the refinement edge is the one opposite the newest vertex.
struct Triangle {
  std::array<int, 3> v{};
  int refinement_edge = 0;
  /// Index of the originating triangle in the mesh this one was refined from.
  std::optional<int> parent;
  /// Number of bisections since the initial mesh.
  int level = 0;
};

struct Edge {
  std::array<int, 2> v{};
  /// Adjacent triangles; t[1] == -1 on the boundary.
  std::array<int, 2> t{-1, -1};

  bool on_boundary() const noexcept { return t[1] < 0; }
};

struct ElementGeometry {
  double area = 0.0;
  /// Constant gradients of the three barycentric hat functions.
  std::array<Eigen::Vector2d, 3> grad{};
  /// Length of local edge k (opposite vertex k).
  std::array<double, 3> edge_length{};
  /// Longest edge.
  double diameter = 0.0;
};

/// Conforming triangulation. Immutable once constructed; refinement returns
/// a new mesh. The Dirichlet set is the set of all boundary vertices.
class Mesh {
 public:
  /// Validates indices and orientation and derives the edge adjacency.
  /// Boundary flags of the vertices are recomputed from the topology.
  /// Throws InvalidGeometry for degenerate, clockwise or non-manifold input.
  Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles);

  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  std::span<const Triangle> triangles() const noexcept { return triangles_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  int n_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
  int n_triangles() const noexcept { return static_cast<int>(triangles_.size()); }
  int n_edges() const noexcept { return static_cast<int>(edges_.size()); }

  Eigen::Vector2d point(int v) const { return {vertices_[v].x, vertices_[v].y}; }

  /// Edge indices of triangle t, local edge k at position k.
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }

  const ElementGeometry& geometry(int t) const { return geometry_[t]; }

  bool is_dirichlet(int v) const { return free_index_[v] < 0; }
  /// Position among the free (non-Dirichlet) vertices, -1 for Dirichlet ones.
  int free_index(int v) const { return free_index_[v]; }
  std::span<const int> free_vertices() const noexcept { return free_vertices_; }
  std::span<const int> dirichlet_vertices() const noexcept { return dirichlet_vertices_; }
  int n_free() const noexcept { return static_cast<int>(free_vertices_.size()); }

  double total_area() const;

  /// Unique id of this mesh and of the mesh it was refined from (0 if none).
  std::uint64_t id() const noexcept { return id_; }
  std::uint64_t parent_id() const noexcept { return parent_id_; }
  int parent_triangle_count() const noexcept { return parent_triangle_count_; }
  int parent_vertex_count() const noexcept { return parent_vertex_count_; }
  /// Endpoints of the bisected edge for every vertex created by refinement,
  /// i.e. for vertex parent_vertex_count() + k at position k.
  std::span<const std::array<int, 2>> created_vertex_parents() const noexcept { return created_vertex_parents_; }

 private:
  friend Mesh bisect(const Mesh&, std::span<const int>);

  std::vector<Vertex> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<ElementGeometry> geometry_;
  std::vector<int> free_index_;
  std::vector<int> free_vertices_;
  std::vector<int> dirichlet_vertices_;
  std::uint64_t id_ = 0;
  std::uint64_t parent_id_ = 0;
  int parent_triangle_count_ = 0;
  int parent_vertex_count_ = 0;
  std::vector<std::array<int, 2>> created_vertex_parents_;
};

/// Area, hat-function gradients and edge lengths of triangle t.
/// Throws InvalidGeometry for a zero-area triangle.
ElementGeometry element_geometry(const Mesh& mesh, int t);
ElementGeometry element_geometry(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c);

/// Builds a mesh from coordinates and counterclockwise triples, choosing the
/// longest edge of each triangle as its refinement edge (lowest local index
/// on ties).
Mesh make_mesh(std::span<const Eigen::Vector2d> points, std::span<const std::array<int, 3>> triangles);

/// Fan triangulation of the regular n_boundary-gon inscribed in the unit
/// circle. Throws InvalidGeometry for n_boundary < 3.
Mesh make_unit_disk_mesh(int n_boundary);

/// L-shaped domain [-1,1]^2 \ [0,1)^2: three unit squares, each split into
/// four triangles from its center, refinement edges on the square sides.
Mesh make_lshape_mesh();

/// Newest-vertex bisection of the marked triangles plus closure. Every marked
/// triangle is bisected at least once; the result is conforming.
Mesh bisect(const Mesh& mesh, std::span<const int> marked);

/// Marks everything until the mesh has at least min_triangles triangles.
Mesh refine_uniform(Mesh mesh, int min_triangles);

/// Smallest interior angle over all triangles, in radians.
double minimum_angle(const Mesh& mesh);

}  // namespace plap
