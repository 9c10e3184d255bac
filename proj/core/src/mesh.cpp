#include "plap/mesh.hpp"

#include "plap/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

namespace plap {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

std::pair<int, int> edge_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

// Local edge k of a triangle joins v[k+1] and v[k+2].
std::pair<int, int> local_edge(const Triangle& tri, int k) {
  return edge_key(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
}

}  // namespace

ElementGeometry element_geometry(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c) {
  const Eigen::Vector2d e0 = c - b;  // opposite a
  const Eigen::Vector2d e1 = a - c;  // opposite b
  const Eigen::Vector2d e2 = b - a;  // opposite c
  const double twice_area = e2.x() * (-e1.y()) - e2.y() * (-e1.x());
  if (!(std::abs(twice_area) > 0.0) || !std::isfinite(twice_area)) {
    throw InvalidGeometry("degenerate triangle with zero area");
  }
  ElementGeometry g;
  g.area = 0.5 * twice_area;
  // grad lambda_k = rot(e_k) / (2 area), with rot(x, y) = (-y, x) for CCW order.
  const std::array<Eigen::Vector2d, 3> opposite{e0, e1, e2};
  for (int k = 0; k < 3; ++k) {
    g.grad[k] = Eigen::Vector2d(-opposite[k].y(), opposite[k].x()) / twice_area;
    g.edge_length[k] = opposite[k].norm();
  }
  g.diameter = *std::max_element(g.edge_length.begin(), g.edge_length.end());
  return g;
}

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  if (t < 0 || t >= mesh.n_triangles()) {
    throw InvalidGeometry("triangle index " + std::to_string(t) + " out of range");
  }
  return mesh.geometry(t);
}

Mesh::Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), id_(next_mesh_id++) {
  const int nv = n_vertices();
  for (const Vertex& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw InvalidGeometry("non-finite vertex coordinate");
  }
  geometry_.reserve(triangles_.size());
  std::map<std::pair<int, int>, int> edge_index;
  triangle_edges_.resize(triangles_.size());
  for (int t = 0; t < n_triangles(); ++t) {
    const Triangle& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      if (tri.v[k] < 0 || tri.v[k] >= nv) {
        throw InvalidGeometry("triangle " + std::to_string(t) + " references a missing vertex");
      }
    }
    if (tri.v[0] == tri.v[1] || tri.v[1] == tri.v[2] || tri.v[0] == tri.v[2]) {
      throw InvalidGeometry("triangle " + std::to_string(t) + " repeats a vertex");
    }
    if (tri.refinement_edge < 0 || tri.refinement_edge > 2) {
      throw InvalidGeometry("triangle " + std::to_string(t) + " has an invalid refinement edge");
    }
    ElementGeometry g = element_geometry(point(tri.v[0]), point(tri.v[1]), point(tri.v[2]));
    if (g.area <= 0.0) {
      throw InvalidGeometry("triangle " + std::to_string(t) + " is not counterclockwise");
    }
    geometry_.push_back(g);
    for (int k = 0; k < 3; ++k) {
      const auto key = local_edge(tri, k);
      auto [it, inserted] = edge_index.try_emplace(key, n_edges());
      if (inserted) {
        edges_.push_back(Edge{{key.first, key.second}, {t, -1}});
      } else {
        Edge& e = edges_[it->second];
        if (e.t[1] >= 0) {
          throw InvalidGeometry("edge shared by more than two triangles");
        }
        e.t[1] = t;
      }
      triangle_edges_[t][k] = it->second;
    }
  }

  for (Vertex& v : vertices_) v.on_boundary = false;
  for (const Edge& e : edges_) {
    if (e.on_boundary()) {
      vertices_[e.v[0]].on_boundary = true;
      vertices_[e.v[1]].on_boundary = true;
    }
  }
  free_index_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!vertices_[v].on_boundary) vertices_[v].on_curved_boundary = false;
    if (vertices_[v].on_boundary) {
      dirichlet_vertices_.push_back(v);
    } else {
      free_index_[v] = static_cast<int>(free_vertices_.size());
      free_vertices_.push_back(v);
    }
  }
}

double Mesh::total_area() const {
  double a = 0.0;
  for (const ElementGeometry& g : geometry_) a += g.area;
  return a;
}

Mesh make_mesh(std::span<const Eigen::Vector2d> points, std::span<const std::array<int, 3>> triangles) {
  std::vector<Vertex> verts;
  verts.reserve(points.size());
  for (const auto& p : points) verts.push_back(Vertex{p.x(), p.y()});
  std::vector<Triangle> tris;
  tris.reserve(triangles.size());
  for (const auto& t : triangles) {
    Triangle tri;
    tri.v = t;
    double longest = -1.0;
    for (int k = 0; k < 3; ++k) {
      const auto& a = points[t[(k + 1) % 3]];
      const auto& b = points[t[(k + 2) % 3]];
      const double len = (a - b).norm();
      if (len > longest * (1.0 + 1e-12)) {
        longest = len;
        tri.refinement_edge = k;
      }
    }
    tris.push_back(tri);
  }
  return Mesh(std::move(verts), std::move(tris));
}

Mesh make_unit_disk_mesh(int n_boundary) {
  if (n_boundary < 3) {
    throw InvalidGeometry("unit disk mesh needs at least 3 boundary vertices, got " +
                          std::to_string(n_boundary));
  }
  std::vector<Vertex> verts;
  verts.push_back(Vertex{0.0, 0.0});
  for (int i = 0; i < n_boundary; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / n_boundary;
    verts.push_back(Vertex{std::cos(phi), std::sin(phi), true, true});
  }
  // Triangle i = (center, b_i, b_{i+1}); local edge 0 is the chord, local
  // edges 1 and 2 are the radii to b_{i+1} and b_i.
  const double chord = 2.0 * std::sin(std::numbers::pi / n_boundary);
  std::vector<Triangle> tris;
  for (int i = 0; i < n_boundary; ++i) {
    Triangle tri;
    tri.v = {0, 1 + i, 1 + (i + 1) % n_boundary};
    if (chord >= 1.0 - 1e-12) {
      tri.refinement_edge = 0;
    } else {
      // Both radii are longest. Pair triangles 2k and 2k+1 on their shared
      // radius so that refinement edges match across it.
      tri.refinement_edge = (i % 2 == 1) ? 2 : 1;
    }
    tris.push_back(tri);
  }
  return Mesh(std::move(verts), std::move(tris));
}

Mesh make_lshape_mesh() {
  std::vector<Vertex> verts;
  std::map<std::pair<int, int>, int> grid;
  auto grid_vertex = [&](int i, int j) {
    auto [it, inserted] = grid.try_emplace({i, j}, static_cast<int>(verts.size()));
    if (inserted) verts.push_back(Vertex{static_cast<double>(i), static_cast<double>(j)});
    return it->second;
  };
  std::vector<Triangle> tris;
  const std::array<std::pair<int, int>, 3> squares{{{-1, -1}, {0, -1}, {-1, 0}}};
  for (const auto& [x0, y0] : squares) {
    const std::array<int, 4> corner{grid_vertex(x0, y0), grid_vertex(x0 + 1, y0),
                                    grid_vertex(x0 + 1, y0 + 1), grid_vertex(x0, y0 + 1)};
    const int center = static_cast<int>(verts.size());
    verts.push_back(Vertex{x0 + 0.5, y0 + 0.5});
    for (int k = 0; k < 4; ++k) {
      Triangle tri;
      tri.v = {center, corner[k], corner[(k + 1) % 4]};
      tri.refinement_edge = 0;
      tris.push_back(tri);
    }
  }
  return Mesh(std::move(verts), std::move(tris));
}

Mesh bisect(const Mesh& mesh, std::span<const int> marked) {
  const int ne = mesh.n_edges();
  const int nt = mesh.n_triangles();
  std::vector<char> edge_marked(ne, 0);
  for (int t : marked) {
    if (t < 0 || t >= nt) throw InvalidGeometry("marked triangle index out of range");
    edge_marked[mesh.triangle_edges(t)[mesh.triangles()[t].refinement_edge]] = 1;
  }
  // Closure: a triangle with any marked edge must have its refinement edge marked.
  for (bool changed = true; changed;) {
    changed = false;
    for (int t = 0; t < nt; ++t) {
      const auto& te = mesh.triangle_edges(t);
      const int ref = te[mesh.triangles()[t].refinement_edge];
      if (!edge_marked[ref] && (edge_marked[te[0]] || edge_marked[te[1]] || edge_marked[te[2]])) {
        edge_marked[ref] = 1;
        changed = true;
      }
    }
  }

  std::vector<Vertex> verts(mesh.vertices().begin(), mesh.vertices().end());
  std::map<std::pair<int, int>, int> midpoint;
  std::vector<std::array<int, 2>> created;
  for (int e = 0; e < ne; ++e) {
    if (!edge_marked[e]) continue;
    const Edge& edge = mesh.edges()[e];
    const Vertex& a = verts[edge.v[0]];
    const Vertex& b = verts[edge.v[1]];
    Vertex m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    if (edge.on_boundary()) {
      m.on_boundary = true;
      if (a.on_curved_boundary && b.on_curved_boundary) {
        m.on_curved_boundary = true;
        const double r = std::hypot(m.x, m.y);
        m.x /= r;
        m.y /= r;
      }
    }
    midpoint.emplace(edge_key(edge.v[0], edge.v[1]), static_cast<int>(verts.size()));
    verts.push_back(m);
    created.push_back(edge.v);
  }

  std::vector<Triangle> out;
  out.reserve(static_cast<std::size_t>(nt) + 2 * midpoint.size());
  // Triangle given newest vertex first, so the refinement edge is local edge 0.
  auto split = [&](auto&& self, std::array<int, 3> v, int level, int parent) -> void {
    const auto it = midpoint.find(edge_key(v[1], v[2]));
    if (it == midpoint.end()) {
      out.push_back(Triangle{v, 0, parent, level});
      return;
    }
    const int m = it->second;
    self(self, {m, v[0], v[1]}, level + 1, parent);
    self(self, {m, v[2], v[0]}, level + 1, parent);
  };
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = mesh.triangles()[t];
    const int r = tri.refinement_edge;
    const std::array<int, 3> rotated{tri.v[r], tri.v[(r + 1) % 3], tri.v[(r + 2) % 3]};
    if (!edge_marked[mesh.triangle_edges(t)[r]]) {
      Triangle copy = tri;
      copy.parent = t;
      out.push_back(copy);
      continue;
    }
    split(split, rotated, tri.level, t);
  }

  Mesh result(std::move(verts), std::move(out));
  result.parent_id_ = mesh.id();
  result.parent_triangle_count_ = nt;
  result.parent_vertex_count_ = mesh.n_vertices();
  result.created_vertex_parents_ = std::move(created);
  return result;
}

Mesh refine_uniform(Mesh mesh, int min_triangles) {
  while (mesh.n_triangles() < min_triangles) {
    std::vector<int> all(mesh.n_triangles());
    std::iota(all.begin(), all.end(), 0);
    mesh = bisect(mesh, all);
  }
  return mesh;
}

double minimum_angle(const Mesh& mesh) {
  double smallest = std::numbers::pi;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& v = mesh.triangles()[t].v;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d a = mesh.point(v[(k + 1) % 3]) - mesh.point(v[k]);
      const Eigen::Vector2d b = mesh.point(v[(k + 2) % 3]) - mesh.point(v[k]);
      const double cosine = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
      smallest = std::min(smallest, std::acos(cosine));
    }
  }
  return smallest;
}

}  // namespace plap
