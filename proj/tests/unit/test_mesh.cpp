#include "plap/error.hpp"
#include "plap/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <vector>

using namespace plap;

namespace {

Mesh unit_right_triangle() {
  const std::vector<Eigen::Vector2d> pts{{0, 0}, {1, 0}, {0, 1}};
  const std::vector<std::array<int, 3>> tris{{0, 1, 2}};
  return make_mesh(pts, tris);
}

double signed_area(const Mesh& m, int t) {
  const auto& v = m.triangles()[t].v;
  const Eigen::Vector2d a = m.point(v[0]), b = m.point(v[1]), c = m.point(v[2]);
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

// Counts triangle incidences per undirected edge directly from the triples.
void check_conforming(const Mesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles()) {
    for (int k = 0; k < 3; ++k) {
      int a = t.v[(k + 1) % 3], b = t.v[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  }
  CHECK(static_cast<int>(count.size()) == m.n_edges());
  std::set<int> boundary_vertices;
  for (const auto& [e, c] : count) {
    CHECK((c == 1 || c == 2));
    if (c == 1) {
      boundary_vertices.insert(e.first);
      boundary_vertices.insert(e.second);
    }
  }
  // No hanging nodes: no vertex lies strictly inside an edge.
  for (const auto& [e, c] : count) {
    const Eigen::Vector2d a = m.point(e.first), b = m.point(e.second);
    const Eigen::Vector2d mid = 0.5 * (a + b);
    for (int v = 0; v < m.n_vertices(); ++v) {
      if ((m.point(v) - mid).norm() < 1e-14) FAIL("hanging node at edge midpoint");
    }
  }
  for (int v = 0; v < m.n_vertices(); ++v) {
    CHECK(m.is_dirichlet(v) == (boundary_vertices.count(v) == 1));
    CHECK(m.vertices()[v].on_boundary == m.is_dirichlet(v));
  }
  for (int t = 0; t < m.n_triangles(); ++t) CHECK(signed_area(m, t) > 0.0);
}

}  // namespace

TEST_CASE("unit disk fan") {
  CHECK_THROWS_AS(make_unit_disk_mesh(2), InvalidGeometry);
  const Mesh m3 = make_unit_disk_mesh(3);
  CHECK(m3.n_triangles() == 3);
  CHECK(m3.n_vertices() == 4);
  const Mesh m = make_unit_disk_mesh(8);
  CHECK(m.n_triangles() == 8);
  CHECK(m.n_vertices() == 9);
  int on_circle = 0;
  for (int v = 0; v < m.n_vertices(); ++v) {
    const double r = m.point(v).norm();
    if (m.vertices()[v].on_boundary) {
      CHECK(r == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(m.vertices()[v].on_curved_boundary);
      ++on_circle;
    } else {
      CHECK(r == doctest::Approx(0.0));
    }
  }
  CHECK(on_circle == 8);
  CHECK(m.total_area() == doctest::Approx(4.0 * std::sin(2.0 * std::numbers::pi / 8.0)).epsilon(1e-14));
  CHECK(m.total_area() == doctest::Approx(2.8284).epsilon(1e-4));
  check_conforming(m);
}

TEST_CASE("L-shape") {
  const Mesh m = make_lshape_mesh();
  CHECK(m.n_triangles() == 12);
  CHECK(m.total_area() == doctest::Approx(3.0).epsilon(1e-15));
  bool corner_found = false;
  for (int v = 0; v < m.n_vertices(); ++v) {
    if (m.point(v).norm() == 0.0) {
      corner_found = true;
      CHECK(m.is_dirichlet(v));
    }
    CHECK(!m.vertices()[v].on_curved_boundary);
  }
  CHECK(corner_found);
  int interior = 0;
  for (const auto& e : m.edges()) interior += e.on_boundary() ? 0 : 1;
  CHECK(interior > 0);
  check_conforming(m);
}

TEST_CASE("element geometry") {
  const Mesh m = unit_right_triangle();
  const ElementGeometry& g = m.geometry(0);
  CHECK(g.area == doctest::Approx(0.5));
  CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)));
  CHECK(g.grad[0].x() == doctest::Approx(-1.0));
  CHECK(g.grad[0].y() == doctest::Approx(-1.0));
  CHECK(g.grad[1].x() == doctest::Approx(1.0));
  CHECK(g.grad[1].y() == doctest::Approx(0.0));
  CHECK(g.edge_length[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(g.edge_length[1] == doctest::Approx(1.0));
  const ElementGeometry eq =
      element_geometry(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0.5, std::sqrt(3.0) / 2));
  CHECK(eq.area == doctest::Approx(std::sqrt(3.0) / 4));
  CHECK_THROWS_AS(element_geometry(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0)),
                  InvalidGeometry);
}

TEST_CASE("constructor rejects bad input") {
  const std::vector<Eigen::Vector2d> pts{{0, 0}, {1, 0}, {0, 1}};
  const std::vector<std::array<int, 3>> clockwise{{0, 2, 1}};
  CHECK_THROWS_AS(make_mesh(pts, clockwise), InvalidGeometry);
  const std::vector<std::array<int, 3>> out_of_range{{0, 1, 5}};
  CHECK_THROWS_AS(make_mesh(pts, out_of_range), InvalidGeometry);
  const std::vector<std::array<int, 3>> repeated{{0, 1, 1}};
  CHECK_THROWS_AS(make_mesh(pts, repeated), InvalidGeometry);
}

TEST_CASE("single bisection") {
  const Mesh m = unit_right_triangle();
  const std::vector<int> marked{0};
  const Mesh r = bisect(m, marked);
  CHECK(r.n_triangles() == 2);
  CHECK(r.n_vertices() == 4);
  CHECK(r.parent_vertex_count() == 3);
  REQUIRE(r.created_vertex_parents().size() == 1);
  // Longest edge is the hypotenuse; its midpoint is the new vertex.
  CHECK((r.point(3) - Eigen::Vector2d(0.5, 0.5)).norm() == doctest::Approx(0.0));
  for (const auto& t : r.triangles()) {
    REQUIRE(t.parent.has_value());
    CHECK(*t.parent == 0);
    CHECK(t.level == 1);
  }
  CHECK(r.parent_id() == m.id());
  CHECK(r.total_area() == doctest::Approx(0.5).epsilon(1e-15));
  check_conforming(r);
}

TEST_CASE("empty marking leaves the mesh unchanged") {
  const Mesh m = make_lshape_mesh();
  const Mesh r = bisect(m, std::vector<int>{});
  CHECK(r.n_triangles() == m.n_triangles());
  CHECK(r.n_vertices() == m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) CHECK((r.point(v) - m.point(v)).norm() == 0.0);
}

TEST_CASE("boundary midpoints are projected onto the circle") {
  const Mesh m = make_unit_disk_mesh(8);
  std::vector<int> all(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) all[t] = t;
  Mesh r = bisect(m, all);
  r = bisect(r, std::vector<int>(all.begin(), all.end()));
  for (int v = 0; v < r.n_vertices(); ++v) {
    if (r.vertices()[v].on_boundary) {
      CHECK(r.vertices()[v].on_curved_boundary);
      CHECK(r.point(v).squaredNorm() == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  check_conforming(r);
}

namespace {

Mesh polygonal_copy(const Mesh& m) {
  std::vector<Eigen::Vector2d> pts;
  std::vector<std::array<int, 3>> tris;
  for (int v = 0; v < m.n_vertices(); ++v) pts.push_back(m.point(v));
  for (const auto& t : m.triangles()) tris.push_back(t.v);
  return make_mesh(pts, tris);
}

}  // namespace

TEST_CASE("random refinement keeps conformity, area and shape regularity") {
  struct Case {
    const char* name;
    Mesh mesh;
    bool curved;
  };
  std::vector<Case> cases;
  cases.push_back({"lshape", make_lshape_mesh(), false});
  cases.push_back({"octagon without projection", polygonal_copy(make_unit_disk_mesh(8)), false});
  for (int n : {12, 16, 32}) cases.push_back({"projected disk", make_unit_disk_mesh(n), true});
  std::mt19937_64 rng(42);
  for (auto& c : cases) {
    CAPTURE(c.name);
    Mesh m = c.mesh;
    const double min_angle0 = minimum_angle(m);
    const double area0 = m.total_area();
    double area = area0;
    for (int round = 0; round < 12; ++round) {
      std::vector<int> marked;
      std::uniform_int_distribution<int> pick(0, m.n_triangles() - 1);
      const int n = std::max(1, m.n_triangles() / 5);
      for (int k = 0; k < n; ++k) marked.push_back(pick(rng));
      const Mesh r = bisect(m, marked);
      for (const auto& tri : r.triangles()) {
        REQUIRE(tri.parent.has_value());
        CHECK(tri.level >= m.triangles()[*tri.parent].level);
      }
      check_conforming(r);
      CHECK(minimum_angle(r) >= 0.5 * min_angle0);
      if (c.curved) {
        CHECK(r.total_area() >= area * (1.0 - 1e-14));
        CHECK(r.total_area() <= std::numbers::pi);
      } else {
        CHECK(r.total_area() == doctest::Approx(area0).epsilon(1e-13));
      }
      area = r.total_area();
      m = r;
    }
  }
}

TEST_CASE("marked triangles are bisected at least once") {
  const Mesh m = make_lshape_mesh();
  const std::vector<int> marked{0, 5, 11};
  const Mesh r = bisect(m, marked);
  for (int t : marked) {
    int children = 0;
    for (const auto& tri : r.triangles()) children += (tri.parent && *tri.parent == t) ? 1 : 0;
    CHECK(children >= 2);
  }
}

TEST_CASE("uniform refinement reaches the requested size") {
  const Mesh m = refine_uniform(make_lshape_mesh(), 1000);
  CHECK(m.n_triangles() >= 1000);
  CHECK(m.total_area() == doctest::Approx(3.0).epsilon(1e-13));
  check_conforming(m);
}
