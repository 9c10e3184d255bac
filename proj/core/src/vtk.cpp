#include "plap/vtk.hpp"

#include "plap/history.hpp"

#include <ostream>
#include <stdexcept>

namespace plap {

void write_vtk(std::ostream& os, const Mesh& mesh, const P1Function& u, const P0VectorField& sigma) {
  if (u.values.size() != mesh.n_vertices() || static_cast<int>(sigma.values.size()) != mesh.n_triangles()) {
    throw std::invalid_argument("fields do not match the mesh");
  }
  os << "# vtk DataFile Version 3.0\n"
     << "plap solution\n"
     << "ASCII\n"
     << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vertex& v : mesh.vertices()) os << format_double(v.x) << ' ' << format_double(v.y) << " 0\n";
  os << "CELLS " << mesh.n_triangles() << ' ' << 4 * mesh.n_triangles() << '\n';
  for (const Triangle& t : mesh.triangles()) os << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  os << "CELL_TYPES " << mesh.n_triangles() << '\n';
  for (int t = 0; t < mesh.n_triangles(); ++t) os << "5\n";
  os << "POINT_DATA " << mesh.n_vertices() << "\nSCALARS u double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < u.values.size(); ++i) os << format_double(u.values[i]) << '\n';
  os << "CELL_DATA " << mesh.n_triangles() << "\nSCALARS sigma_norm double 1\nLOOKUP_TABLE default\n";
  for (const auto& s : sigma.values) os << format_double(s.norm()) << '\n';
}

}  // namespace plap
