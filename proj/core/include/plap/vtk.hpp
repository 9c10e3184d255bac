#pragma once

#include "plap/fem.hpp"

#include <iosfwd>

namespace plap {

/// Legacy VTK ASCII unstructured grid with point data u and cell data
/// sigma_norm = |sigma_T|.
void write_vtk(std::ostream& os, const Mesh& mesh, const P1Function& u, const P0VectorField& sigma);

}  // namespace plap
