#pragma once

#include <map>
#include <string>
#include <vector>

#include "ldg/domain.hpp"

namespace ldg {

enum class VtkEncoding { Binary, Ascii };

// Legacy VTK STRUCTURED_POINTS with point arrays q0..q4, an int mask
// (0 Interior, 1 Boundary, 2 Exterior) and optional extra scalars. The title
// line records the domain so the grid can be rebuilt on read. Binary output is
// big-endian as the legacy format prescribes. Throws IoError.
void write_field_vtk(const std::string& path, const TensorField& field,
                     const std::map<std::string, std::vector<double>>& extra = {},
                     VtkEncoding encoding = VtkEncoding::Binary);

// Rebuilds the grid from the recorded domain. Throws IoError.
TensorField read_field_vtk(const std::string& path);

// Reads values onto an existing grid; dimensions, origin and spacing must match.
TensorField read_field_vtk(const std::string& path, std::shared_ptr<const Grid> grid);

// Scalar point array by name from a file written by write_field_vtk.
std::vector<double> read_scalar_vtk(const std::string& path, const std::string& name);

std::string encode_domain(const DomainSpec& spec);
DomainSpec decode_domain(const std::string& text);  // throws IoError

}  // namespace ldg
