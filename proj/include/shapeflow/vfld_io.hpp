#pragma once

#include <string>

#include "shapeflow/fields.hpp"

namespace shapeflow {

// Flat binary field format: a 16-byte header (magic "VFLD", version u32,
// level u32, components u32, little-endian) followed by row-major 64-bit
// little-endian floats, components interleaved per node.
void save_vfld(const ScalarField& f, const std::string& path);
void save_vfld(const VectorField2& f, const std::string& path);
inline void save_vfld(const Deformation& d, const std::string& path) {
  save_vfld(d.u, path);
}

ScalarField load_vfld_scalar(const std::string& path);
VectorField2 load_vfld_vector(const std::string& path);
Deformation load_vfld_deformation(const std::string& path);

}  // namespace shapeflow
