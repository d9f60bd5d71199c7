#include "shapeflow/vfld_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace shapeflow {

namespace {

static_assert(std::endian::native == std::endian::little,
              "VFLD I/O assumes a little-endian host");

constexpr std::uint32_t kVersion = 1;

void write_header(std::ostream& out, std::uint32_t level,
                  std::uint32_t components) {
  out.write("VFLD", 4);
  const std::uint32_t fields[3] = {kVersion, level, components};
  out.write(reinterpret_cast<const char*>(fields), sizeof(fields));
}

struct Header {
  std::uint32_t level = 0;
  std::uint32_t components = 0;
};

Header read_header(std::istream& in, const std::string& path) {
  char magic[4] = {};
  std::uint32_t fields[3] = {};
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(fields), sizeof(fields));
  if (!in || std::memcmp(magic, "VFLD", 4) != 0)
    throw io_error("VFLD: bad magic in " + path);
  if (fields[0] != kVersion)
    throw io_error("VFLD: unsupported version in " + path);
  if (fields[1] < 1 || fields[1] > 12)
    throw io_error("VFLD: level out of range in " + path);
  if (fields[2] != 1 && fields[2] != 2)
    throw io_error("VFLD: component count must be 1 or 2 in " + path);
  return {fields[1], fields[2]};
}

std::vector<double> read_payload(std::istream& in, std::size_t count,
                                 const std::string& path) {
  std::vector<double> data(count);
  in.read(reinterpret_cast<char*>(data.data()), count * sizeof(double));
  if (!in) throw io_error("VFLD: truncated payload in " + path);
  return data;
}

}  // namespace

void save_vfld(const ScalarField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("save_vfld: cannot open " + path);
  write_header(out, f.mesh.level, 1);
  out.write(reinterpret_cast<const char*>(f.v.data()),
            f.v.size() * sizeof(double));
  if (!out) throw io_error("save_vfld: write failed for " + path);
}

void save_vfld(const VectorField2& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("save_vfld: cannot open " + path);
  write_header(out, f.mesh.level, 2);
  std::vector<double> interleaved(2 * f.x.size());
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    interleaved[2 * i] = f.x[i];
    interleaved[2 * i + 1] = f.y[i];
  }
  out.write(reinterpret_cast<const char*>(interleaved.data()),
            interleaved.size() * sizeof(double));
  if (!out) throw io_error("save_vfld: write failed for " + path);
}

ScalarField load_vfld_scalar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("load_vfld: cannot open " + path);
  const Header h = read_header(in, path);
  if (h.components != 1)
    throw io_error("load_vfld: expected 1 component in " + path);
  ScalarField f(make_mesh(h.level));
  f.v = read_payload(in, f.v.size(), path);
  return f;
}

VectorField2 load_vfld_vector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("load_vfld: cannot open " + path);
  const Header h = read_header(in, path);
  if (h.components != 2)
    throw io_error("load_vfld: expected 2 components in " + path);
  VectorField2 f(make_mesh(h.level));
  const std::vector<double> data = read_payload(in, 2 * f.x.size(), path);
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    f.x[i] = data[2 * i];
    f.y[i] = data[2 * i + 1];
  }
  return f;
}

Deformation load_vfld_deformation(const std::string& path) {
  Deformation d;
  d.u = load_vfld_vector(path);
  return d;
}

}  // namespace shapeflow
