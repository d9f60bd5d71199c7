#include "shapeflow/smooth.hpp"

#include <cmath>
#include <vector>

namespace shapeflow {

namespace {

// Half-sample symmetric index: ..., f[1], f[0] | f[0], f[1], ..., f[m-1] | f[m-1], ...
inline int reflect(int i, int m) {
  while (i < 0 || i >= m) {
    if (i < 0) i = -1 - i;
    if (i >= m) i = 2 * m - 1 - i;
  }
  return i;
}

}  // namespace

ScalarField gaussian_smooth(const ScalarField& f, double delta2) {
  if (!(delta2 > 0.0)) throw invalid_input("gaussian_smooth: delta2 must be > 0");
  const Mesh& mesh = f.mesh;
  const int m = mesh.nodes_per_side();
  const double sigma_nodes = delta2 / mesh.h;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_nodes)));

  std::vector<double> kernel(2 * radius + 1);
  double mass = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double t = k / sigma_nodes;
    kernel[k + radius] = std::exp(-0.5 * t * t);
    mass += kernel[k + radius];
  }
  for (double& k : kernel) k /= mass;

  ScalarField tmp(mesh), out(mesh);
  // horizontal pass
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k)
        s += kernel[k + radius] * f.v[mesh.vertex_index(reflect(ix - k, m), iy)];
      tmp.v[mesh.vertex_index(ix, iy)] = s;
    }
  }
  // vertical pass
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k)
        s += kernel[k + radius] * tmp.v[mesh.vertex_index(ix, reflect(iy - k, m))];
      out.v[mesh.vertex_index(ix, iy)] = s;
    }
  }
  return out;
}

}  // namespace shapeflow
