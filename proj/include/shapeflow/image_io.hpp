#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapeflow/fields.hpp"

namespace shapeflow {

// 8-bit grayscale raster; row 0 is the top of the image. Node (ix, iy) of a
// mask maps to pixel column ix and row (rows-1 - iy), i.e. the domain's
// y axis points up.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h) : width(w), height(h), pixels(w * h, 0) {}

  std::uint8_t at(int row, int col) const { return pixels[row * width + col]; }
  std::uint8_t& at(int row, int col) { return pixels[row * width + col]; }
};

GrayImage load_pgm(const std::string& path);
void save_pgm(const GrayImage& img, const std::string& path);

GrayImage load_png(const std::string& path);
void save_png(const GrayImage& img, const std::string& path);

// Dispatch on the file extension (.pgm / .png).
GrayImage load_image(const std::string& path);
void save_image(const GrayImage& img, const std::string& path);

// Binarize a raster onto the nodal lattice of the given level. Pixels are
// sampled bilinearly at node positions (exact when the raster is
// (2^level+1)^2) and thresholded at 128, giving nodal values in {0,1}.
// Throws invalid_input for an all-background result (zero-area mask).
ShapeMask rasterize_mask(const GrayImage& img, int level);
ShapeMask load_mask(const std::string& path, int level);

// Nodal values scaled to [0,255] at matching resolution; the inverse of
// rasterize_mask for {0,1} masks at matched size.
GrayImage mask_to_image(const ShapeMask& mask);
GrayImage field_to_image(const ScalarField& f);  // assumes values in [0,1]
void save_mask(const ShapeMask& mask, const std::string& path);

}  // namespace shapeflow
