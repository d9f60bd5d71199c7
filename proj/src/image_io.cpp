#include "shapeflow/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

namespace shapeflow {

namespace {

void skip_pnm_whitespace(std::istream& in) {
  int c = in.peek();
  while (c == '#' || std::isspace(c)) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      in.get();
    }
    c = in.peek();
  }
}

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace

GrayImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("load_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw io_error("load_pgm: not a P5 PGM: " + path);
  skip_pnm_whitespace(in);
  int w = 0, h = 0, maxval = 0;
  in >> w;
  skip_pnm_whitespace(in);
  in >> h;
  skip_pnm_whitespace(in);
  in >> maxval;
  if (!in || w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw io_error("load_pgm: bad header in " + path);
  in.get();  // single whitespace after maxval
  GrayImage img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()), img.pixels.size());
  if (!in) throw io_error("load_pgm: truncated pixel data in " + path);
  return img;
}

void save_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("save_pgm: cannot open " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            img.pixels.size());
  if (!out) throw io_error("save_pgm: write failed for " + path);
}

GrayImage load_png(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw io_error("load_png: cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw io_error("load_png: init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw io_error("load_png: init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw io_error("load_png: decode failed for " + path);
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_strip_16(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  GrayImage img(png_get_image_width(png, info), png_get_image_height(png, info));
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r)
    rows[r] = img.pixels.data() + static_cast<std::size_t>(r) * img.width;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void save_png(const GrayImage& img, const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw io_error("save_png: cannot open " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw io_error("save_png: init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw io_error("save_png: init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw io_error("save_png: encode failed for " + path);
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r)
    rows[r] = const_cast<png_bytep>(img.pixels.data() +
                                    static_cast<std::size_t>(r) * img.width);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage load_image(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "pgm") return load_pgm(path);
  if (ext == "png") return load_png(path);
  throw io_error("load_image: unsupported extension on " + path);
}

void save_image(const GrayImage& img, const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "pgm") return save_pgm(img, path);
  if (ext == "png") return save_png(img, path);
  throw io_error("save_image: unsupported extension on " + path);
}

ShapeMask rasterize_mask(const GrayImage& img, int level) {
  const Mesh mesh = make_mesh(level);
  ShapeMask mask(mesh);
  const int m = mesh.nodes_per_side();
  bool any = false;
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      double value;
      if (img.width == m && img.height == m) {
        value = img.at(m - 1 - iy, ix);
      } else {
        // bilinear sample at the node position, y axis flipped
        const double px = ix * mesh.h * (img.width - 1);
        const double py = (1.0 - iy * mesh.h) * (img.height - 1);
        const int x0 = std::min(static_cast<int>(px), img.width - 2);
        const int y0 = std::min(static_cast<int>(py), img.height - 2);
        const double fx = px - x0;
        const double fy = py - y0;
        value = (1 - fx) * (1 - fy) * img.at(y0, x0) +
                fx * (1 - fy) * img.at(y0, x0 + 1) +
                (1 - fx) * fy * img.at(y0 + 1, x0) +
                fx * fy * img.at(y0 + 1, x0 + 1);
      }
      const double bit = value >= 128.0 ? 1.0 : 0.0;
      any = any || bit > 0.0;
      mask.chi.v[mesh.vertex_index(ix, iy)] = bit;
    }
  }
  if (!any) throw invalid_input("rasterize_mask: zero-area mask");
  return mask;
}

ShapeMask load_mask(const std::string& path, int level) {
  ShapeMask m = rasterize_mask(load_image(path), level);
  m.source = path;
  return m;
}

GrayImage field_to_image(const ScalarField& f) {
  const Mesh& mesh = f.mesh;
  const int m = mesh.nodes_per_side();
  GrayImage img(m, m);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const double v = std::clamp(f.v[mesh.vertex_index(ix, iy)], 0.0, 1.0);
      img.at(m - 1 - iy, ix) = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  return img;
}

GrayImage mask_to_image(const ShapeMask& mask) { return field_to_image(mask.chi); }

void save_mask(const ShapeMask& mask, const std::string& path) {
  save_image(mask_to_image(mask), path);
}

}  // namespace shapeflow
