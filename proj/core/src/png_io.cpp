#include "pagefuse/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace pagefuse {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

void write_png(const std::string& path, int height, int width, int channels,
               const std::vector<uint8_t>& pixels) {
  if (height <= 0 || width <= 0)
    throw std::runtime_error("png: non-positive dimensions");
  if (pixels.size() != static_cast<size_t>(height) * width * channels)
    throw std::runtime_error("png: pixel buffer size mismatch");

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("png: cannot open for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<size_t>(y) * width * channels));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_gray_png(const std::string& path, int height, int width,
                    const std::vector<uint8_t>& pixels) {
  write_png(path, height, width, 1, pixels);
}

void write_rgb_png(const std::string& path, int height, int width,
                   const std::vector<uint8_t>& pixels) {
  write_png(path, height, width, 3, pixels);
}

void read_gray_png(const std::string& path, int& height, int& width,
                   std::vector<uint8_t>& pixels) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("png: cannot open: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("png: init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("png: read failed: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Normalize everything to 8-bit grayscale.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  int color = png_get_color_type(png, info);
  if (color & PNG_COLOR_MASK_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1, -1);
  png_read_update_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  pixels.assign(static_cast<size_t>(height) * width, 0);
  for (int y = 0; y < height; ++y)
    png_read_row(png, pixels.data() + static_cast<size_t>(y) * width, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
}

void write_mask_png(const std::string& path, const ClassMask& mask) {
  write_gray_png(path, mask.height, mask.width, mask.labels);
}

ClassMask read_mask_png(const std::string& path) {
  ClassMask mask;
  read_gray_png(path, mask.height, mask.width, mask.labels);
  return mask;
}

void write_image_png(const std::string& path, const Image& image) {
  if (image.channels != 1)
    throw std::runtime_error("png: only grayscale image rasters are written as PNG");
  std::vector<uint8_t> px(image.data.size());
  for (size_t i = 0; i < px.size(); ++i) {
    double v = std::clamp(image.data[i], 0.0, 1.0);
    px[i] = static_cast<uint8_t>(std::lround(v * 255.0f));
  }
  write_gray_png(path, image.height, image.width, px);
}

Image read_image_png(const std::string& path) {
  int h = 0, w = 0;
  std::vector<uint8_t> px;
  read_gray_png(path, h, w, px);
  Image img(h, w, 1);
  for (size_t i = 0; i < px.size(); ++i) img.data[i] = px[i] / 255.0f;
  return img;
}

}  // namespace pagefuse
