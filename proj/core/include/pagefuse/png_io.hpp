#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagefuse/page.hpp"

namespace pagefuse {

/// 8-bit single-channel PNG; used for class masks (pixel value = class id)
/// and grayscale page images.
void write_gray_png(const std::string& path, int height, int width,
                    const std::vector<uint8_t>& pixels);
void read_gray_png(const std::string& path, int& height, int& width,
                   std::vector<uint8_t>& pixels);

/// 8-bit RGB PNG; used for false-color visualizations.
void write_rgb_png(const std::string& path, int height, int width,
                   const std::vector<uint8_t>& pixels);

void write_mask_png(const std::string& path, const ClassMask& mask);
ClassMask read_mask_png(const std::string& path);

/// Grayscale image <-> float raster in [0,1].
void write_image_png(const std::string& path, const Image& image);
Image read_image_png(const std::string& path);

}  // namespace pagefuse
