#pragma once

#include <map>
#include <string>
#include <vector>

#include "pagefuse/page.hpp"

namespace pagefuse {

enum class RegionShape { Rect, Polygon };

/// One labeled region as exported by the annotator, coordinates as given.
struct Region {
  RegionShape shape = RegionShape::Rect;
  // Rect: {x_min, y_min, x_max, y_max}. Polygon: flat {x0, y0, x1, y1, ...}.
  std::vector<double> coords;
  uint8_t class_id = 0;
  std::string class_name;
};

struct PageAnnotations {
  std::string page_id;
  std::vector<Region> regions;  // file order, preserved for last-wins rasterization
};

/// Parse a VIA-style region export (JSON document):
///   { "pages": { "<id>": { "regions": [
///       { "shape": "rect"|"polygon", "coords": [...], "class": "<name>" } ] } } }
/// Unknown class names and self-intersecting polygons are rejected.
/// Pages with an empty region list are kept (pages without annotations).
std::vector<PageAnnotations> parse_annotations(const std::string& path,
                                               const std::map<std::string, ClassLabel>& class_map);
std::vector<PageAnnotations> parse_annotations_text(const std::string& text,
                                                    const std::map<std::string, ClassLabel>& class_map);

void write_annotations(const std::string& path, const std::vector<PageAnnotations>& pages);

/// Scan-convert regions into a class mask using the pixel-center inclusion
/// test. Pixels in no region get 0; on overlap the later region wins.
ClassMask rasterize_labels(const std::vector<Region>& regions, int height, int width);

/// Pixel-center point-in-polygon (even-odd rule), exposed for tests.
bool point_in_polygon(const std::vector<double>& coords, double x, double y);

}  // namespace pagefuse
