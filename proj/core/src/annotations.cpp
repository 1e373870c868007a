#include "pagefuse/annotations.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pagefuse {

namespace {

using nlohmann::json;

struct Seg {
  double ax, ay, bx, by;
};

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Proper (interior) segment intersection; shared endpoints do not count.
bool segments_cross(const Seg& s, const Seg& t) {
  double d1 = cross(s.ax, s.ay, s.bx, s.by, t.ax, t.ay);
  double d2 = cross(s.ax, s.ay, s.bx, s.by, t.bx, t.by);
  double d3 = cross(t.ax, t.ay, t.bx, t.by, s.ax, s.ay);
  double d4 = cross(t.ax, t.ay, t.bx, t.by, s.bx, s.by);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 &&
         d3 != 0 && d4 != 0;
}

bool polygon_self_intersects(const std::vector<double>& c) {
  size_t n = c.size() / 2;
  if (n < 4) return false;
  std::vector<Seg> segs;
  for (size_t i = 0; i < n; ++i) {
    size_t j = (i + 1) % n;
    segs.push_back({c[2 * i], c[2 * i + 1], c[2 * j], c[2 * j + 1]});
  }
  for (size_t i = 0; i < segs.size(); ++i) {
    for (size_t j = i + 2; j < segs.size(); ++j) {
      if (i == 0 && j == segs.size() - 1) continue;  // adjacent around the wrap
      if (segments_cross(segs[i], segs[j])) return true;
    }
  }
  return false;
}

Region parse_region(const json& jr, const std::map<std::string, ClassLabel>& class_map,
                    std::vector<std::string>& unknown) {
  Region r;
  std::string shape = jr.at("shape").get<std::string>();
  if (shape == "rect") {
    r.shape = RegionShape::Rect;
  } else if (shape == "polygon") {
    r.shape = RegionShape::Polygon;
  } else {
    throw std::runtime_error("annotations: unknown shape '" + shape + "'");
  }
  r.coords = jr.at("coords").get<std::vector<double>>();
  if (r.shape == RegionShape::Rect && r.coords.size() != 4)
    throw std::runtime_error("annotations: rect needs 4 coords");
  if (r.shape == RegionShape::Polygon) {
    if (r.coords.size() < 6 || r.coords.size() % 2 != 0)
      throw std::runtime_error("annotations: polygon needs an even number (>= 6) of coords");
    if (polygon_self_intersects(r.coords))
      throw std::runtime_error("annotations: self-intersecting polygon");
  }
  r.class_name = jr.at("class").get<std::string>();
  auto it = class_map.find(r.class_name);
  if (it == class_map.end()) {
    unknown.push_back(r.class_name);
  } else {
    r.class_id = it->second.id;
  }
  return r;
}

}  // namespace

std::vector<PageAnnotations> parse_annotations_text(
    const std::string& text, const std::map<std::string, ClassLabel>& class_map) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("annotations: invalid document: ") + e.what());
  }
  if (!doc.contains("pages")) throw std::runtime_error("annotations: missing 'pages'");

  std::vector<PageAnnotations> out;
  std::vector<std::string> unknown;
  for (const auto& [page_id, jp] : doc["pages"].items()) {
    PageAnnotations pa;
    pa.page_id = page_id;
    if (jp.contains("regions")) {
      for (const auto& jr : jp["regions"]) {
        pa.regions.push_back(parse_region(jr, class_map, unknown));
      }
    }
    out.push_back(std::move(pa));
  }
  if (!unknown.empty()) {
    std::string msg = "annotations: unknown class names:";
    for (const auto& n : unknown) msg += " '" + n + "'";
    throw std::runtime_error(msg);
  }
  return out;
}

std::vector<PageAnnotations> parse_annotations(
    const std::string& path, const std::map<std::string, ClassLabel>& class_map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_annotations_text(ss.str(), class_map);
}

void write_annotations(const std::string& path, const std::vector<PageAnnotations>& pages) {
  json doc;
  doc["pages"] = json::object();
  for (const auto& p : pages) {
    json jregions = json::array();
    for (const auto& r : p.regions) {
      json jr;
      jr["shape"] = r.shape == RegionShape::Rect ? "rect" : "polygon";
      jr["coords"] = r.coords;
      jr["class"] = r.class_name;
      jregions.push_back(jr);
    }
    doc["pages"][p.page_id] = {{"regions", jregions}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write annotation file: " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace pagefuse
