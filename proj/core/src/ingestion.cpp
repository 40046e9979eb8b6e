#include "skintone/ingestion.hpp"

#include "skintone/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace skintone {

using nlohmann::json;

std::string_view to_string(RegionKind kind) noexcept {
  switch (kind) {
    case RegionKind::forehead: return "forehead";
    case RegionKind::left_cheek: return "left_cheek";
    case RegionKind::right_cheek: return "right_cheek";
  }
  return "unknown";
}

std::optional<RegionKind> parse_region_kind(std::string_view name) noexcept {
  for (RegionKind k : kAllRegions) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

std::int64_t cross(Point o, Point a, Point b) {
  return static_cast<std::int64_t>(a.x - o.x) * (b.y - o.y) -
         static_cast<std::int64_t>(a.y - o.y) * (b.x - o.x);
}

int orientation(Point o, Point a, Point b) {
  const auto c = cross(o, a, b);
  return (c > 0) - (c < 0);
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

// Closed-segment intersection on integer coordinates (exact).
bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2)) return true;
  return false;
}

std::string region_label(const RegionPolygon& poly) {
  return "region '" + std::string(to_string(poly.kind)) + "'";
}

RegionPolygon parse_polygon(RegionKind kind, const json& arr) {
  if (!arr.is_array()) throw Error(Errc::parse, "region vertices must be an array");
  RegionPolygon poly{kind, {}};
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
      throw Error(Errc::parse, "vertex must be an [x, y] integer pair");
    }
    poly.vertices.push_back({v[0].get<int>(), v[1].get<int>()});
  }
  return poly;
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(Errc::parse, std::string("missing key '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw Error(Errc::parse, std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

SampleRecord parse_record(const json& obj) {
  if (!obj.is_object()) throw Error(Errc::parse, "line is not a JSON object");
  SampleRecord rec;
  rec.image_path = require_string(obj, "image_path");
  rec.subject_id = require_string(obj, "subject_id");
  rec.sample_id = require_string(obj, "sample_id");
  if (auto it = obj.find("group_label"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(Errc::parse, "group_label must be a string or null");
    rec.group_label = it->get<std::string>();
  }
  const json& regions = require(obj, "regions");
  if (!regions.is_object()) throw Error(Errc::parse, "regions must be an object");
  for (auto it = regions.begin(); it != regions.end(); ++it) {
    if (!parse_region_kind(it.key())) {
      throw Error(Errc::parse, "unknown region '" + it.key() + "'");
    }
  }
  for (RegionKind k : kAllRegions) {
    auto it = regions.find(std::string(to_string(k)));
    if (it == regions.end() || it->is_null()) continue;
    RegionPolygon poly = parse_polygon(k, *it);
    validate_polygon(poly);
    rec.regions.push_back(std::move(poly));
  }
  if (rec.regions.empty()) throw Error(Errc::parse, "sample has no regions");
  return rec;
}

} // namespace

void validate_polygon(const RegionPolygon& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) throw Error(Errc::invalid_argument, region_label(poly) + " needs at least 3 vertices");
  for (const Point& p : v) {
    if (p.x < 0 || p.y < 0) {
      throw Error(Errc::invalid_argument, region_label(poly) + " has a negative coordinate");
    }
  }
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
        throw Error(Errc::invalid_argument, region_label(poly) + " is self-intersecting");
      }
    }
  }
}

std::filesystem::path DatasetManifest::resolve(const SampleRecord& s) const {
  std::filesystem::path p(s.image_path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

DatasetManifest parse_manifest(std::istream& in, std::string dataset_name,
                               std::filesystem::path base_dir) {
  DatasetManifest manifest{std::move(dataset_name), {}, std::move(base_dir)};
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    SampleRecord rec;
    try {
      rec = parse_record(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(Errc::parse, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(Errc::parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.emplace(rec.subject_id, rec.sample_id).second) {
      throw Error(Errc::duplicate_key, "line " + std::to_string(line_no) + ": (subject_id='" +
                                           rec.subject_id + "', sample_id='" + rec.sample_id +
                                           "') appears more than once");
    }
    manifest.samples.push_back(std::move(rec));
  }
  if (manifest.samples.empty()) {
    throw Error(Errc::empty_manifest, "manifest '" + manifest.dataset_name + "' has no samples");
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.stem().string(), path.parent_path());
}

void write_manifest(std::ostream& out, const DatasetManifest& manifest) {
  for (const auto& s : manifest.samples) {
    json regions = json::object();
    for (const auto& r : s.regions) {
      json verts = json::array();
      for (const Point& p : r.vertices) verts.push_back({p.x, p.y});
      regions[std::string(to_string(r.kind))] = std::move(verts);
    }
    json obj = json::object();
    obj["image_path"] = s.image_path;
    obj["subject_id"] = s.subject_id;
    obj["sample_id"] = s.sample_id;
    obj["group_label"] = s.group_label ? json(*s.group_label) : json(nullptr);
    obj["regions"] = std::move(regions);
    out << obj.dump() << '\n';
  }
}

PixelPatch extract_patch(const RgbImage& image, const RegionPolygon& poly,
                         const PatchOptions& options) {
  validate_polygon(poly);
  int ymin = poly.vertices.front().y;
  int ymax = ymin;
  for (const Point& p : poly.vertices) {
    if (p.x > image.width || p.y > image.height) {
      throw Error(Errc::out_of_bounds, region_label(poly) + " vertex (" + std::to_string(p.x) + "," +
                                           std::to_string(p.y) + ") outside " +
                                           std::to_string(image.width) + "x" +
                                           std::to_string(image.height) + " image");
    }
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }

  PixelPatch patch;
  patch.kind = poly.kind;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  std::vector<double> crossings;
  for (int y = ymin; y < ymax; ++y) {
    const double py = y + 0.5;
    crossings.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const double yi = v[i].y, yj = v[j].y;
      if ((yi > py) != (yj > py)) {
        const double xi = v[i].x, xj = v[j].x;
        crossings.push_back((xj - xi) * (py - yi) / (yj - yi) + xi);
      }
    }
    std::sort(crossings.begin(), crossings.end());
    // Pixel center x + 0.5 is inside iff it falls in [c[2k], c[2k+1]).
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(crossings[k] - 0.5)));
      const int x1 = std::min(image.width, static_cast<int>(std::ceil(crossings[k + 1] - 0.5)));
      for (int x = x0; x < x1; ++x) {
        patch.pixels.push_back(image.at(x, y));
        patch.coords.push_back({x, y});
      }
    }
  }
  if (patch.size() < options.min_patch_pixels) {
    throw Error(Errc::too_few_pixels, region_label(poly) + " covers " +
                                          std::to_string(patch.size()) + " pixels, need " +
                                          std::to_string(options.min_patch_pixels));
  }
  return patch;
}

std::vector<PixelPatch> extract_patches(const RgbImage& image, const SampleRecord& record,
                                        const PatchOptions& options) {
  std::vector<PixelPatch> out;
  out.reserve(record.regions.size());
  for (const auto& r : record.regions) out.push_back(extract_patch(image, r, options));
  return out;
}

} // namespace skintone
