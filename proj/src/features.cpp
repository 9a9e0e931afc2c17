#include "myosynth/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "myosynth/errors.hpp"
#include "myosynth/imgproc.hpp"

namespace myosynth::features {

namespace {

constexpr double kPi = 3.141592653589793;

// Clockwise ring in image coordinates (y down), starting east.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int direction_of(int dx, int dy) {
  for (int k = 0; k < 8; ++k)
    if (kDx[k] == dx && kDy[k] == dy) return k;
  return -1;
}

// Moore-neighbour trace of the part containing `start`, the part's first
// pixel in raster order. Returns the chain code.
std::vector<int> trace(const Mask& m, int sx, int sy) {
  auto fg = [&](int x, int y) { return m.contains(x, y) && m(x, y); };
  std::vector<int> chain;
  int cx = sx, cy = sy;
  int bx = sx - 1, by = sy;  // backtrack: last background pixel examined
  const std::size_t limit = 8 * m.size() + 16;
  for (std::size_t step = 0; step < limit; ++step) {
    int k0 = direction_of(bx - cx, by - cy);
    int found = -1;
    int px = bx, py = by;
    for (int t = 1; t <= 8; ++t) {
      int k = (k0 + t) % 8;
      int nx = cx + kDx[k], ny = cy + kDy[k];
      if (fg(nx, ny)) {
        found = k;
        break;
      }
      px = nx;
      py = ny;
    }
    if (found < 0) return chain;  // isolated pixel
    // The state after a move depends only on (pixel, direction), so the
    // contour repeats once the first move from the start recurs.
    if (cx == sx && cy == sy && !chain.empty() && found == chain.front()) return chain;
    chain.push_back(found);
    cx += kDx[found];
    cy += kDy[found];
    bx = px;
    by = py;
  }
  throw std::logic_error("contour trace did not close");
}

double chain_length(const std::vector<int>& chain) {
  if (chain.empty()) return 0.0;
  std::int64_t even = 0, odd = 0, corners = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    (chain[i] % 2 == 0 ? even : odd) += 1;
    if (chain[i] != chain[(i + chain.size() - 1) % chain.size()]) ++corners;
  }
  return 0.980 * even + 1.406 * odd - 0.091 * corners;
}

struct Pt {
  std::int64_t x, y;
};

std::int64_t cross(Pt o, Pt a, Pt b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](Pt a, Pt b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end(), [](Pt a, Pt b) { return a.x == b.x && a.y == b.y; }), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Pt> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Local raster of a pixel set with a one-pixel background margin.
struct LocalMask {
  Mask mask;
  int x0 = 0, y0 = 0;
};

LocalMask local_mask(const std::vector<std::pair<int, int>>& pixels) {
  int x0 = pixels[0].first, x1 = x0, y0 = pixels[0].second, y1 = y0;
  for (auto [x, y] : pixels) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  LocalMask lm{Mask(x1 - x0 + 3, y1 - y0 + 3, 0), x0 - 1, y0 - 1};
  for (auto [x, y] : pixels) lm.mask(x - lm.x0, y - lm.y0) = 1;
  return lm;
}

}  // namespace

std::string to_string(Region r) {
  switch (r) {
    case Region::whole: return "whole";
    case Region::soleus: return "soleus";
    case Region::gastrocnemius: return "gastrocnemius";
  }
  return "whole";
}

Region region_from_string(const std::string& name, const std::string& field) {
  if (name == "whole") return Region::whole;
  if (name == "soleus") return Region::soleus;
  if (name == "gastrocnemius") return Region::gastrocnemius;
  throw ConfigError(field, "unknown region '" + name + "'");
}

double traced_perimeter(const std::vector<std::pair<int, int>>& pixels) {
  if (pixels.empty()) return 0.0;
  LocalMask lm = local_mask(pixels);
  auto parts = imgproc::connected_components(lm.mask, imgproc::Connectivity::eight);
  std::vector<bool> traced(std::size_t(parts.count) + 1, false);
  double total = 0.0;
  for (int y = 0; y < lm.mask.height(); ++y)
    for (int x = 0; x < lm.mask.width(); ++x) {
      auto l = parts.labels(x, y);
      if (!l || traced[l]) continue;
      traced[l] = true;
      total += chain_length(trace(lm.mask, x, y)) + kPi;
    }
  return total;
}

std::pair<double, double> feret_diameters(const std::vector<std::pair<int, int>>& pixels) {
  std::vector<Pt> pts;
  pts.reserve(pixels.size());
  for (auto [x, y] : pixels) pts.push_back({x, y});
  auto hull = convex_hull(std::move(pts));
  if (hull.size() <= 1) return {0.0, 0.0};
  std::int64_t max2 = 0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      std::int64_t dx = hull[i].x - hull[j].x, dy = hull[i].y - hull[j].y;
      max2 = std::max(max2, dx * dx + dy * dy);
    }
  double feret_max = std::sqrt(double(max2));
  if (hull.size() == 2) return {0.0, feret_max};
  // Minimum width is attained with a hull edge flush against one caliper.
  double min_width = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    Pt a = hull[i], b = hull[(i + 1) % hull.size()];
    double len = std::hypot(double(b.x - a.x), double(b.y - a.y));
    std::int64_t far = 0;
    for (const Pt& p : hull) far = std::max(far, std::abs(cross(a, b, p)));
    min_width = std::min(min_width, double(far) / len);
  }
  return {min_width, feret_max};
}

double circularity(double area, double perimeter) {
  if (perimeter <= 0.0) return 1.0;
  return std::min(1.0, 4.0 * kPi * area / (perimeter * perimeter));
}

std::vector<Shape> measure_shapes(const LabelImage& labels) {
  std::uint32_t max_id = 0;
  for (auto v : labels.pixels()) max_id = std::max(max_id, v);
  std::vector<std::vector<std::pair<int, int>>> pixels(std::size_t(max_id) + 1);
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x)
      if (auto l = labels(x, y)) pixels[l].emplace_back(x, y);
  std::vector<Shape> shapes(std::size_t(max_id) + 1);
  for (std::uint32_t id = 1; id <= max_id; ++id) {
    const auto& px = pixels[id];
    if (px.empty()) continue;
    Shape& s = shapes[id];
    s.area = static_cast<std::int64_t>(px.size());
    double sx = 0, sy = 0;
    for (auto [x, y] : px) {
      sx += x;
      sy += y;
    }
    s.centroid_x = sx / px.size() + 0.5;
    s.centroid_y = sy / px.size() + 0.5;
    s.perimeter = traced_perimeter(px);
    s.circularity = circularity(double(s.area), s.perimeter);
    std::tie(s.feret_min, s.feret_max) = feret_diameters(px);
  }
  return shapes;
}

std::vector<FiberRecord> measure_objects(const LabelImage& labels, double um_per_px) {
  if (!(um_per_px > 0.0)) throw ConfigError("um_per_px", "must be > 0");
  auto shapes = measure_shapes(labels);
  std::vector<FiberRecord> out;
  for (std::uint32_t id = 1; id < shapes.size(); ++id) {
    const Shape& s = shapes[id];
    if (s.area == 0) continue;
    FiberRecord r;
    r.id = id;
    r.area_um2 = s.area * um_per_px * um_per_px;
    r.perimeter_um = s.perimeter * um_per_px;
    r.circularity = s.circularity;
    r.feret_min_um = s.feret_min * um_per_px;
    r.feret_max_um = s.feret_max * um_per_px;
    r.equiv_diameter_um = 2.0 * std::sqrt(r.area_um2 / kPi);
    r.centroid_x_um = s.centroid_x * um_per_px;
    r.centroid_y_um = s.centroid_y * um_per_px;
    out.push_back(r);
  }
  return out;
}

void assign_regions(std::vector<FiberRecord>& records, const std::vector<RegionPolygon>& polygons) {
  bool has_soleus = false;
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    geom::require_simple(polygons[i].polygon, "regions[" + std::to_string(i) + "].polygon");
    has_soleus = has_soleus || polygons[i].region == Region::soleus;
  }
  const Region fallback = has_soleus ? Region::gastrocnemius : Region::whole;
  for (auto& r : records) {
    r.region = fallback;
    for (const auto& poly : polygons)
      if (geom::contains(poly.polygon, {r.centroid_x_um, r.centroid_y_um})) {
        r.region = poly.region;
        break;
      }
  }
}

}  // namespace myosynth::features
