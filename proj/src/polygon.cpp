#include "myosynth/polygon.hpp"

#include <algorithm>
#include <cmath>

#include "myosynth/errors.hpp"

namespace myosynth::geom {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

int sign(double v) { return (v > 0) - (v < 0); }

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point a, Point b, Point c, Point d) {
  int d1 = sign(cross(c, d, a)), d2 = sign(cross(c, d, b));
  int d3 = sign(cross(a, b, c)), d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) || (d3 == 0 && on_segment(a, b, c)) ||
         (d4 == 0 && on_segment(a, b, d));
}

}  // namespace

double signed_area(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (const auto& p : poly)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  if (signed_area(poly) == 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    Point a = poly[i], b = poly[(i + 1) % n];
    if (a.x == b.x && a.y == b.y) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      Point c = poly[j], d = poly[(j + 1) % n];
      bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Sharing the common vertex is allowed; folding back onto the edge is not.
        Point shared = j == i + 1 ? b : a;
        Point other_ab = j == i + 1 ? a : b;
        Point other_cd = j == i + 1 ? d : c;
        if (cross(shared, other_ab, other_cd) == 0.0 &&
            (other_ab.x - shared.x) * (other_cd.x - shared.x) + (other_ab.y - shared.y) * (other_cd.y - shared.y) > 0)
          return false;
        continue;
      }
      if (segments_touch(a, b, c, d)) return false;
    }
  }
  return true;
}

void require_simple(const Polygon& poly, const std::string& field) {
  if (poly.size() < 3) throw ConfigError(field, "polygon needs at least 3 vertices");
  if (!is_simple(poly)) throw ConfigError(field, "polygon is degenerate or self-intersecting");
}

bool contains(const Polygon& poly, Point p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace myosynth::geom
