#pragma once

#include <string>
#include <vector>

namespace myosynth::geom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Polygon = std::vector<Point>;

/// Signed shoelace area (positive for counter-clockwise in y-up axes).
double signed_area(const Polygon& poly);

/// True for >= 3 vertices, nonzero area and no two non-adjacent edges
/// touching; adjacent edges may only share their common vertex.
bool is_simple(const Polygon& poly);

/// Throws ConfigError(field, ...) unless `poly` is simple.
void require_simple(const Polygon& poly, const std::string& field);

/// Even-odd crossing test with a ray towards +x. For points on the outline,
/// edges facing -x and -y count as inside and edges facing +x and +y as
/// outside, so tiles sharing an edge never both claim a point.
bool contains(const Polygon& poly, Point p);

}  // namespace myosynth::geom
