#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "myosynth/image.hpp"
#include "myosynth/polygon.hpp"

namespace myosynth::features {

enum class Region { whole, soleus, gastrocnemius };

std::string to_string(Region r);
/// Throws ConfigError for unknown names.
Region region_from_string(const std::string& name, const std::string& field = "region");

struct FiberRecord {
  std::uint32_t id = 0;
  double area_um2 = 0.0;
  double perimeter_um = 0.0;
  double circularity = 0.0;
  double feret_min_um = 0.0;
  double feret_max_um = 0.0;
  double equiv_diameter_um = 0.0;
  double centroid_x_um = 0.0;
  double centroid_y_um = 0.0;
  Region region = Region::whole;
  bool excluded = false;

  /// Fiber "diameter" is the minimum Feret diameter.
  double diameter_um() const { return feret_min_um; }
};

/// Shape of one pixel set, in pixels.
struct Shape {
  std::int64_t area = 0;
  double perimeter = 0.0;
  double circularity = 0.0;
  double feret_min = 0.0;
  double feret_max = 0.0;
  double centroid_x = 0.0;  // continuous coordinates, pixel centers at +0.5
  double centroid_y = 0.0;
};

/// Contour length of the 8-connected outer boundaries of a pixel set, traced
/// through pixel centers and measured with the corner-count estimator
/// 0.980 n_even + 1.406 n_odd - 0.091 n_corners, then moved out to the pixel
/// edges by adding pi per part. Input: (x, y) pixel coordinates.
double traced_perimeter(const std::vector<std::pair<int, int>>& pixels);

/// Min/max caliper widths of the convex hull of the pixel centers.
std::pair<double, double> feret_diameters(const std::vector<std::pair<int, int>>& pixels);

/// 4 pi area / perimeter^2 clamped to 1.
double circularity(double area, double perimeter);

/// Shapes of all labels 1..max; absent ids get area 0.
std::vector<Shape> measure_shapes(const LabelImage& labels);

/// One record per present id, ordered by id.
std::vector<FiberRecord> measure_objects(const LabelImage& labels, double um_per_px);

struct RegionPolygon {
  Region region = Region::soleus;
  geom::Polygon polygon;  // um
};

/// Tags each record with the first polygon containing its centroid. Records
/// inside no polygon become gastrocnemius when a soleus polygon is given,
/// whole otherwise. Throws ConfigError for non-simple polygons.
void assign_regions(std::vector<FiberRecord>& records, const std::vector<RegionPolygon>& polygons);

/// CSV with header id,area_um2,...,region,excluded; LF line endings.
void write_fiber_csv(std::ostream& out, const std::vector<FiberRecord>& records);
std::string fiber_csv(const std::vector<FiberRecord>& records);
std::vector<FiberRecord> parse_fiber_csv(const std::string& text);

}  // namespace myosynth::features
