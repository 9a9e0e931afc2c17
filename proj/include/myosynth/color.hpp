#pragma once

#include <vector>

#include "myosynth/image.hpp"

namespace myosynth {

/// Hue, saturation and value, each in [0, 1]; hue wraps.
struct Hsv {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

/// Linear-in-byte-space color with components in [0, 255].
struct RgbF {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

RgbF hsv_to_rgb(Hsv c);
RgbF lerp(RgbF a, RgbF b, double t);
/// Clamp to [0, 255] and round half up.
Rgb8 to_rgb8(RgbF c);
RgbF to_rgbf(Rgb8 c);

struct ColorStop {
  double position = 0.0;
  Rgb8 color;
};

/// Piecewise-linear color ramp; stop positions strictly increasing in [0, 1].
class ColorRamp {
 public:
  explicit ColorRamp(std::vector<ColorStop> stops);
  const std::vector<ColorStop>& stops() const { return stops_; }
  /// Unrounded evaluation; t is clamped to [0, 1].
  RgbF eval(double t) const;

 private:
  std::vector<ColorStop> stops_;
};

Rgb8 ramp_map(const ColorRamp& ramp, double t);

}  // namespace myosynth
