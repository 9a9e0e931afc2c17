#include "myosynth/color.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace myosynth {

RgbF hsv_to_rgb(Hsv c) {
  double h = c.h - std::floor(c.h);
  double s = std::clamp(c.s, 0.0, 1.0);
  double v = std::clamp(c.v, 0.0, 1.0);
  double h6 = h * 6.0;
  int sector = static_cast<int>(h6) % 6;
  double f = h6 - std::floor(h6);
  double p = v * (1.0 - s);
  double q = v * (1.0 - s * f);
  double t = v * (1.0 - s * (1.0 - f));
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  return {r * 255.0, g * 255.0, b * 255.0};
}

RgbF lerp(RgbF a, RgbF b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

static std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::floor(std::clamp(v, 0.0, 255.0) + 0.5));
}

Rgb8 to_rgb8(RgbF c) { return {to_byte(c.r), to_byte(c.g), to_byte(c.b)}; }

RgbF to_rgbf(Rgb8 c) { return {double(c.r), double(c.g), double(c.b)}; }

ColorRamp::ColorRamp(std::vector<ColorStop> stops) : stops_(std::move(stops)) {
  if (stops_.empty()) throw std::invalid_argument("color ramp needs at least one stop");
  for (std::size_t i = 0; i < stops_.size(); ++i) {
    double p = stops_[i].position;
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("color ramp stop outside [0, 1]");
    if (i > 0 && !(p > stops_[i - 1].position))
      throw std::invalid_argument("color ramp stops must be strictly increasing");
  }
}

RgbF ColorRamp::eval(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  if (t <= stops_.front().position) return to_rgbf(stops_.front().color);
  if (t >= stops_.back().position) return to_rgbf(stops_.back().color);
  auto hi = std::upper_bound(stops_.begin(), stops_.end(), t,
                             [](double v, const ColorStop& s) { return v < s.position; });
  auto lo = hi - 1;
  double u = (t - lo->position) / (hi->position - lo->position);
  return lerp(to_rgbf(lo->color), to_rgbf(hi->color), u);
}

Rgb8 ramp_map(const ColorRamp& ramp, double t) { return to_rgb8(ramp.eval(t)); }

}  // namespace myosynth
