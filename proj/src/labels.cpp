#include "myosynth/labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "myosynth/errors.hpp"
#include "myosynth/imgproc.hpp"

namespace myosynth::synth {

ClassImage extract_class_map(const LabelImage& instances, int boundary_halfwidth) {
  if (boundary_halfwidth < 0) throw std::invalid_argument("boundary_halfwidth must be >= 0");
  const int w = instances.width(), h = instances.height();
  ClassImage classes(w, h, 0);
  // A pixel is interior iff every pixel in its (2r+1)^2 window carries its id,
  // so per-row run lengths of equal ids decide the horizontal extent first.
  const int r = boundary_halfwidth;
  Mask row_uniform(w, h, 0);
  for (int y = 0; y < h; ++y) {
    auto row = instances.row(y);
    int x = 0;
    while (x < w) {
      int end = x;
      while (end + 1 < w && row[end + 1] == row[x]) ++end;
      for (int i = x; i <= end; ++i) row_uniform(i, y) = std::max(0, i - r) >= x && std::min(w - 1, i + r) <= end;
      x = end + 1;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto id = instances(x, y);
      if (!id) continue;
      bool interior = true;
      for (int dy = -r; dy <= r && interior; ++dy) {
        int ny = y + dy;
        if (ny < 0 || ny >= h) continue;
        if (!row_uniform(x, ny) || instances(x, ny) != id) interior = false;
      }
      classes(x, y) = interior ? 1 : 2;
    }
  }
  return classes;
}

void validate(const WeightParams& wp) {
  if (!(wp.w0 > 0)) throw ConfigError("weights.w0", "must be > 0");
  if (!(wp.sigma > 0)) throw ConfigError("weights.sigma", "must be > 0");
  if (!(wp.fiber_body_weight > 0)) throw ConfigError("weights.fiber_body_weight", "must be > 0");
  if (!(wp.background_weight > 0)) throw ConfigError("weights.background_weight", "must be > 0");
}

double pixel_weight(bool is_fiber, double d1, double d2, const WeightParams& wp) {
  if (is_fiber) return wp.fiber_body_weight;
  double border = 0.0;
  if (std::isfinite(d1) && std::isfinite(d2)) {
    double s = d1 + d2;
    border = wp.w0 * std::exp(-(s * s) / (2.0 * wp.sigma * wp.sigma));
  }
  return wp.background_weight + border;
}

double border_cutoff(const WeightParams& wp) {
  return wp.sigma * std::sqrt(2.0 * std::log(std::max(wp.w0, 1e-9) / 1e-9));
}

FloatImage compute_weight_map(const LabelImage& instances, const WeightParams& wp) {
  validate(wp);
  const int w = instances.width(), h = instances.height();
  constexpr double inf = std::numeric_limits<double>::infinity();

  struct Box {
    int x0 = std::numeric_limits<int>::max(), y0 = std::numeric_limits<int>::max();
    int x1 = -1, y1 = -1;
  };
  std::uint32_t max_id = 0;
  for (auto v : instances.pixels()) max_id = std::max(max_id, v);
  std::vector<Box> boxes(std::size_t(max_id) + 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto id = instances(x, y);
      if (!id) continue;
      Box& b = boxes[id];
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x);
      b.y1 = std::max(b.y1, y);
    }

  // Two nearest distinct instances per pixel, as squared distances.
  DoubleImage best1(w, h, inf), best2(w, h, inf);
  LabelImage best_id(w, h, 0);
  const int reach = static_cast<int>(std::ceil(border_cutoff(wp))) + 1;
  const double reach2 = double(reach) * reach;
  for (std::uint32_t id = 1; id <= max_id; ++id) {
    const Box& b = boxes[id];
    if (b.x1 < 0) continue;
    int x0 = std::max(0, b.x0 - reach), y0 = std::max(0, b.y0 - reach);
    int x1 = std::min(w - 1, b.x1 + reach), y1 = std::min(h - 1, b.y1 + reach);
    Mask window(x1 - x0 + 1, y1 - y0 + 1, 0);
    for (int y = b.y0; y <= b.y1; ++y)
      for (int x = b.x0; x <= b.x1; ++x)
        if (instances(x, y) == id) window(x - x0, y - y0) = 1;
    DoubleImage d2 = imgproc::squared_distance_to(window);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (instances(x, y)) continue;
        double d = d2(x - x0, y - y0);
        if (d > reach2) continue;
        std::size_t i = instances.index(x, y);
        if (d < best1[i]) {
          best2[i] = best1[i];
          best1[i] = d;
          best_id[i] = id;
        } else if (d < best2[i]) {
          best2[i] = d;
        }
      }
    }
  }

  FloatImage out(w, h);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    bool fiber = instances[i] != 0;
    out[i] = static_cast<float>(pixel_weight(fiber, std::sqrt(best1[i]), std::sqrt(best2[i]), wp));
  }
  return out;
}

}  // namespace myosynth::synth
