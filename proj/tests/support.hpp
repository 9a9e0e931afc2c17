#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "myosynth/image.hpp"
#include "myosynth/noise.hpp"
#include "myosynth/random.hpp"

namespace testutil {

using namespace myosynth;

// ---------- generators ----------

/// Independent pixels with probability p.
inline Mask random_mask(Rng& rng, int w, int h, double p) {
  Mask m(w, h);
  for (auto& v : m.pixels()) v = rng.bernoulli(p) ? 1 : 0;
  return m;
}

/// Union of random discs and rectangles; gives realistic blobs with holes
/// and bays when combined with a sprinkling of removed pixels.
inline Mask blob_mask(Rng& rng, int w, int h) {
  Mask m(w, h);
  int shapes = rng.uniform_int(1, 8);
  for (int s = 0; s < shapes; ++s) {
    double cx = rng.uniform(0, w), cy = rng.uniform(0, h);
    if (rng.bernoulli(0.5)) {
      double r = rng.uniform(1, std::max(2.0, std::min(w, h) / 3.0));
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < r * r) m(x, y) = 1;
    } else {
      int rw = rng.uniform_int(1, std::max(1, w / 2)), rh = rng.uniform_int(1, std::max(1, h / 2));
      for (int y = int(cy); y < std::min(h, int(cy) + rh); ++y)
        for (int x = int(cx); x < std::min(w, int(cx) + rw); ++x) m(x, y) = 1;
    }
  }
  double holes = rng.uniform(0.0, 0.15);
  for (auto& v : m.pixels())
    if (rng.bernoulli(holes)) v = 0;
  return m;
}

/// Mixes both generators so suites see sparse noise and solid shapes.
inline Mask any_mask(Rng& rng, int max_side = 64) {
  int w = rng.uniform_int(1, max_side), h = rng.uniform_int(1, max_side);
  return rng.bernoulli(0.4) ? random_mask(rng, w, h, rng.uniform(0.05, 0.95)) : blob_mask(rng, w, h);
}

inline void paint_disc(Mask& m, double cx, double cy, double r) {
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if ((x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy) <= r * r) m(x, y) = 1;
}

inline void paint_rect(Mask& m, int x0, int y0, int w, int h, std::uint8_t v = 1) {
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x)
      if (m.contains(x, y)) m(x, y) = v;
}

// ---------- oracles ----------

/// Nearest and second-nearest feature point over every cell of a rectangle,
/// scanned row-major with strict improvement.
inline noise::WorleySample worley_exhaustive(const noise::FeatureGrid& g, noise::Vec2 p, std::int64_t i0,
                                             std::int64_t i1, std::int64_t j0, std::int64_t j1) {
  double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
  noise::WorleySample s;
  for (std::int64_t j = j0; j <= j1; ++j)
    for (std::int64_t i = i0; i <= i1; ++i) {
      noise::Vec2 f = noise::feature_point(g, i, j);
      double dx = f.x - p.x, dy = f.y - p.y;
      double d = dx * dx + dy * dy;
      if (d < d1) {
        d2 = d1;
        d1 = d;
        s.cell_id = noise::feature_cell_id(g, i, j);
        s.nearest_point = f;
      } else if (d < d2) {
        d2 = d;
      }
    }
  s.f1 = std::sqrt(d1);
  s.f2 = std::sqrt(d2);
  return s;
}

/// BFS labelling in raster order of first pixel.
inline LabelImage flood_labels(const Mask& m, bool eight, std::uint32_t* count = nullptr) {
  LabelImage out(m.width(), m.height());
  std::uint32_t next = 0;
  std::deque<std::pair<int, int>> q;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || out(x, y)) continue;
      out(x, y) = ++next;
      q.push_back({x, y});
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop_front();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (!dx && !dy) continue;
            if (!eight && dx && dy) continue;
            int nx = cx + dx, ny = cy + dy;
            if (m.contains(nx, ny) && m(nx, ny) && !out(nx, ny)) {
              out(nx, ny) = next;
              q.push_back({nx, ny});
            }
          }
      }
    }
  if (count) *count = next;
  return out;
}

/// Set iff some in-image foreground pixel lies within Chebyshev distance n.
inline Mask dilate_def(const Mask& m, int n) {
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      for (int dy = -n; dy <= n && !out(x, y); ++dy)
        for (int dx = -n; dx <= n; ++dx)
          if (m.contains(x + dx, y + dy) && m(x + dx, y + dy)) {
            out(x, y) = 1;
            break;
          }
  return out;
}

/// Set iff every in-image pixel within Chebyshev distance n is foreground.
inline Mask erode_def(const Mask& m, int n) {
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      bool all = true;
      for (int dy = -n; dy <= n && all; ++dy)
        for (int dx = -n; dx <= n; ++dx)
          if (m.contains(x + dx, y + dy) && !m(x + dx, y + dy)) {
            all = false;
            break;
          }
      out(x, y) = all ? 1 : 0;
    }
  return out;
}

/// Background pixels not 4-connected to the border become foreground.
inline Mask fill_holes_def(const Mask& m) {
  Mask reach(m.width(), m.height());
  std::deque<std::pair<int, int>> q;
  auto seed = [&](int x, int y) {
    if (!m(x, y) && !reach(x, y)) {
      reach(x, y) = 1;
      q.push_back({x, y});
    }
  };
  for (int x = 0; x < m.width(); ++x) {
    seed(x, 0);
    seed(x, m.height() - 1);
  }
  for (int y = 0; y < m.height(); ++y) {
    seed(0, y);
    seed(m.width() - 1, y);
  }
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop_front();
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      if (m.contains(nx, ny)) seed(nx, ny);
    }
  }
  Mask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = reach[i] ? 0 : 1;
  return out;
}

inline Mask area_opening_def(const Mask& m, std::int64_t max_area, bool eight) {
  std::uint32_t n = 0;
  LabelImage l = flood_labels(m, eight, &n);
  std::vector<std::int64_t> area(n + 1, 0);
  for (auto v : l.pixels()) ++area[v];
  Mask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = (l[i] && area[l[i]] > max_area) ? 1 : 0;
  return out;
}

/// Distance to the nearest background pixel or to the one-pixel frame.
inline DoubleImage edt_brute(const Mask& m) {
  const int w = m.width(), h = m.height();
  std::vector<std::pair<int, int>> bg;
  for (int y = -1; y <= h; ++y)
    for (int x = -1; x <= w; ++x)
      if (!m.contains(x, y) || !m(x, y)) bg.push_back({x, y});
  DoubleImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!m(x, y)) continue;
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (auto [bx, by] : bg) best = std::min<std::int64_t>(best, std::int64_t(bx - x) * (bx - x) + std::int64_t(by - y) * (by - y));
      out(x, y) = std::sqrt(double(best));
    }
  return out;
}

/// Largest disc diameter over every mask center whose open disc covers the pixel.
inline DoubleImage local_thickness_brute(const Mask& m, double um_per_px) {
  DoubleImage d = edt_brute(m);
  DoubleImage out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y)) continue;
      double best = 0.0;
      for (int cy = 0; cy < m.height(); ++cy)
        for (int cx = 0; cx < m.width(); ++cx) {
          if (!m(cx, cy)) continue;
          double r = d(cx, cy);
          double dd = double(cx - x) * (cx - x) + double(cy - y) * (cy - y);
          if (dd < r * r - 1e-9) best = std::max(best, 2.0 * r);
        }
      out(x, y) = best * um_per_px;
    }
  return out;
}

struct AssignmentOracle {
  int count = 0;
  double total_iou = 0.0;
};

/// Exhaustive one-to-one assignment maximizing (count, total IoU) over pairs
/// with IoU >= tau. Exponential; keep to a handful of objects.
inline AssignmentOracle best_assignment(const std::vector<std::vector<double>>& iou, double tau) {
  const std::size_t n = iou.size();
  const std::size_t m = n ? iou[0].size() : 0;
  AssignmentOracle best;
  std::vector<bool> used(m, false);
  auto rec = [&](auto&& self, std::size_t row, int cnt, double sum) -> void {
    if (row == n) {
      if (cnt > best.count || (cnt == best.count && sum > best.total_iou + 1e-12)) best = {cnt, sum};
      return;
    }
    self(self, row + 1, cnt, sum);
    for (std::size_t c = 0; c < m; ++c)
      if (!used[c] && iou[row][c] >= tau) {
        used[c] = true;
        self(self, row + 1, cnt + 1, sum + iou[row][c]);
        used[c] = false;
      }
  };
  rec(rec, 0, 0, 0.0);
  return best;
}

/// Dense IoU table between label ids 1..ng and 1..np.
inline std::vector<std::vector<double>> iou_matrix(const LabelImage& gt, const LabelImage& pred, std::uint32_t ng,
                                                   std::uint32_t np) {
  std::vector<std::vector<double>> inter(ng, std::vector<double>(np, 0.0));
  std::vector<double> ag(ng, 0), ap(np, 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i]) ++ag[gt[i] - 1];
    if (pred[i]) ++ap[pred[i] - 1];
    if (gt[i] && pred[i]) ++inter[gt[i] - 1][pred[i] - 1];
  }
  for (std::uint32_t a = 0; a < ng; ++a)
    for (std::uint32_t b = 0; b < np; ++b)
      if (inter[a][b] > 0) inter[a][b] /= (ag[a] + ap[b] - inter[a][b]);
  return inter;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("myosynth_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil
