#include "myosynth/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace myosynth::imgproc {

namespace {

constexpr double kFar = 1e20;

constexpr int kDx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDx4[4] = {0, -1, 1, 0};
constexpr int kDy4[4] = {-1, 0, 0, 1};

// Felzenszwalb-Huttenlocher lower envelope of parabolas.
void edt_1d(const double* f, int n, double* d, int* v, double* z) {
  auto intersect = [f](int q, int p) {
    return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
  };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = double(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

void edt_2d(std::vector<double>& grid, int w, int h) {
  int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = grid[std::size_t(y) * w + x];
    edt_1d(f.data(), h, d.data(), v.data(), z.data());
    for (int y = 0; y < h; ++y) grid[std::size_t(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    double* row = grid.data() + std::size_t(y) * w;
    std::copy(row, row + w, f.begin());
    edt_1d(f.data(), w, d.data(), v.data(), z.data());
    std::copy(d.begin(), d.begin() + w, row);
  }
}

struct DisjointSet {
  std::vector<std::uint32_t> parent;
  std::uint32_t make() {
    parent.push_back(static_cast<std::uint32_t>(parent.size()));
    return parent.back();
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b)
      parent[b] = a;
    else
      parent[a] = b;
  }
};

// Square-window sweep used by both dilation (any) and erosion (all in-image).
Mask window_filter(const Mask& mask, int radius, bool erode_mode) {
  const int w = mask.width(), h = mask.height();
  Mask tmp(w, h), out(w, h);
  auto pass = [&](const Mask& src, Mask& dst, bool horizontal) {
    const int outer = horizontal ? h : w;
    const int inner = horizontal ? w : h;
    std::vector<int> prefix(inner + 1);
    for (int o = 0; o < outer; ++o) {
      prefix[0] = 0;
      for (int i = 0; i < inner; ++i) {
        std::uint8_t v = horizontal ? src(i, o) : src(o, i);
        prefix[i + 1] = prefix[i] + (v ? 1 : 0);
      }
      for (int i = 0; i < inner; ++i) {
        int lo = std::max(0, i - radius);
        int hi = std::min(inner - 1, i + radius);
        int fg = prefix[hi + 1] - prefix[lo];
        bool on = erode_mode ? fg == hi - lo + 1 : fg > 0;
        if (horizontal)
          dst(i, o) = on;
        else
          dst(o, i) = on;
      }
    }
  };
  pass(mask, tmp, true);
  pass(tmp, out, false);
  return out;
}

}  // namespace

Mask threshold_map(const ProbabilityMap& prob, int level) {
  Mask out(prob.width(), prob.height());
  for (std::size_t i = 0; i < prob.size(); ++i) {
    long v = std::lround(255.0 * static_cast<double>(prob[i]));
    out[i] = v >= level ? 1 : 0;
  }
  return out;
}

Components connected_components(const Mask& mask, Connectivity conn) {
  const int w = mask.width(), h = mask.height();
  LabelImage provisional(w, h, 0);
  DisjointSet sets;
  sets.make();  // index 0 = background
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      std::uint32_t label = 0;
      auto visit = [&](int nx, int ny) {
        if (!mask.contains(nx, ny)) return;
        std::uint32_t l = provisional(nx, ny);
        if (l == 0) return;
        if (label == 0)
          label = l;
        else
          sets.unite(label, l);
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (conn == Connectivity::eight) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      provisional(x, y) = label ? label : sets.make();
    }
  }
  std::vector<std::uint32_t> final_id(sets.parent.size(), 0);
  Components result{LabelImage(w, h, 0), 0};
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    std::uint32_t l = provisional[i];
    if (!l) continue;
    std::uint32_t root = sets.find(l);
    if (!final_id[root]) final_id[root] = ++result.count;
    result.labels[i] = final_id[root];
  }
  return result;
}

std::uint32_t compact_labels(LabelImage& labels) {
  std::vector<std::uint32_t> remap;
  std::uint32_t next = 0;
  for (auto& v : labels.pixels()) {
    if (!v) continue;
    if (v >= remap.size()) remap.resize(std::size_t(v) + 1, 0);
    if (!remap[v]) remap[v] = ++next;
    v = remap[v];
  }
  return next;
}

Mask dilate(const Mask& mask, int iterations) {
  if (iterations < 0) throw std::invalid_argument("dilate: negative iteration count");
  if (iterations == 0) return mask;
  return window_filter(mask, iterations, false);
}

Mask erode(const Mask& mask, int iterations) {
  if (iterations < 0) throw std::invalid_argument("erode: negative iteration count");
  if (iterations == 0) return mask;
  return window_filter(mask, iterations, true);
}

Mask invert(const Mask& mask) {
  Mask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 0 : 1;
  return out;
}

Mask fill_holes(const Mask& mask) {
  const int w = mask.width(), h = mask.height();
  Mask outside(w, h, 0);
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int x, int y) {
    if (!mask(x, y) && !outside(x, y)) {
      outside(x, y) = 1;
      queue.emplace_back(x, y);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      int nx = x + kDx4[k], ny = y + kDy4[k];
      if (mask.contains(nx, ny)) seed(nx, ny);
    }
  }
  Mask out(w, h);
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = (mask[i] || !outside[i]) ? 1 : 0;
  return out;
}

Mask area_opening(const Mask& mask, std::int64_t max_area, Connectivity conn) {
  if (max_area < 0) throw std::invalid_argument("area_opening: negative max_area");
  if (max_area == 0) return mask;
  auto cc = connected_components(mask, conn);
  std::vector<std::int64_t> area(cc.count + 1, 0);
  for (auto l : cc.labels.pixels()) ++area[l];
  std::vector<bool> keep(cc.count + 1, false);
  for (std::uint32_t l = 1; l <= cc.count; ++l) keep[l] = area[l] > max_area;
  return select_labels(cc.labels, keep);
}

DoubleImage squared_distance_to(const Mask& features) {
  const int w = features.width(), h = features.height();
  DoubleImage out(w, h);
  if (w == 0 || h == 0) return out;
  auto& g = out.data();
  for (std::size_t i = 0; i < features.size(); ++i) g[i] = features[i] ? 0.0 : kFar;
  edt_2d(g, w, h);
  for (auto& v : g)
    if (v >= kFar * 0.5) v = std::numeric_limits<double>::infinity();
  return out;
}

DoubleImage squared_distance_transform(const Mask& mask) {
  const int w = mask.width(), h = mask.height();
  const int pw = w + 2, ph = h + 2;
  std::vector<double> g(std::size_t(pw) * ph, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g[std::size_t(y + 1) * pw + (x + 1)] = mask(x, y) ? kFar : 0.0;
  edt_2d(g, pw, ph);
  DoubleImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(x, y) = g[std::size_t(y + 1) * pw + (x + 1)];
  return out;
}

DoubleImage distance_transform(const Mask& mask) {
  DoubleImage d = squared_distance_transform(mask);
  for (auto& v : d.pixels()) v = std::sqrt(v);
  return d;
}

LabelImage watershed_split(const Mask& mask, double h) {
  const int w = mask.width(), ht = mask.height();
  const DoubleImage dist = distance_transform(mask);

  // h-maxima: morphological reconstruction by dilation of (D - h) under D.
  DoubleImage rec(w, ht, -std::numeric_limits<double>::infinity());
  {
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item> heap;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      rec[i] = dist[i] - h;
      heap.emplace(rec[i], i);
    }
    while (!heap.empty()) {
      auto [v, i] = heap.top();
      heap.pop();
      if (v < rec[i]) continue;
      int x = int(i % std::size_t(w)), y = int(i / std::size_t(w));
      for (int k = 0; k < 8; ++k) {
        int nx = x + kDx8[k], ny = y + kDy8[k];
        if (!mask.contains(nx, ny) || !mask(nx, ny)) continue;
        std::size_t j = mask.index(nx, ny);
        double cand = std::min(v, dist[j]);
        if (cand > rec[j]) {
          rec[j] = cand;
          heap.emplace(cand, j);
        }
      }
    }
  }

  // Regional maxima of the reconstruction become seeds.
  LabelImage labels(w, ht, 0);
  std::uint32_t seeds = 0;
  {
    Mask visited(w, ht, 0);
    std::vector<std::size_t> plateau;
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < mask.size(); ++start) {
      if (!mask[start] || visited[start]) continue;
      const double level = rec[start];
      plateau.clear();
      bool is_max = true;
      visited[start] = 1;
      queue.push_back(start);
      while (!queue.empty()) {
        std::size_t i = queue.front();
        queue.pop_front();
        plateau.push_back(i);
        int x = int(i % std::size_t(w)), y = int(i / std::size_t(w));
        for (int k = 0; k < 8; ++k) {
          int nx = x + kDx8[k], ny = y + kDy8[k];
          if (!mask.contains(nx, ny) || !mask(nx, ny)) continue;
          std::size_t j = mask.index(nx, ny);
          if (rec[j] > level) {
            is_max = false;
          } else if (rec[j] == level && !visited[j]) {
            visited[j] = 1;
            queue.push_back(j);
          }
        }
      }
      if (is_max) {
        ++seeds;
        for (auto i : plateau) labels[i] = seeds;
      }
    }
  }

  // Priority flood; higher distance first, FIFO among equals.
  struct Item {
    double priority;
    std::uint64_t order;
    std::size_t index;
    bool operator<(const Item& o) const {
      if (priority != o.priority) return priority < o.priority;
      return order > o.order;
    }
  };
  std::priority_queue<Item> heap;
  std::uint64_t order = 0;
  Mask queued(w, ht, 0);
  Mask line(w, ht, 0);
  auto push_neighbors = [&](std::size_t i) {
    int x = int(i % std::size_t(w)), y = int(i / std::size_t(w));
    for (int k = 0; k < 8; ++k) {
      int nx = x + kDx8[k], ny = y + kDy8[k];
      if (!mask.contains(nx, ny) || !mask(nx, ny)) continue;
      std::size_t j = mask.index(nx, ny);
      if (labels[j] || queued[j]) continue;
      queued[j] = 1;
      heap.push({dist[j], order++, j});
    }
  };
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (labels[i]) push_neighbors(i);
  while (!heap.empty()) {
    Item it = heap.top();
    heap.pop();
    std::size_t i = it.index;
    int x = int(i % std::size_t(w)), y = int(i / std::size_t(w));
    std::uint32_t found = 0;
    bool conflict = false;
    for (int k = 0; k < 8; ++k) {
      int nx = x + kDx8[k], ny = y + kDy8[k];
      if (!mask.contains(nx, ny)) continue;
      std::uint32_t l = labels(nx, ny);
      if (!l) continue;
      if (!found)
        found = l;
      else if (l != found)
        conflict = true;
    }
    if (conflict || !found) {
      line[i] = 1;
      continue;
    }
    labels[i] = found;
    push_neighbors(i);
  }
  compact_labels(labels);
  return labels;
}

DoubleImage local_thickness(const Mask& mask, double um_per_px) {
  if (!(um_per_px > 0.0)) throw std::invalid_argument("local_thickness: um_per_px must be positive");
  const int w = mask.width(), h = mask.height();
  const DoubleImage d2 = squared_distance_transform(mask);
  DoubleImage radius(w, h, 0.0);
  for (std::size_t i = 0; i < d2.size(); ++i) radius[i] = std::sqrt(d2[i]);

  DoubleImage out(w, h, 0.0);
  std::vector<std::size_t> centers;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      const double r = radius(x, y);
      bool redundant = false;
      for (int k = 0; k < 8 && !redundant; ++k) {
        int nx = x + kDx8[k], ny = y + kDy8[k];
        if (!mask.contains(nx, ny)) continue;
        double step = (kDx8[k] != 0 && kDy8[k] != 0) ? 1.4142135623730951 : 1.0;
        // Disc of (x, y) lies inside the neighbor's disc.
        if (radius(nx, ny) >= r + step + 1e-9) redundant = true;
      }
      if (!redundant) centers.push_back(mask.index(x, y));
    }
  }
  for (std::size_t c : centers) {
    const int cx = int(c % std::size_t(w)), cy = int(c / std::size_t(w));
    const auto r2 = static_cast<std::int64_t>(d2[c]);
    const double value = 2.0 * radius[c];
    const auto reach = static_cast<int>(std::ceil(radius[c]));
    for (int dy = -reach; dy <= reach; ++dy) {
      std::int64_t rem = r2 - std::int64_t(dy) * dy - 1;  // dx^2 + dy^2 < r2
      if (rem < 0) continue;
      auto dxmax = static_cast<std::int64_t>(std::sqrt(static_cast<double>(rem)));
      while (dxmax * dxmax > rem) --dxmax;
      while ((dxmax + 1) * (dxmax + 1) <= rem) ++dxmax;
      int y = cy + dy;
      if (y < 0 || y >= h) continue;
      int x0 = std::max(0, cx - int(dxmax));
      int x1 = std::min(w - 1, cx + int(dxmax));
      double* row = out.data().data() + std::size_t(y) * w;
      for (int x = x0; x <= x1; ++x)
        if (row[x] < value) row[x] = value;
    }
  }
  for (auto& v : out.pixels()) v *= um_per_px;
  return out;
}

double masked_mean(const DoubleImage& values, const Mask& mask) {
  require_same_shape(values, mask, "masked_mean");
  double sum = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    sum += values[i];
    ++n;
  }
  return n ? sum / double(n) : 0.0;
}

std::int64_t count(const Mask& mask) {
  std::int64_t n = 0;
  for (auto v : mask.pixels()) n += v ? 1 : 0;
  return n;
}

Mask mask_and(const Mask& a, const Mask& b) {
  require_same_shape(a, b, "mask_and");
  Mask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
  return out;
}

Mask mask_and_not(const Mask& a, const Mask& b) {
  require_same_shape(a, b, "mask_and_not");
  Mask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && !b[i]) ? 1 : 0;
  return out;
}

bool is_subset(const Mask& a, const Mask& b) {
  require_same_shape(a, b, "is_subset");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

Mask foreground(const LabelImage& labels) {
  Mask out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] ? 1 : 0;
  return out;
}

Mask select_labels(const LabelImage& labels, const std::vector<bool>& keep) {
  Mask out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto l = labels[i];
    out[i] = (l && l < keep.size() && keep[l]) ? 1 : 0;
  }
  return out;
}

}  // namespace myosynth::imgproc
