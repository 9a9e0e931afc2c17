#include "myosynth/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "myosynth/color.hpp"
#include "myosynth/errors.hpp"
#include "myosynth/imgproc.hpp"
#include "myosynth/noise.hpp"
#include "myosynth/random.hpp"

namespace myosynth::synth {

using noise::Vec2;

namespace {

enum Stream : std::uint64_t {
  kFiberGrid = 1,
  kPerimGrid,
  kFiberWarp,
  kPerimWarp,
  kGapNoise,
  kBandNoise,
  kTexture,
  kTissue,
  kFiberColor,
  kNuclei,
  kFreezeHoles,
  kFold,
  kSpill,
  kGrain,
  kTissueEdge,
};

std::uint64_t stream(const SceneParams& p, Stream s) { return hash_combine(p.seed, s); }

double lerp(double a, double b, double t) { return a + (b - a) * t; }
double unit_noise(std::uint64_t seed, double freq, int octaves, Vec2 p) {
  return 0.5 + 0.5 * noise::value_noise(seed, freq, octaves, p);
}
double smooth01(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

RgbF scale(RgbF c, double k) { return {c.r * k, c.g * k, c.b * k}; }

// Pixel-space quantities derived from the um-denominated scene description.
struct Layout {
  noise::FeatureGrid fiber;
  noise::FeatureGrid perim;
  noise::WarpField fiber_warp;
  noise::WarpField perim_warp;
  double gap_min = 0, gap_max = 0, gap_freq = 0;
  double band_min = 0, band_max = 0, band_freq = 0;
  double fiber_cell = 0;
};

Layout make_layout(const SceneParams& p) {
  const double g = p.geometry_um_per_px;
  Layout L;
  L.fiber_cell = std::sqrt(1e6 / p.fiber_density) / g;
  const double perim_cell = std::sqrt(1e6 / p.perimysium.density) / g;
  L.fiber = {L.fiber_cell, stream(p, kFiberGrid), p.fiber_jitter};
  L.perim = {perim_cell, stream(p, kPerimGrid), 1.0};
  L.fiber_warp = {p.warp.frequency * g, p.warp.amplitude / g, p.warp.octaves, stream(p, kFiberWarp)};
  L.perim_warp = {1.5 / perim_cell, p.perimysium.waviness / g, 3, stream(p, kPerimWarp)};
  L.gap_min = p.endomysium_gap.min / g;
  L.gap_max = p.endomysium_gap.max / g;
  L.gap_freq = 1.0 / (1.5 * L.fiber_cell);
  L.band_min = p.perimysium.band_width.min / g;
  L.band_max = p.perimysium.band_width.max / g;
  L.band_freq = 3.0 / perim_cell;
  return L;
}

noise::FeatureTable make_table(const noise::FeatureGrid& grid, const noise::WarpField& warp, const SceneParams& p) {
  double m = warp.amplitude * noise::octave_gain_sum(warp.octaves) + 1.0;
  return noise::FeatureTable(grid, {-m, -m}, {p.width + m, p.height + m});
}

// Section outline: a wavy straight edge placed so that the requested
// fraction of the field lies on the tissue side.
struct TissueField {
  bool full = true;
  Vec2 center, normal;
  double amplitude = 0, frequency = 0, level = 0;
  std::uint64_t seed = 0;

  double coord(Vec2 p) const {
    return (p.x - center.x) * normal.x + (p.y - center.y) * normal.y +
           amplitude * noise::value_noise(seed, frequency, 3, p);
  }
  bool inside(Vec2 p) const { return full || coord(p) < level; }
};

TissueField make_tissue(const SceneParams& params) {
  TissueField t;
  if (params.tissue_coverage >= 1.0) return t;
  const double g = params.geometry_um_per_px;
  Rng rng(stream(params, kTissueEdge));
  double angle = rng.uniform(0.0, 6.283185307179586);
  t.full = false;
  t.center = {params.width * 0.5, params.height * 0.5};
  t.normal = {std::cos(angle), std::sin(angle)};
  t.amplitude = 80.0 / g;
  t.frequency = g / 250.0;
  t.seed = rng.next();
  constexpr int kGrid = 64;
  std::vector<double> coords;
  coords.reserve(kGrid * kGrid);
  for (int j = 0; j < kGrid; ++j)
    for (int i = 0; i < kGrid; ++i)
      coords.push_back(t.coord({(i + 0.5) * params.width / kGrid, (j + 0.5) * params.height / kGrid}));
  std::sort(coords.begin(), coords.end());
  auto k = static_cast<std::size_t>(params.tissue_coverage * coords.size());
  t.level = k == 0 ? -std::numeric_limits<double>::infinity() : coords[k - 1] + 1e-9;
  return t;
}

struct Owner {
  std::uint32_t fascicle = 0;
  bool in_tissue = true;
};

// A fiber belongs to the fascicle (coarse cell) and tissue side found at its
// feature point, mapped back through the fiber warp by fixed-point iteration.
Owner owner_of(const Layout& L, const noise::FeatureTable& perim, const TissueField& tissue, Vec2 feature) {
  Vec2 p0 = feature;
  for (int k = 0; k < 4; ++k) {
    Vec2 d = noise::warp_displacement(L.fiber_warp, p0);
    p0 = {feature.x - d.x, feature.y - d.y};
  }
  return {perim.eval(noise::warp_point(L.perim_warp, p0)).cell_id, tissue.inside(p0)};
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
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
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Pixels grouped by instance id (counting sort), ids 1..n.
struct PixelGroups {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> pixels;
  std::span<const std::uint32_t> of(std::uint32_t id) const {
    return std::span<const std::uint32_t>(pixels).subspan(offsets[id], offsets[id + 1] - offsets[id]);
  }
};

PixelGroups group_pixels(const LabelImage& labels, std::uint32_t n) {
  PixelGroups g;
  g.offsets.assign(std::size_t(n) + 2, 0);
  for (auto l : labels.pixels()) ++g.offsets[std::size_t(l) + 1];
  g.offsets[0] = 0;
  // offsets[id] = start of id; background occupies slot 0.
  for (std::size_t i = 1; i < g.offsets.size(); ++i) g.offsets[i] += g.offsets[i - 1];
  std::vector<std::uint32_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  g.pixels.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) g.pixels[cursor[labels[i]]++] = static_cast<std::uint32_t>(i);
  return g;
}

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(std::size_t(w) * h) {}
  RgbF& at(std::size_t i) { return px_[i]; }
  RgbF& at(int x, int y) { return px_[std::size_t(y) * w_ + x]; }
  int width() const { return w_; }
  int height() const { return h_; }
  void blend(std::size_t i, RgbF c, double alpha) { px_[i] = lerp(px_[i], c, std::clamp(alpha, 0.0, 1.0)); }

  void gaussian_blur(double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0;
    for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    for (auto& v : k) v /= sum;
    std::vector<RgbF> tmp(px_.size());
    auto pass = [&](const std::vector<RgbF>& src, std::vector<RgbF>& dst, bool horizontal) {
      for (int y = 0; y < h_; ++y)
        for (int x = 0; x < w_; ++x) {
          RgbF acc{};
          for (int i = -r; i <= r; ++i) {
            int sx = horizontal ? std::clamp(x + i, 0, w_ - 1) : x;
            int sy = horizontal ? y : std::clamp(y + i, 0, h_ - 1);
            const RgbF& s = src[std::size_t(sy) * w_ + sx];
            acc.r += k[i + r] * s.r;
            acc.g += k[i + r] * s.g;
            acc.b += k[i + r] * s.b;
          }
          dst[std::size_t(y) * w_ + x] = acc;
        }
    };
    pass(px_, tmp, true);
    pass(tmp, px_, false);
  }

  RgbImage finish(std::uint64_t grain_seed, double grain) const {
    RgbImage out(w_, h_);
    for (int y = 0; y < h_; ++y)
      for (int x = 0; x < w_; ++x) {
        const RgbF& c = px_[std::size_t(y) * w_ + x];
        double n = (to_unit(hash_cell(grain_seed, x, y)) - 0.5) * grain;
        out(x, y) = to_rgb8({c.r + n, c.g + n, c.b + n});
      }
    return out;
  }

 private:
  int w_, h_;
  std::vector<RgbF> px_;
};

void paint_ellipse(Canvas& canvas, Vec2 c, double a, double b, double theta, RgbF color, std::uint64_t seed) {
  const double reach = a * 1.3 + 2.0;
  const int x0 = std::max(0, int(std::floor(c.x - reach))), x1 = std::min(canvas.width() - 1, int(std::ceil(c.x + reach)));
  const int y0 = std::max(0, int(std::floor(c.y - reach))), y1 = std::min(canvas.height() - 1, int(std::ceil(c.y + reach)));
  const double ct = std::cos(theta), st = std::sin(theta);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      Vec2 p{x + 0.5, y + 0.5};
      double dx = p.x - c.x, dy = p.y - c.y;
      double u = dx * ct + dy * st;
      double v = -dx * st + dy * ct;
      double rho = std::sqrt((u / a) * (u / a) + (v / b) * (v / b));
      double edge = 1.0 + 0.18 * noise::value_noise(seed, 1.5 / a, 1, p);
      double alpha = std::clamp((edge - rho) * b, 0.0, 1.0);
      if (alpha <= 0.0) continue;
      double chroma = 1.0 + 0.12 * noise::value_noise(seed ^ 0x9e37ULL, 0.6, 1, p);
      canvas.blend(std::size_t(y) * canvas.width() + x, scale(color, chroma), 0.92 * alpha);
    }
}

void paint_tissue(const SceneParams& params, const Geometry& geo, const DoubleImage& fiber_dist, Canvas& canvas) {
  const int w = params.width, h = params.height;
  const auto& stain = params.stain;
  const RgbF endo = hsv_to_rgb(stain.endomysium);
  const RgbF perim = hsv_to_rgb(stain.perimysium);
  const RgbF background = hsv_to_rgb(stain.background);

  std::vector<RgbF> fiber_color(std::size_t(geo.fiber_count) + 1);
  const std::uint64_t color_seed = stream(params, kFiberColor);
  for (std::uint32_t id = 1; id <= geo.fiber_count; ++id) {
    std::uint64_t hsh = hash_combine(color_seed, geo.cell_ids[id]);
    double u1 = to_unit(mix64(hsh ^ 1)) * 2 - 1, u2 = to_unit(mix64(hsh ^ 2)) * 2 - 1, u3 = to_unit(mix64(hsh ^ 3)) * 2 - 1;
    Hsv c{stain.cytoplasm.h + stain.cytoplasm_jitter.h * u1, stain.cytoplasm.s + stain.cytoplasm_jitter.s * u2,
          stain.cytoplasm.v + stain.cytoplasm_jitter.v * u3};
    fiber_color[id] = hsv_to_rgb(c);
  }
  const std::uint64_t tex = stream(params, kTexture);
  const std::uint64_t tissue = stream(params, kTissue);
  const double amp = stain.texture_amplitude;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Vec2 p{x + 0.5, y + 0.5};
      std::size_t i = geo.instances.index(x, y);
      auto id = geo.instances[i];
      RgbF c;
      if (id) {
        double coarse = noise::value_noise(tex, 1.0 / 7.0, 3, p);
        double fine = noise::value_noise(tex ^ 0x51ULL, 1.0 / 2.2, 1, p);
        double d = fiber_dist[i];
        double rim = std::isfinite(d) ? 1.0 - 0.07 * std::exp(-d / 2.5) : 1.0;
        c = scale(fiber_color[id], (1.0 + amp * (0.8 * coarse + 0.4 * fine)) * rim);
      } else if (geo.perimysium[i]) {
        double streak = noise::value_noise(tissue ^ 0x77ULL, 1.0, 2, {p.x / 3.0, p.y / 11.0});
        c = scale(lerp(perim, background, 0.25 * unit_noise(tissue, 1.0 / 20.0, 2, p)), 1.0 + 0.07 * streak);
      } else if (!geo.tissue[i]) {
        c = scale(background, 1.0 + 0.01 * noise::value_noise(tissue, 0.3, 1, p));
      } else {
        double loose = smooth01(0.5 + 0.9 * noise::value_noise(tissue ^ 0x33ULL, 1.0 / 12.0, 2, p));
        c = scale(lerp(endo, background, 0.35 * loose), 1.0 + 0.03 * noise::value_noise(tissue, 0.5, 1, p));
      }
      canvas.at(i) = c;
    }
}

void paint_nuclei(const SceneParams& params, const Geometry& geo, const PixelGroups& groups, const DoubleImage& fiber_dist,
                  Canvas& canvas) {
  const double g = params.geometry_um_per_px;
  const int w = params.width;
  const std::uint64_t seed = stream(params, kNuclei);
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t id = 1; id <= geo.fiber_count; ++id) {
    Rng rng(hash_combine(seed, geo.cell_ids[id]));
    auto pixels = groups.of(id);
    double rim_px = 0;
    std::uint32_t deepest = pixels.front();
    for (auto i : pixels) {
      double d = fiber_dist[i];
      if (d < 1.5) rim_px += 1.0;
      if (d > fiber_dist[deepest]) deepest = i;
    }
    auto nucleus = [&](Vec2 c, Vec2 normal, bool central) {
      double r = rng.uniform(params.nuclei.radius.min, params.nuclei.radius.max) / g;
      double e = rng.uniform(params.nuclei.eccentricity.min, params.nuclei.eccentricity.max);
      double theta = central ? rng.uniform(0.0, 3.141592653589793) : std::atan2(normal.y, normal.x) + 1.5707963267948966;
      Hsv jitter = params.stain.nucleus;
      jitter.v *= 1.0 + 0.1 * (rng.uniform() * 2 - 1);
      paint_ellipse(canvas, c, r, r * std::sqrt(1.0 - e * e), theta, hsv_to_rgb(jitter), rng.next());
    };
    const double mean_r = 0.5 * (params.nuclei.radius.min + params.nuclei.radius.max) / g;
    int n = rng.poisson(params.nuclei.peripheral_density * rim_px * g);
    if (n > 0) {
      candidates.clear();
      for (auto i : pixels) {
        double d = fiber_dist[i];
        if (d >= 0.7 * mean_r && d <= 2.0 * mean_r) candidates.push_back(i);
      }
      for (int k = 0; k < n && !candidates.empty(); ++k) {
        std::uint32_t i = candidates[rng.next() % candidates.size()];
        int x = int(i % std::uint32_t(w)), y = int(i / std::uint32_t(w));
        auto sample = [&](int sx, int sy) {
          sx = std::clamp(sx, 0, params.width - 1);
          sy = std::clamp(sy, 0, params.height - 1);
          double d = fiber_dist(sx, sy);
          return std::isfinite(d) ? d : fiber_dist[i];
        };
        Vec2 normal{sample(x + 1, y) - sample(x - 1, y), sample(x, y + 1) - sample(x, y - 1)};
        nucleus({x + 0.5, y + 0.5}, normal, false);
      }
    }
    if (rng.bernoulli(params.nuclei.central_prob) && fiber_dist[deepest] > 1.5 * mean_r) {
      int x = int(deepest % std::uint32_t(w)), y = int(deepest / std::uint32_t(w));
      nucleus({x + 0.5, y + 0.5}, {1.0, 0.0}, true);
    }
  }
}

void paint_artifacts(const SceneParams& params, const Geometry& geo, const PixelGroups& groups, Canvas& canvas) {
  const double g = params.geometry_um_per_px;
  const int w = params.width, h = params.height;
  const RgbF background = hsv_to_rgb(params.stain.background);

  // Freeze holes: whitened cellular spots inside affected fibers.
  const std::uint64_t holes = stream(params, kFreezeHoles);
  const double hole_px = params.artifacts.freeze_hole_size / g;
  for (std::uint32_t id = 1; id <= geo.fiber_count; ++id) {
    std::uint64_t fs = hash_combine(holes, geo.cell_ids[id]);
    if (!(to_unit(fs) < params.artifacts.freeze_hole_prob)) continue;
    noise::FeatureGrid grid{hole_px * 1.6, mix64(fs), 1.0};
    for (auto i : groups.of(id)) {
      Vec2 p{double(i % std::uint32_t(w)) + 0.5, double(i / std::uint32_t(w)) + 0.5};
      auto s = noise::worley_eval(grid, p);
      double radius = 0.5 * hole_px * (0.8 + 0.4 * unit_noise(fs, 1.0 / hole_px, 1, p));
      double alpha = std::clamp(radius - s.f1, 0.0, 1.5) / 1.5;
      if (alpha > 0) canvas.blend(i, background, 0.9 * alpha);
    }
  }

  // Fold: a dark, saturated band along a noisy line.
  Rng fold(stream(params, kFold));
  if (fold.bernoulli(params.artifacts.fold_prob)) {
    double angle = fold.uniform(0.0, 3.141592653589793);
    Vec2 c{fold.uniform(0.0, w), fold.uniform(0.0, h)};
    double half = fold.uniform(6.0, 20.0);
    std::uint64_t fs = fold.next();
    Vec2 n{-std::sin(angle), std::cos(angle)};
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        Vec2 p{x + 0.5, y + 0.5};
        double s = (p.x - c.x) * n.x + (p.y - c.y) * n.y + 15.0 * noise::value_noise(fs, 1.0 / 150.0, 2, p);
        double width = half * (1.0 + 0.3 * noise::value_noise(fs ^ 1, 1.0 / 60.0, 1, p));
        double alpha = smooth01((width - std::abs(s)) / 3.0);
        if (alpha <= 0) continue;
        std::size_t i = std::size_t(y) * w + x;
        RgbF cur = canvas.at(i);
        RgbF dark{cur.r * 0.62, cur.g * 0.5, cur.b * 0.6};
        canvas.blend(i, dark, alpha);
      }
  }

  // Stain spill: saturated irregular blob.
  Rng spill(stream(params, kSpill));
  if (spill.bernoulli(params.artifacts.spill_prob)) {
    Vec2 c{spill.uniform(0.0, w), spill.uniform(0.0, h)};
    double radius = spill.uniform(40.0, 160.0);
    std::uint64_t ss = spill.next();
    Hsv hue = params.stain.nucleus;
    hue.s = std::min(1.0, hue.s + 0.25);
    hue.v = std::min(1.0, hue.v + 0.15);
    RgbF color = hsv_to_rgb(hue);
    int x0 = std::max(0, int(c.x - 1.5 * radius)), x1 = std::min(w - 1, int(c.x + 1.5 * radius));
    int y0 = std::max(0, int(c.y - 1.5 * radius)), y1 = std::min(h - 1, int(c.y + 1.5 * radius));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        Vec2 p{x + 0.5, y + 0.5};
        double r = std::hypot(p.x - c.x, p.y - c.y) / radius + 0.35 * noise::value_noise(ss, 3.0 / radius, 2, p);
        if (r >= 1.0) continue;
        canvas.blend(std::size_t(y) * w + x, color, 0.55 * smooth01((1.0 - r) * 4.0));
      }
  }
}

}  // namespace

Geometry render_geometry(const SceneParams& params) {
  validate(params);
  const int w = params.width, h = params.height;
  const Layout L = make_layout(params);
  const std::uint64_t gap_seed = stream(params, kGapNoise);
  const std::uint64_t band_seed = stream(params, kBandNoise);

  const noise::FeatureTable perim_table = make_table(L.perim, L.perim_warp, params);
  const noise::FeatureTable fiber_table = make_table(L.fiber, L.fiber_warp, params);
  const TissueField tissue = make_tissue(params);

  std::vector<std::uint64_t> raw(std::size_t(w) * h, 0);
  Geometry geo;
  geo.perimysium = Mask(w, h, 0);
  geo.tissue = Mask(w, h, 0);
  std::unordered_map<std::uint32_t, Owner> owners;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec2 p{x + 0.5, y + 0.5};
      const std::size_t i = std::size_t(y) * w + x;
      const bool in_tissue = tissue.inside(p);
      geo.tissue[i] = in_tissue;
      auto P = perim_table.eval(noise::warp_point(L.perim_warp, p));
      if (in_tissue) {
        double band = lerp(L.band_min, L.band_max, unit_noise(band_seed, L.band_freq, 2, p));
        if (P.f2 - P.f1 < band) {
          geo.perimysium[i] = 1;
          continue;
        }
      }
      auto F = fiber_table.eval(noise::warp_point(L.fiber_warp, p));
      double gap = lerp(L.gap_min, L.gap_max, unit_noise(gap_seed, L.gap_freq, 2, p));
      if (F.f2 - F.f1 <= gap) continue;
      auto it = owners.find(F.cell_id);
      if (it == owners.end()) it = owners.emplace(F.cell_id, owner_of(L, perim_table, tissue, F.nearest_point)).first;
      if (!it->second.in_tissue || it->second.fascicle != P.cell_id) continue;
      raw[i] = std::uint64_t(F.cell_id) + 1;
    }
  }

  // Split each raw cell id into 4-connected regions; colliding ids or cells
  // cut by a band become separate instances.
  UnionFind uf(raw.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::size_t i = std::size_t(y) * w + x;
      if (!raw[i]) continue;
      if (x > 0 && raw[i - 1] == raw[i]) uf.unite(std::uint32_t(i), std::uint32_t(i - 1));
      if (y > 0 && raw[i - w] == raw[i]) uf.unite(std::uint32_t(i), std::uint32_t(i - w));
    }
  std::vector<std::uint32_t> area(raw.size(), 0);
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw[i]) ++area[uf.find(std::uint32_t(i))];

  geo.instances = LabelImage(w, h, 0);
  std::unordered_map<std::uint32_t, std::uint32_t> ids;
  geo.cell_ids.assign(1, 0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!raw[i]) continue;
    std::uint32_t root = uf.find(std::uint32_t(i));
    if (area[root] < std::uint32_t(params.min_fragment_px)) continue;
    auto it = ids.find(root);
    if (it == ids.end()) {
      if (ids.size() >= kMaxFibers)
        throw GenerationError("scene exceeds " + std::to_string(kMaxFibers) + " fibers (16-bit label limit)");
      it = ids.emplace(root, static_cast<std::uint32_t>(ids.size() + 1)).first;
      geo.cell_ids.push_back(static_cast<std::uint32_t>(raw[i] - 1));
    }
    geo.instances[i] = it->second;
  }
  geo.fiber_count = static_cast<std::uint32_t>(ids.size());
  return geo;
}

RenderedSample render_sample(const SceneParams& params, const RenderOptions& options) {
  Geometry geo = render_geometry(params);
  RenderedSample out;
  out.classes = extract_class_map(geo.instances, params.boundary_halfwidth);
  if (options.weights) out.weights = compute_weight_map(geo.instances, options.weight_params);

  DoubleImage fiber_dist = imgproc::squared_distance_to(imgproc::invert(imgproc::foreground(geo.instances)));
  for (auto& v : fiber_dist.pixels()) v = std::sqrt(v);
  PixelGroups groups = group_pixels(geo.instances, geo.fiber_count);

  Canvas canvas(params.width, params.height);
  paint_tissue(params, geo, fiber_dist, canvas);
  paint_nuclei(params, geo, groups, fiber_dist, canvas);
  paint_artifacts(params, geo, groups, canvas);
  canvas.gaussian_blur(0.6);
  out.rgb = canvas.finish(stream(params, kGrain), 6.0);

  out.meta = {params.seed, params.um_per_px, geo.fiber_count, params_digest(params)};
  out.instances = std::move(geo.instances);
  return out;
}

}  // namespace myosynth::synth
