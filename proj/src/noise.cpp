#include "myosynth/noise.hpp"

#include <cmath>
#include <limits>

#include "myosynth/random.hpp"

namespace myosynth::noise {

namespace {

constexpr std::uint64_t kOffsetStream = 0x5bd1e9955bd1e995ULL;
constexpr std::uint64_t kOctaveStream = 0x2545f4914f6cdd1dULL;
constexpr std::uint64_t kWarpYStream = 0x7f4a7c159e3779b9ULL;

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double single_octave(std::uint64_t seed, Vec2 p) {
  double fx = std::floor(p.x);
  double fy = std::floor(p.y);
  auto i = static_cast<std::int64_t>(fx);
  auto j = static_cast<std::int64_t>(fy);
  double tx = smoothstep(p.x - fx);
  double ty = smoothstep(p.y - fy);
  double v00 = lattice_value(seed, i, j);
  double v10 = lattice_value(seed, i + 1, j);
  double v01 = lattice_value(seed, i, j + 1);
  double v11 = lattice_value(seed, i + 1, j + 1);
  double a = v00 + (v10 - v00) * tx;
  double b = v01 + (v11 - v01) * tx;
  return a + (b - a) * ty;
}

}  // namespace

Vec2 feature_point(const FeatureGrid& grid, std::int64_t i, std::int64_t j) {
  std::uint64_t h = mix64(hash_cell(grid.seed, i, j) ^ kOffsetStream);
  double ux = static_cast<double>(h >> 32) * 0x1.0p-32;
  double uy = static_cast<double>(h & 0xffffffffULL) * 0x1.0p-32;
  double cx = (static_cast<double>(i) + 0.5 + (ux - 0.5) * grid.jitter) * grid.cell_size;
  double cy = (static_cast<double>(j) + 0.5 + (uy - 0.5) * grid.jitter) * grid.cell_size;
  return {cx, cy};
}

std::uint32_t feature_cell_id(const FeatureGrid& grid, std::int64_t i, std::int64_t j) {
  return static_cast<std::uint32_t>(hash_cell(grid.seed, i, j) & 0xffffffffULL);
}

WorleySample worley_eval(const FeatureGrid& grid, Vec2 p) {
  auto ci = static_cast<std::int64_t>(std::floor(p.x / grid.cell_size));
  auto cj = static_cast<std::int64_t>(std::floor(p.y / grid.cell_size));
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = d1;
  std::int64_t bi = ci, bj = cj;
  Vec2 best{};
  for (std::int64_t j = cj - 2; j <= cj + 2; ++j) {
    for (std::int64_t i = ci - 2; i <= ci + 2; ++i) {
      Vec2 f = feature_point(grid, i, j);
      double dx = f.x - p.x;
      double dy = f.y - p.y;
      double d = dx * dx + dy * dy;
      if (d < d1) {
        d2 = d1;
        d1 = d;
        bi = i;
        bj = j;
        best = f;
      } else if (d < d2) {
        d2 = d;
      }
    }
  }
  return {std::sqrt(d1), std::sqrt(d2), feature_cell_id(grid, bi, bj), best};
}

FeatureTable::FeatureTable(const FeatureGrid& grid, Vec2 lo, Vec2 hi) : grid_(grid) {
  i0_ = static_cast<std::int64_t>(std::floor(lo.x / grid.cell_size)) - 2;
  j0_ = static_cast<std::int64_t>(std::floor(lo.y / grid.cell_size)) - 2;
  ni_ = static_cast<std::int64_t>(std::floor(hi.x / grid.cell_size)) + 3 - i0_;
  nj_ = static_cast<std::int64_t>(std::floor(hi.y / grid.cell_size)) + 3 - j0_;
  points_.resize(static_cast<std::size_t>(ni_ * nj_));
  ids_.resize(points_.size());
  for (std::int64_t j = 0; j < nj_; ++j)
    for (std::int64_t i = 0; i < ni_; ++i) {
      points_[static_cast<std::size_t>(j * ni_ + i)] = feature_point(grid, i0_ + i, j0_ + j);
      ids_[static_cast<std::size_t>(j * ni_ + i)] = feature_cell_id(grid, i0_ + i, j0_ + j);
    }
}

WorleySample FeatureTable::eval(Vec2 p) const {
  auto ci = static_cast<std::int64_t>(std::floor(p.x / grid_.cell_size)) - i0_;
  auto cj = static_cast<std::int64_t>(std::floor(p.y / grid_.cell_size)) - j0_;
  if (ci < 2 || cj < 2 || ci + 2 >= ni_ || cj + 2 >= nj_) return worley_eval(grid_, p);
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = d1;
  std::size_t best = 0;
  for (std::int64_t j = cj - 2; j <= cj + 2; ++j) {
    std::size_t row = static_cast<std::size_t>(j * ni_);
    for (std::int64_t i = ci - 2; i <= ci + 2; ++i) {
      const Vec2& f = points_[row + static_cast<std::size_t>(i)];
      double dx = f.x - p.x;
      double dy = f.y - p.y;
      double d = dx * dx + dy * dy;
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = row + static_cast<std::size_t>(i);
      } else if (d < d2) {
        d2 = d;
      }
    }
  }
  return {std::sqrt(d1), std::sqrt(d2), ids_[best], points_[best]};
}

double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  return to_unit(hash_cell(seed, i, j)) * 2.0 - 1.0;
}

double octave_gain_sum(int octaves) {
  double sum = 0.0;
  double gain = 1.0;
  for (int o = 0; o < octaves; ++o) {
    sum += gain;
    gain *= 0.5;
  }
  return sum;
}

double value_noise(std::uint64_t seed, double frequency, int octaves, Vec2 p) {
  if (octaves < 1) octaves = 1;
  double sum = 0.0;
  double norm = 0.0;
  double gain = 1.0;
  double f = frequency;
  for (int o = 0; o < octaves; ++o) {
    std::uint64_t s = o == 0 ? seed : hash_combine(seed ^ kOctaveStream, static_cast<std::uint64_t>(o));
    sum += gain * single_octave(s, {p.x * f, p.y * f});
    norm += gain;
    gain *= 0.5;
    f *= 2.0;
  }
  return sum / norm;
}

Vec2 warp_displacement(const WarpField& w, Vec2 p) {
  if (w.amplitude == 0.0) return {0.0, 0.0};
  double nx = value_noise(w.seed, w.frequency, w.octaves, p);
  double ny = value_noise(w.seed ^ kWarpYStream, w.frequency, w.octaves, p);
  // Both components lie in [-1, 1]; dividing by sqrt(2) bounds the vector norm by 1.
  double scale = w.amplitude * octave_gain_sum(w.octaves) * 0.7071067811865476;
  return {nx * scale, ny * scale};
}

Vec2 warp_point(const WarpField& w, Vec2 p) {
  Vec2 d = warp_displacement(w, p);
  return {p.x + d.x, p.y + d.y};
}

}  // namespace myosynth::noise
