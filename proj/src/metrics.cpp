#include "myosynth/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace myosynth::metrics {

using nlohmann::json;

namespace {

double ratio(double a, double b) { return b > 0 ? a / b : 0.0; }

// Maximum-weight assignment on a dense rows x cols matrix (rows <= cols).
// Returns the column assigned to each row.
std::vector<int> hungarian_max(const std::vector<std::vector<double>>& weight) {
  const int n = static_cast<int>(weight.size());
  const int m = n ? static_cast<int>(weight[0].size()) : 0;
  double top = 0.0;
  for (const auto& row : weight)
    for (double v : row) top = std::max(top, v);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = (top - weight[i0 - 1][j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assign(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j]) assign[p[j] - 1] = j - 1;
  return assign;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

PixelMetrics pixel_metrics(const Mask& gt, const Mask& pred) {
  require_same_shape(gt, pred, "pixel_metrics");
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    bool g = gt[i] != 0, p = pred[i] != 0;
    if (g && p) {
      ++tp;
    } else if (p) {
      ++fp;
    } else if (g) {
      ++fn;
    } else {
      ++tn;
    }
  }
  PixelMetrics m;
  m.accuracy = ratio(double(tp + tn), double(gt.size()));
  m.precision = ratio(double(tp), double(tp + fp));
  m.recall = ratio(double(tp), double(tp + fn));
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

OverlapTable overlaps(const LabelImage& gt, const LabelImage& pred) {
  require_same_shape(gt, pred, "match_instances");
  std::unordered_map<std::uint32_t, std::int64_t> gt_area, pred_area;
  std::unordered_map<std::uint64_t, std::int64_t> joint;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    std::uint32_t g = gt[i], p = pred[i];
    if (g) ++gt_area[g];
    if (p) ++pred_area[p];
    if (g && p) ++joint[(std::uint64_t(g) << 32) | p];
  }
  OverlapTable t;
  for (auto& [id, a] : gt_area) t.gt_ids.push_back(id);
  for (auto& [id, a] : pred_area) t.pred_ids.push_back(id);
  std::sort(t.gt_ids.begin(), t.gt_ids.end());
  std::sort(t.pred_ids.begin(), t.pred_ids.end());
  for (auto& [key, inter] : joint) {
    auto g = static_cast<std::uint32_t>(key >> 32), p = static_cast<std::uint32_t>(key & 0xffffffffULL);
    double uni = double(gt_area[g] + pred_area[p] - inter);
    t.pairs.push_back({g, p, double(inter) / uni});
  }
  std::sort(t.pairs.begin(), t.pairs.end(),
            [](const Match& a, const Match& b) { return a.gt_id != b.gt_id ? a.gt_id < b.gt_id : a.pred_id < b.pred_id; });
  return t;
}

InstanceMatchResult match_from_table(const OverlapTable& t, double iou_threshold) {
  InstanceMatchResult r;
  r.iou_threshold = iou_threshold;
  std::vector<Match> edges;
  for (const auto& m : t.pairs)
    if (m.iou >= iou_threshold) edges.push_back(m);

  // Solve each connected component of the candidate graph separately.
  std::map<std::uint32_t, int> gnode, pnode;
  for (const auto& e : edges) {
    gnode.emplace(e.gt_id, 0);
    pnode.emplace(e.pred_id, 0);
  }
  int k = 0;
  for (auto& [id, idx] : gnode) idx = k++;
  for (auto& [id, idx] : pnode) idx = k++;
  UnionFind uf(k);
  for (const auto& e : edges) uf.unite(gnode[e.gt_id], pnode[e.pred_id]);
  std::map<int, std::vector<Match>> components;
  for (const auto& e : edges) components[uf.find(gnode[e.gt_id])].push_back(e);

  for (auto& [root, comp] : components) {
    std::vector<std::uint32_t> gs, ps;
    for (const auto& e : comp) {
      gs.push_back(e.gt_id);
      ps.push_back(e.pred_id);
    }
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    if (comp.size() == 1) {
      r.matches.push_back(comp[0]);
      continue;
    }
    const bool transpose = gs.size() > ps.size();
    const auto& rows = transpose ? ps : gs;
    const auto& cols = transpose ? gs : ps;
    // Count dominates: one extra match outweighs any IoU total.
    const double big = double(rows.size()) + 1.0;
    std::vector<std::vector<double>> w(rows.size(), std::vector<double>(cols.size(), 0.0));
    std::vector<std::vector<double>> iou(rows.size(), std::vector<double>(cols.size(), -1.0));
    for (const auto& e : comp) {
      auto gi = std::lower_bound(gs.begin(), gs.end(), e.gt_id) - gs.begin();
      auto pi = std::lower_bound(ps.begin(), ps.end(), e.pred_id) - ps.begin();
      auto ri = transpose ? pi : gi, ci = transpose ? gi : pi;
      w[ri][ci] = big + e.iou;
      iou[ri][ci] = e.iou;
    }
    auto assign = hungarian_max(w);
    for (std::size_t i = 0; i < assign.size(); ++i) {
      int j = assign[i];
      if (j < 0 || iou[i][j] < 0) continue;
      std::uint32_t g = transpose ? cols[j] : rows[i];
      std::uint32_t p = transpose ? rows[i] : cols[j];
      r.matches.push_back({g, p, iou[i][j]});
    }
  }
  std::sort(r.matches.begin(), r.matches.end(), [](const Match& a, const Match& b) { return a.gt_id < b.gt_id; });
  r.tp = static_cast<std::int64_t>(r.matches.size());
  r.fp = static_cast<std::int64_t>(t.pred_ids.size()) - r.tp;
  r.fn = static_cast<std::int64_t>(t.gt_ids.size()) - r.tp;
  const std::int64_t denom = r.tp + r.fp + r.fn;
  r.ap = denom == 0 ? 1.0 : double(r.tp) / double(denom);
  return r;
}

InstanceMatchResult match_instances(const LabelImage& gt, const LabelImage& pred, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw std::invalid_argument("match_instances: threshold must be in (0, 1]");
  return match_from_table(overlaps(gt, pred), iou_threshold);
}

std::vector<double> iou_thresholds() {
  std::vector<double> t;
  for (int k = 10; k <= 20; ++k) t.push_back(k / 20.0);
  return t;
}

ApSweep ap_sweep(const LabelImage& gt, const LabelImage& pred) {
  OverlapTable table = overlaps(gt, pred);
  ApSweep s;
  double sum = 0.0;
  for (double t : iou_thresholds()) {
    s.per_threshold.push_back(match_from_table(table, t));
    sum += s.per_threshold.back().ap;
  }
  s.mean_ap = sum / double(s.per_threshold.size());
  return s;
}

json metrics_json(const PixelMetrics& pixel, const ApSweep& sweep) {
  json per = json::array();
  for (const auto& r : sweep.per_threshold)
    per.push_back({{"iou", r.iou_threshold}, {"ap", r.ap}, {"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}});
  return {{"pixel",
           {{"accuracy", pixel.accuracy}, {"precision", pixel.precision}, {"recall", pixel.recall}, {"f1", pixel.f1}}},
          {"instance", {{"per_threshold", per}, {"mean_ap", sweep.mean_ap}}}};
}

}  // namespace myosynth::metrics
