#include "myosynth/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "myosynth/analysis.hpp"
#include "myosynth/dataset.hpp"
#include "myosynth/degrade.hpp"
#include "myosynth/errors.hpp"
#include "myosynth/features.hpp"
#include "myosynth/imgproc.hpp"
#include "myosynth/json_util.hpp"
#include "myosynth/io.hpp"
#include "myosynth/metrics.hpp"
#include "myosynth/pipeline.hpp"

namespace myosynth::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
  std::string text = io::read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw IoError("cannot create directory: " + dir.string());
}

void require_scale(double um_per_px) {
  if (!(um_per_px > 0.0)) throw ConfigError("um-per-px", "must be > 0");
}

// 16-bit PNGs hold instance ids; 8-bit PNGs are binary masks split into
// 8-connected components.
LabelImage load_instances(const fs::path& path) {
  io::PngData d = io::read_png(path);
  if (d.channels != 1) throw IoError(path.string() + ": expected a single-channel PNG");
  LabelImage labels(d.width, d.height);
  if (d.bit_depth == 16) {
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = d.samples[i];
    return labels;
  }
  Mask m(d.width, d.height);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = d.samples[i] ? 1 : 0;
  return imgproc::connected_components(m, imgproc::Connectivity::eight).labels;
}

std::vector<double> parse_values(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(field, "bad number '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(field, "no values");
  return out;
}

dataset::PreviewAxis parse_axis(const std::string& text, const std::string& field) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(field, "expected param=v1,v2,...");
  return {text.substr(0, eq), parse_values(text.substr(eq + 1), field)};
}

struct Context {
  std::ostream& out;
  std::ostream& err;
};

// ---- generate ----
struct GenerateArgs {
  std::string config, out;
  std::size_t count = 120;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void cmd_generate(const GenerateArgs& a, Context& ctx) {
  synth::SynthConfig cfg;
  if (!a.config.empty()) cfg = synth::config_from_json(read_json_file(a.config));
  dataset::GenerateOptions opt;
  opt.count = a.count;
  opt.seed = a.seed;
  opt.jobs = a.jobs;
  auto r = dataset::generate_dataset(cfg, opt, a.out);
  ctx.out << "wrote " << r.samples.size() << " samples to " << a.out << " (" << r.total_fibers << " fibers)\n";
}

// ---- degrade ----
struct DegradeArgs {
  std::string inst, classes, out;
  synth::DegradeParams d;
};

void cmd_degrade(const DegradeArgs& a, Context& ctx) {
  LabelImage inst = io::read_labels_png(a.inst);
  synth::ClassImage cls = io::read_png_gray8(a.classes);
  ProbabilityMap prob = synth::degrade_to_probability(inst, cls, a.d);
  std::string ext = fs::path(a.out).extension().string();
  if (ext == ".png") {
    io::write_probability_png(a.out, prob);
  } else if (ext == ".tif" || ext == ".tiff") {
    io::write_probability_tiff(a.out, prob);
  } else {
    throw ConfigError("out", "must end in .png, .tif or .tiff");
  }
  ctx.out << "wrote " << a.out << "\n";
}

// ---- postprocess ----
struct PostArgs {
  std::string prob, params, regions, out;
  double um_per_px = 0.0;
  bool watershed = false;
  bool ct_shape_filtered = false;
};

void cmd_postprocess(const PostArgs& a, Context& ctx) {
  require_scale(a.um_per_px);
  pipeline::PipelineParams p;
  if (!a.params.empty()) p = pipeline::params_from_json(read_json_file(a.params));
  if (a.watershed) p.use_watershed = true;
  if (a.ct_shape_filtered) p.ct_from_shape_filtered = true;
  pipeline::RegionsFile regions;
  if (!a.regions.empty()) regions = pipeline::regions_from_json(read_json_file(a.regions));
  ProbabilityMap prob = io::read_probability(a.prob);
  auto r = pipeline::run_full(prob, p, a.um_per_px, regions.exclusions, regions.regions);
  ensure_dir(a.out);
  const fs::path out(a.out);
  io::write_mask_png(out / "postprocessed.png", r.outputs.postprocessed);
  io::write_mask_png(out / "shape_filtered.png", r.outputs.shape_filtered);
  io::write_mask_png(out / "muscle_mask.png", r.outputs.muscle_mask);
  io::write_mask_png(out / "connective_tissue.png", r.outputs.connective_tissue);
  io::write_labels_png(out / "fiber_labels.png", r.fiber_labels);
  io::write_text(out / "fibers.csv", features::fiber_csv(r.records));
  json summary = pipeline::summary_json(r, p, a.um_per_px);
  json by_region;
  for (auto region : {features::Region::whole, features::Region::soleus, features::Region::gastrocnemius}) {
    if (region != features::Region::whole && regions.regions.empty()) continue;
    auto t = pipeline::ct_region_thickness(r.outputs, regions.regions, region, a.um_per_px);
    by_region[features::to_string(region)] = t ? json(*t) : json(nullptr);
  }
  summary["ct_mean_thickness_um_by_region"] = by_region;
  write_json_file(out / "summary.json", summary);
  ctx.out << "fibers: " << summary["fiber_count"] << ", ct_fraction: " << r.outputs.ct_fraction << "\n";
}

// ---- measure ----
struct MeasureArgs {
  std::string labels, regions, out;
  double um_per_px = 0.0;
};

void cmd_measure(const MeasureArgs& a, Context& ctx) {
  require_scale(a.um_per_px);
  LabelImage labels = load_instances(a.labels);
  auto records = features::measure_objects(labels, a.um_per_px);
  if (!a.regions.empty()) {
    auto regions = pipeline::regions_from_json(read_json_file(a.regions));
    features::assign_regions(records, regions.regions);
    pipeline::SegmentationOutputs unused;
    unused.shape_filtered = imgproc::foreground(labels);
    unused.connective_tissue = Mask(labels.width(), labels.height());
    unused.muscle_mask = Mask(labels.width(), labels.height());
    unused.ct_thickness_um = DoubleImage(labels.width(), labels.height());
    pipeline::apply_exclusion_regions(unused, records, labels, regions.exclusions, a.um_per_px);
  }
  io::write_text(a.out, features::fiber_csv(records));
  ctx.out << "measured " << records.size() << " objects\n";
}

// ---- evaluate ----
struct EvaluateArgs {
  std::string gt, pred, out;
};

void cmd_evaluate(const EvaluateArgs& a, Context& ctx) {
  LabelImage gt = load_instances(a.gt);
  LabelImage pred = load_instances(a.pred);
  require_same_shape(gt, pred, "evaluate");
  auto pixel = metrics::pixel_metrics(imgproc::foreground(gt), imgproc::foreground(pred));
  auto sweep = metrics::ap_sweep(gt, pred);
  json j = metrics::metrics_json(pixel, sweep);
  if (!a.out.empty()) write_json_file(a.out, j);
  ctx.out << "mean AP " << sweep.mean_ap << " (AP@0.5 " << sweep.per_threshold.front().ap << ")\n";
}

// ---- analyze ----
struct AnalyzeArgs {
  std::string sections, refs, out;
};

void cmd_analyze(const AnalyzeArgs& a, Context& ctx) {
  const fs::path sections_path(a.sections);
  const fs::path base = sections_path.parent_path();
  json sections = read_json_file(sections_path);
  if (!sections.is_array()) throw ConfigError("sections", "expected a list");
  std::vector<analysis::ReferenceStats> refs;
  if (!a.refs.empty()) refs = analysis::refs_from_json(read_json_file(a.refs));

  std::vector<analysis::SectionStats> stats;
  std::vector<features::FiberRecord> pooled;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const std::string path = "sections[" + std::to_string(i) + "]";
    std::string id, fibers, summary;
    jsonio::ObjectReader r(sections[i], path);
    r.field("id", [&](const json& v, const std::string& k) { id = jsonio::read_string(v, k); });
    r.field("fibers", [&](const json& v, const std::string& k) { fibers = jsonio::read_string(v, k); });
    r.field("summary", [&](const json& v, const std::string& k) { summary = jsonio::read_string(v, k); });
    r.finish();
    if (id.empty()) throw ConfigError(path + ".id", "missing");
    if (fibers.empty()) throw ConfigError(path + ".fibers", "missing");
    auto records = features::parse_fiber_csv(io::read_text(base / fibers));
    json ct_by_region = json::object();
    if (!summary.empty()) {
      json s = read_json_file(base / summary);
      if (s.contains("ct_mean_thickness_um_by_region")) ct_by_region = s["ct_mean_thickness_um_by_region"];
      else if (s.contains("ct_mean_thickness_um")) ct_by_region["whole"] = s["ct_mean_thickness_um"];
    }
    bool has_regions = std::any_of(records.begin(), records.end(),
                                   [](const features::FiberRecord& f) { return f.region != features::Region::whole; });
    for (auto region : {features::Region::whole, features::Region::soleus, features::Region::gastrocnemius}) {
      if (region != features::Region::whole && !has_regions) continue;
      std::optional<double> ct;
      auto key = features::to_string(region);
      if (ct_by_region.contains(key) && ct_by_region[key].is_number()) ct = ct_by_region[key].get<double>();
      stats.push_back(analysis::section_stats(id, records, ct, region, refs.empty() ? nullptr : &refs));
    }
    for (const auto& f : records)
      if (!f.excluded) pooled.push_back(f);
  }
  ensure_dir(a.out);
  const fs::path out(a.out);
  write_json_file(out / "report.json", analysis::report_json(stats, refs));
  io::write_text(out / "scatter.csv", analysis::scatter_csv(stats));
  if (pooled.size() >= 2) io::write_text(out / "kde.csv", analysis::kde_csv(analysis::kde_diameters(pooled)));
  ctx.out << "analyzed " << sections.size() << " sections, " << pooled.size() << " fibers\n";
}

// ---- preview ----
struct PreviewArgs {
  std::string config, sweep, sweep2, out;
  std::uint64_t seed = 0;
  int tile = 256;
};

void cmd_preview(const PreviewArgs& a, Context& ctx) {
  synth::SynthConfig cfg;
  if (!a.config.empty()) cfg = synth::config_from_json(read_json_file(a.config));
  auto cols = parse_axis(a.sweep, "sweep");
  std::optional<dataset::PreviewAxis> rows;
  if (!a.sweep2.empty()) rows = parse_axis(a.sweep2, "sweep2");
  auto r = dataset::preview(cfg, a.seed, a.tile, cols, rows ? &*rows : nullptr);
  ensure_dir(a.out);
  io::write_png_rgb(fs::path(a.out) / "preview.png", r.grid);
  write_json_file(fs::path(a.out) / "preview.json", r.summary);
  ctx.out << "wrote " << r.summary["tiles"].size() << " tiles\n";
}

// ---- validate ----
struct ValidateArgs {
  std::string prob, dataset;
};

int cmd_validate(const ValidateArgs& a, Context& ctx) {
  std::vector<std::string> problems;
  if (!a.prob.empty()) {
    std::string e = io::check_probability_file(a.prob);
    if (!e.empty()) problems.push_back(e);
  }
  if (!a.dataset.empty())
    for (auto& p : dataset::check_dataset(a.dataset)) problems.push_back(p);
  for (const auto& p : problems) ctx.err << "invalid: " << p << "\n";
  if (problems.empty()) ctx.out << "ok\n";
  return problems.empty() ? kOk : kRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"Synthetic muscle histology generator and fiber morphometry pipeline", "myosynth"};
  app.set_version_flag("--version", dataset::version_string());
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Render a synthetic dataset");
  gen->add_option("--config", ga.config, "JSON sampling configuration");
  gen->add_option("--count", ga.count, "Number of images")->capture_default_str();
  gen->add_option("--seed", ga.seed, "Master seed")->capture_default_str();
  gen->add_option("--out", ga.out, "Output directory")->required();
  gen->add_option("--jobs", ga.jobs, "Worker threads")->capture_default_str();

  DegradeArgs da;
  auto* deg = app.add_subcommand("degrade", "Turn ground truth into a probability map");
  deg->add_option("--inst", da.inst, "Instance PNG (16-bit)")->required();
  deg->add_option("--class", da.classes, "Class PNG (8-bit)")->required();
  deg->add_option("--out", da.out, "Output .png (16-bit) or .tif (float)")->required();
  deg->add_option("--blur", da.d.blur_sigma, "Gaussian sigma in px")->capture_default_str();
  deg->add_option("--noise", da.d.noise_amplitude, "Noise amplitude")->capture_default_str();
  deg->add_option("--noise-frequency", da.d.noise_frequency, "Noise frequency in 1/px")->capture_default_str();
  deg->add_option("--drop", da.d.drop_prob, "Per-instance drop probability")->capture_default_str();
  deg->add_option("--seed", da.d.seed, "Seed")->capture_default_str();

  PostArgs pa;
  auto* post = app.add_subcommand("postprocess", "Run the segmentation post-processing pipeline");
  post->add_option("--prob", pa.prob, "Probability map (.png 16-bit or .tif float)")->required();
  post->add_option("--um-per-px", pa.um_per_px, "Pixel size in um")->required();
  post->add_option("--params", pa.params, "JSON pipeline parameters");
  post->add_option("--regions", pa.regions, "JSON exclusion and anatomical regions");
  post->add_flag("--watershed", pa.watershed, "Split touching fibers");
  post->add_flag("--ct-shape-filtered", pa.ct_shape_filtered, "Measure CT against shape-filtered fibers");
  post->add_option("--out", pa.out, "Output directory")->required();

  MeasureArgs ma;
  auto* meas = app.add_subcommand("measure", "Per-object morphometry to CSV");
  meas->add_option("--labels", ma.labels, "Label PNG (16-bit ids) or mask PNG (8-bit)")->required();
  meas->add_option("--um-per-px", ma.um_per_px, "Pixel size in um")->required();
  meas->add_option("--regions", ma.regions, "JSON exclusion and anatomical regions");
  meas->add_option("--out", ma.out, "Output CSV")->required();

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "Pixel and instance metrics");
  eval->add_option("--gt", ea.gt, "Ground-truth labels or mask PNG")->required();
  eval->add_option("--pred", ea.pred, "Predicted labels or mask PNG")->required();
  eval->add_option("--out", ea.out, "Output metrics.json");

  AnalyzeArgs aa;
  auto* ana = app.add_subcommand("analyze", "Section statistics, abnormality counts and KDE export");
  ana->add_option("--sections", aa.sections, "JSON list of {id, fibers, summary}")->required();
  ana->add_option("--refs", aa.refs, "JSON reference statistics");
  ana->add_option("--out", aa.out, "Output directory")->required();

  PreviewArgs va;
  auto* prev = app.add_subcommand("preview", "Parameter sweep contact sheet");
  prev->add_option("--config", va.config, "JSON sampling configuration");
  prev->add_option("--seed", va.seed, "Seed")->capture_default_str();
  prev->add_option("--sweep", va.sweep, "param=v1,v2,... along columns")->required();
  prev->add_option("--sweep2", va.sweep2, "param=v1,v2,... along rows");
  prev->add_option("--tile", va.tile, "Tile size in px")->capture_default_str();
  prev->add_option("--out", va.out, "Output directory")->required();

  ValidateArgs xa;
  auto* val = app.add_subcommand("validate", "Check probability files or dataset directories");
  auto* vp = val->add_option("--prob", xa.prob, "Probability map to check");
  auto* vd = val->add_option("--dataset", xa.dataset, "Dataset directory to check");
  (void)vp;
  (void)vd;

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) cmd_generate(ga, ctx);
    else if (*deg) cmd_degrade(da, ctx);
    else if (*post) cmd_postprocess(pa, ctx);
    else if (*meas) cmd_measure(ma, ctx);
    else if (*eval) cmd_evaluate(ea, ctx);
    else if (*ana) cmd_analyze(aa, ctx);
    else if (*prev) cmd_preview(va, ctx);
    else if (*val) {
      if (xa.prob.empty() && xa.dataset.empty()) {
        err << "validate: give --prob and/or --dataset\n";
        return kUsage;
      }
      return cmd_validate(xa, ctx);
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace myosynth::cli
