// palmroi: batch driver for palm ROI extraction.
//
//   palmroi extract     [options] <image|dir>...
//   palmroi consistency [options] --group-by REGEX <image|dir>...
//   palmroi debug       [options] <image|dir>...
//   palmroi synth       --out DIR [--seed N] [--count N]

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "palmroi/export.hpp"
#include "palmroi/io.hpp"
#include "palmroi/pipeline.hpp"
#include "palmroi/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace palmroi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSomeFailed = 2;
constexpr int kExitBadConfig = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<int> roi_size;
  unsigned workers = 1;
  bool debug = false;
  bool timings = false;
  std::vector<std::string> inputs;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON config file (falls back to $PALMROI_CONFIG)");
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--beta", o.beta, "ROI side as a multiple of |K1K3|");
  cmd->add_option("--delta", o.delta, "ROI centre offset into the palm, multiple of |K1K3|");
  cmd->add_option("--roi-size", o.roi_size, "ROI output side in pixels");
  cmd->add_option("--workers", o.workers, "Images processed in parallel (0 = all cores)")
      ->capture_default_str();
  cmd->add_option("inputs", o.inputs, "Image files (PNG, PGM) or directories")->required();
}

PipelineConfig load_config(const CommonOptions& o) {
  std::string path = o.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("PALMROI_CONFIG")) path = env;
  }
  PipelineConfig cfg;
  if (!path.empty()) {
    json j;
    try {
      j = json::parse(io::read_text(path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidConfig, e.what());
    }
    cfg = config_from_json(j);
  }
  if (o.beta) cfg.roi.beta = *o.beta;
  if (o.delta) cfg.roi.delta = *o.delta;
  if (o.roi_size) cfg.roi.out_side = *o.roi_size;
  validate(cfg);
  return cfg;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".pgm";
}

std::vector<fs::path> collect_inputs(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    const fs::path p(a);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
      }
    } else {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Output stems, disambiguated when two inputs share a file name.
std::vector<std::string> output_stems(const std::vector<fs::path>& inputs) {
  std::map<std::string, int> seen;
  for (const auto& p : inputs) ++seen[p.stem().string()];
  std::vector<std::string> stems;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::string s = inputs[i].stem().string();
    if (seen[s] > 1) s += "_" + std::to_string(i);
    stems.push_back(s);
  }
  return stems;
}

struct Outcome {
  std::optional<GrayImage> image;
  PipelineResult result;
  PipelineTrace trace;
  std::string read_error;

  bool ok() const { return read_error.empty() && result.report.ok; }
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

Outcome process(const fs::path& input, const PipelineConfig& cfg, bool keep_trace) {
  Outcome out;
  try {
    out.image = io::read_image(input);
  } catch (const Error& e) {
    out.read_error = e.what();
    return out;
  }
  out.result = run_pipeline(*out.image, cfg, keep_trace ? &out.trace : nullptr);
  return out;
}

json outcome_json(const fs::path& input, const Outcome& o, const PipelineConfig& cfg,
                  bool timings) {
  json j;
  if (!o.read_error.empty()) {
    j["status"] = "error";
    j["error"] = {{"code", "Io"}, {"stage", "read"}, {"message", o.read_error}};
    j["config"] = to_json(cfg);
  } else {
    j = report_to_json(o.result.report, cfg, timings);
  }
  j["input"] = input.generic_string();
  return j;
}

GrayImage response_image(const LineResponse& r) {
  GrayImage img(r.width, r.height, 0);
  int peak = 1;
  for (const int v : r.response) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = static_cast<std::uint8_t>(std::max(0, r.response[i]) * 255 / peak);
  }
  return img;
}

void write_canvas(const fs::path& path, const Canvas& c) {
  io::write_rgb_png(path, c.width(), c.height(), c.rgb());
}

void write_debug(const fs::path& dir, const Outcome& o, const PipelineConfig& cfg) {
  fs::create_directories(dir);
  const GrayImage& img = *o.image;
  const PipelineTrace& t = o.trace;
  const PipelineReport& r = o.result.report;
  if (t.mask.empty()) return;
  io::write_binary_png(dir / "binarize.png", t.mask);
  if (t.chain.size() == 0) return;
  write_canvas(dir / "trace_boundary.png", overlay_contour(img, t.mask, t.chain));
  io::write_text(dir / "contour.json", to_json(t.chain).dump() + "\n");
  write_canvas(dir / "fit_polyline.png", overlay_segments(img, t.raw_segments));
  write_canvas(dir / "connect_broken.png", overlay_segments(img, t.connected));
  write_canvas(dir / "filter_short.png", overlay_segments(img, t.long_segments));
  io::write_text(dir / "segments.json",
                 json{{"fitted", to_json(t.raw_segments)},
                      {"connected", to_json(t.connected)},
                      {"long", to_json(t.long_segments)}}
                         .dump(1) +
                     "\n");
  write_canvas(dir / "pair_parallel.png", overlay_pairs(img, t.pairs));
  write_canvas(dir / "form_vshapes.png",
               overlay_vshapes(img, t.vshapes, t.center_lines, r.key_points));
  io::write_text(dir / "grouping.json",
                 grouping_json(t.pairs, t.vshapes, t.center_lines, r.key_points).dump(1) + "\n");
  if (r.main_points && r.frame) {
    write_canvas(dir / "build_frame.png", overlay_roi(img, *r.main_points, *r.frame, cfg.roi));
  }
  if (o.result.roi) io::write_png(dir / "extract_roi.png", o.result.roi->as_image());
  if (!t.response.response.empty()) {
    io::write_png(dir / "line_response.png", response_image(t.response));
  }
  if (!t.thresholded.empty()) io::write_binary_png(dir / "threshold_map.png", t.thresholded);
  if (o.result.lines) io::write_binary_png(dir / "thin.png", o.result.lines->data);
}

int run_extract(const CommonOptions& o, bool force_debug) {
  PipelineConfig cfg;
  try {
    cfg = load_config(o);
  } catch (const Error& e) {
    std::cerr << "palmroi: invalid config: " << e.what() << "\n";
    return kExitBadConfig;
  }
  const auto inputs = collect_inputs(o.inputs);
  const auto stems = output_stems(inputs);
  const fs::path out_dir(o.out_dir);
  fs::create_directories(out_dir);
  const bool debug = force_debug || o.debug;

  std::vector<json> reports(inputs.size());
  std::vector<char> ok(inputs.size(), 0);
  parallel_for(inputs.size(), o.workers, [&](std::size_t i) {
    const Outcome out = process(inputs[i], cfg, debug);
    ok[i] = out.ok() ? 1 : 0;
    reports[i] = outcome_json(inputs[i], out, cfg, false);
    const fs::path base = out_dir / stems[i];
    try {
      if (out.result.roi) io::write_png(base.string() + ".roi.png", out.result.roi->as_image());
      if (out.result.lines) io::write_binary_png(base.string() + ".lines.png", out.result.lines->data);
      io::write_text(base.string() + ".report.json", reports[i].dump(1) + "\n");
      if (o.timings && out.read_error.empty()) {
        json tm = json::object();
        for (const auto& s : out.result.report.timings) tm[std::string(to_string(s.stage))] = s.ms;
        io::write_text(base.string() + ".timings.json", tm.dump(1) + "\n");
      }
      if (debug && out.image) write_debug(base.string() + ".debug", out, cfg);
    } catch (const Error& e) {
      ok[i] = 0;
      std::cerr << "palmroi: " << e.what() << "\n";
    }
  });

  std::size_t failed = 0;
  json summary = json::array();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    json entry = {{"input", inputs[i].generic_string()},
                  {"output_stem", stems[i]},
                  {"status", reports[i]["status"]}};
    if (reports[i].contains("error")) entry["error"] = reports[i]["error"];
    summary.push_back(std::move(entry));
    if (!ok[i]) {
      ++failed;
      const json& err = reports[i]["error"];
      std::cerr << inputs[i].generic_string() << ": " << err.value("code", "") << " at "
                << err.value("stage", "") << "\n";
    }
  }
  io::write_text(out_dir / "summary.json",
                 json{{"images", std::move(summary)}, {"config", to_json(cfg)}}.dump(1) + "\n");
  std::cerr << inputs.size() - failed << "/" << inputs.size() << " images ok\n";
  return failed == 0 ? kExitOk : kExitSomeFailed;
}

int run_consistency(const CommonOptions& o, const std::string& group_by) {
  PipelineConfig cfg;
  std::regex pattern;
  try {
    cfg = load_config(o);
    pattern = std::regex(group_by);
  } catch (const Error& e) {
    std::cerr << "palmroi: invalid config: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::regex_error& e) {
    std::cerr << "palmroi: invalid --group-by pattern: " << e.what() << "\n";
    return kExitBadConfig;
  }
  const auto inputs = collect_inputs(o.inputs);
  std::vector<Outcome> outcomes(inputs.size());
  parallel_for(inputs.size(), o.workers,
               [&](std::size_t i) { outcomes[i] = process(inputs[i], cfg, false); });

  std::map<std::string, std::vector<std::size_t>> groups;
  json failures = json::array();
  json ungrouped = json::array();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!outcomes[i].ok()) {
      failures.push_back(outcome_json(inputs[i], outcomes[i], cfg, false));
      continue;
    }
    std::smatch m;
    const std::string stem = inputs[i].stem().string();
    if (!std::regex_search(stem, m, pattern)) {
      ungrouped.push_back(inputs[i].generic_string());
      continue;
    }
    groups[m.size() > 1 ? m[1].str() : m[0].str()].push_back(i);
  }

  json jgroups = json::array();
  for (const auto& [label, members] : groups) {
    json pairs = json::array();
    json names = json::array();
    double sum = 0.0;
    double lo = 1.0;
    std::size_t count = 0;
    for (const auto i : members) names.push_back(inputs[i].generic_string());
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double s = roi_similarity(*outcomes[members[a]].result.roi,
                                        *outcomes[members[b]].result.roi);
        pairs.push_back({{"a", inputs[members[a]].generic_string()},
                         {"b", inputs[members[b]].generic_string()},
                         {"roi_similarity", s}});
        sum += s;
        lo = std::min(lo, s);
        ++count;
      }
    }
    json g = {{"label", label}, {"members", std::move(names)}, {"pairs", std::move(pairs)}};
    if (count > 0) {
      g["mean"] = sum / static_cast<double>(count);
      g["min"] = lo;
    }
    std::cerr << "group " << label << ": " << members.size() << " images, " << count
              << " pairs" << (count ? ", mean " + std::to_string(sum / count) : "") << "\n";
    jgroups.push_back(std::move(g));
  }
  const fs::path out_dir(o.out_dir);
  fs::create_directories(out_dir);
  io::write_text(out_dir / "consistency.json", json{{"groups", std::move(jgroups)},
                                                    {"failures", failures},
                                                    {"ungrouped", std::move(ungrouped)},
                                                    {"config", to_json(cfg)}}
                                                   .dump(1) +
                                                   "\n");
  return failures.empty() ? kExitOk : kExitSomeFailed;
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json hand_params_json(const synth::HandParams& p) {
  json fingers = json::array();
  for (const auto& f : p.fingers) {
    fingers.push_back({{"length", f.length}, {"width", f.width}, {"angle_deg", f.angle_deg}});
  }
  return {{"finger_count", p.finger_count},
          {"fingers", std::move(fingers)},
          {"base_gap", p.base_gap},
          {"palm_axes", vec_json(p.palm_axes)},
          {"rotation_deg", p.rotation_deg},
          {"scale", p.scale},
          {"translation", vec_json(p.translation)},
          {"noise_sigma", p.noise_sigma},
          {"texture_seed", p.texture_seed}};
}

json truth_json(const synth::GroundTruth& t) {
  json valleys = json::array();
  for (std::size_t i = 0; i < t.valley_points.size(); ++i) {
    valleys.push_back({{"point", vec_json(t.valley_points[i])},
                       {"fillet_radius", t.valley_radii[i]},
                       {"edge_angle_deg", t.valley_angles_deg[i]}});
  }
  json fingers = json::array();
  for (std::size_t i = 0; i < t.finger_edges.size(); ++i) {
    const auto& e = t.finger_edges[i];
    fingers.push_back({{"left_edge", {vec_json(e.left.start), vec_json(e.left.end)}},
                       {"right_edge", {vec_json(e.right.start), vec_json(e.right.end)}},
                       {"axis", vec_json(t.finger_axes[i])}});
  }
  return {{"valleys", std::move(valleys)},
          {"fingers", std::move(fingers)},
          {"hand_scale", t.hand_scale}};
}

struct SynthOptions {
  std::string out_dir;
  std::uint64_t seed = 1;
  int count = 30;
  int width = 640;
  int height = 480;
  double noise = 0.0;
  bool failures = false;
};

int run_synth(const SynthOptions& o) {
  if (o.count < 0 || o.width < 64 || o.height < 64 || o.noise < 0.0) {
    std::cerr << "palmroi: synth needs count >= 0, a frame of at least 64x64 and noise >= 0\n";
    return kExitBadConfig;
  }
  const fs::path out(o.out_dir);
  fs::create_directories(out);
  std::mt19937_64 rng(o.seed);
  constexpr std::array<const char*, 3> kGestureNames{"open", "closed", "thumb"};
  json cases = json::array();
  for (int i = 0; i < o.count; ++i) {
    const auto gesture = static_cast<synth::Gesture>(i % 3);
    synth::HandParams p = synth::random_gesture(gesture, rng);
    p.noise_sigma = o.noise;
    synth::randomize_pose(p, rng, o.width, o.height);
    const auto hand = synth::generate_hand(p, o.width, o.height);
    char name[32];
    std::snprintf(name, sizeof name, "hand_%04d", i);
    io::write_png(out / (std::string(name) + ".png"), hand.image);
    json truth = truth_json(hand.truth);
    truth["params"] = hand_params_json(p);
    io::write_text(out / (std::string(name) + ".truth.json"), truth.dump(1) + "\n");
    cases.push_back({{"name", name},
                     {"gesture", kGestureNames[static_cast<std::size_t>(gesture)]},
                     {"image", std::string(name) + ".png"},
                     {"truth", std::string(name) + ".truth.json"}});
  }
  json failures = json::array();
  if (o.failures) {
    for (const auto& c : synth::failure_corpus(o.width, o.height)) {
      const std::string file = "fail_" + c.name + ".png";
      io::write_png(out / file, c.image);
      failures.push_back({{"name", c.name},
                          {"image", file},
                          {"expected_stage", c.stage},
                          {"expected_error", c.error}});
    }
  }
  io::write_text(out / "manifest.json", json{{"seed", o.seed},
                                             {"width", o.width},
                                             {"height", o.height},
                                             {"noise_sigma", o.noise},
                                             {"cases", std::move(cases)},
                                             {"failures", std::move(failures)}}
                                                .dump(1) +
                                            "\n");
  std::cerr << "wrote " << o.count << " hands to " << out.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Palm ROI extraction from hand images"};
  app.require_subcommand(1);

  CommonOptions extract_opts;
  auto* extract = app.add_subcommand("extract", "Extract ROI and line map from images");
  add_common(extract, extract_opts);
  extract->add_flag("--debug", extract_opts.debug, "Write per-stage overlays");
  extract->add_flag("--timings", extract_opts.timings, "Write per-stage timings");

  CommonOptions debug_opts;
  auto* debug = app.add_subcommand("debug", "Extract and write per-stage overlays");
  add_common(debug, debug_opts);
  debug->add_flag("--timings", debug_opts.timings, "Write per-stage timings");

  CommonOptions cons_opts;
  std::string group_by;
  auto* cons = app.add_subcommand("consistency", "All-pairs ROI similarity within groups");
  add_common(cons, cons_opts);
  cons->add_option("--group-by", group_by,
                   "Regex on the file stem; capture group 1 (or the match) is the label")
      ->required();

  SynthOptions synth_opts;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic hand corpus");
  syn->add_option("--out", synth_opts.out_dir, "Output directory")->required();
  syn->add_option("--seed", synth_opts.seed, "Random seed")->capture_default_str();
  syn->add_option("--count", synth_opts.count, "Number of hands")->capture_default_str();
  syn->add_option("--width", synth_opts.width, "Frame width")->capture_default_str();
  syn->add_option("--height", synth_opts.height, "Frame height")->capture_default_str();
  syn->add_option("--noise", synth_opts.noise, "Intensity noise sigma")->capture_default_str();
  syn->add_flag("--failures", synth_opts.failures, "Also write the failure corpus");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) return run_extract(extract_opts, false);
    if (*debug) return run_extract(debug_opts, true);
    if (*cons) return run_consistency(cons_opts, group_by);
    if (*syn) return run_synth(synth_opts);
  } catch (const std::exception& e) {
    std::cerr << "palmroi: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
