// Command-line front end: simulate -> transform -> detect / constancy /
// render, with file-based stage boundaries so each stage can be run and
// tested in isolation. Exit codes: 0 ok, 1 validation error, 2 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "flowinv/constancy.hpp"
#include "flowinv/csv.hpp"
#include "flowinv/pipeline.hpp"
#include "flowinv/raster.hpp"
#include "flowinv/scene_parser.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  out << data;
  if (!out) throw IoFailure("write failed: " + path);
}

flowinv::Scene load_scene(const std::string& path) {
  return flowinv::parse_scene(slurp(path));
}

struct SimulateArgs {
  std::string scene_path;
  int frames = 4;
  double dt = 1.0;
  std::string flow = "analytic";
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out = "tracks.csv";
};

void run_simulate(const SimulateArgs& a) {
  const flowinv::Scene scene = load_scene(a.scene_path);
  flowinv::SimulateOptions opt;
  opt.frames = a.frames;
  opt.dt = a.dt;
  if (a.flow == "analytic") opt.mode = flowinv::FlowMode::analytic;
  else if (a.flow == "finite-diff") opt.mode = flowinv::FlowMode::finite_diff;
  else throw flowinv::BadRange("--flow must be analytic or finite-diff");
  opt.noise_sigma = a.noise;
  opt.seed = a.seed;

  const auto rows = flowinv::simulate_tracks(scene, opt);
  if (rows.empty()) std::cerr << "warning: no visible points\n";

  std::ostringstream csv;
  flowinv::write_tracks(csv, rows, scene.rig.focal);
  spit(a.out, csv.str());

  json manifest{{"scene", a.scene_path}, {"frames", a.frames},  {"dt", a.dt},
                {"flow", a.flow},        {"noise", a.noise},    {"seed", a.seed},
                {"out", a.out},          {"rows", rows.size()}};
  spit(a.out + ".manifest.json", manifest.dump(2) + "\n");
}

void run_transform(const std::string& in_path, const std::string& out_path,
                   double focal_override) {
  std::istringstream in(slurp(in_path));
  const flowinv::TracksFile tracks = flowinv::read_tracks(in);
  double focal = focal_override;
  if (focal <= 0.0) {
    if (!tracks.focal) throw flowinv::BadRange("tracks file has no focal; pass --focal");
    focal = *tracks.focal;
  }
  const auto invariants = flowinv::transform_tracks(tracks.rows, focal);
  std::ostringstream csv;
  flowinv::write_invariants(csv, invariants);
  spit(out_path, csv.str());
}

void run_detect(const std::string& in_path, const std::string& out_path, double eps_abs,
                double eps_rel) {
  std::istringstream in(slurp(in_path));
  const auto rows = flowinv::read_invariants(in);
  const auto tracks = flowinv::build_tracks(rows);

  std::vector<flowinv::DetectionLabel> labels;
  int moving = 0, stationary = 0, too_short = 0;
  for (const auto& ts : tracks) {
    if (ts.samples.size() < 2) {
      ++too_short;
      continue;
    }
    labels.push_back(flowinv::classify(ts, eps_abs, eps_rel));
    (labels.back().moving ? moving : stationary)++;
  }
  std::ostringstream csv;
  flowinv::write_labels(csv, labels);
  spit(out_path, csv.str());
  std::cout << "tracks=" << tracks.size() << " moving=" << moving
            << " stationary=" << stationary << " too_short=" << too_short << "\n";
}

std::vector<flowinv::InvariantPoint> frame_at(const std::vector<flowinv::InvariantPoint>& rows,
                                              double t) {
  std::vector<flowinv::InvariantPoint> frame;
  for (const auto& ip : rows)
    if (ip.status == flowinv::InvariantStatus::ok && std::abs(ip.t - t) <= 1e-9)
      frame.push_back(ip);
  return frame;
}

void run_constancy(const std::string& in_path, double t1, double t2,
                   const std::string& out_path) {
  std::istringstream in(slurp(in_path));
  const auto rows = flowinv::read_invariants(in);
  const auto frame_a = frame_at(rows, t1);
  const auto frame_b = frame_at(rows, t2);
  if (frame_a.empty() || frame_b.empty())
    throw flowinv::BadRange("no samples at the requested frame times");

  const double metric = flowinv::shape_constancy(frame_a, frame_b);

  // per-point displacement, worst first
  std::unordered_map<std::int64_t, flowinv::EmbeddedPoint> a_by_id;
  for (const auto& ip : frame_a) a_by_id.emplace(ip.point_id, flowinv::embed(ip));
  std::vector<std::pair<double, std::int64_t>> offenders;
  for (const auto& ip : frame_b) {
    auto shifted = ip;
    shifted.ttc += t2 - t1;
    const auto eb = flowinv::embed(shifted);
    const auto& ea = a_by_id.at(ip.point_id);
    const double dist = std::sqrt((eb.ex - ea.ex) * (eb.ex - ea.ex) +
                                  (eb.ey - ea.ey) * (eb.ey - ea.ey) +
                                  (eb.ez - ea.ez) * (eb.ez - ea.ez));
    offenders.emplace_back(dist, ip.point_id);
  }
  std::sort(offenders.rbegin(), offenders.rend());

  std::ostringstream report;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", metric);
  report << "shape_constancy t1=" << t1 << " t2=" << t2 << " metric=" << buf << " s\n";
  report << "worst offenders:\n";
  for (std::size_t i = 0; i < offenders.size() && i < 5; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", offenders[i].first);
    report << "  point " << offenders[i].second << " displacement " << buf << " s\n";
  }
  std::cout << report.str();
  if (!out_path.empty()) spit(out_path, report.str());
}

struct RenderArgs {
  std::string scene_path;
  double t = 0.0;
  std::string map = "ttc_inv";
  double vmin = 0.0;
  double vmax = -1.0;  // <= vmin means auto (99th percentile)
  std::string out = "map.ppm";
};

void run_render(const RenderArgs& a) {
  const flowinv::Scene scene = load_scene(a.scene_path);
  auto auto_max = [&](const flowinv::ScalarGrid& g) {
    double hi = flowinv::valid_percentile(g, 99.0);
    return hi > a.vmin ? hi : a.vmin + 1.0;
  };

  flowinv::RgbImage img(scene.rig.width, scene.rig.height);
  if (a.map == "combined") {
    const auto ttc = flowinv::splat_map(scene, scene.rig, a.t, flowinv::MapKind::ttc_inv);
    const auto tc = flowinv::splat_map(scene, scene.rig, a.t, flowinv::MapKind::tc_inv);
    flowinv::CombineRanges ranges;
    ranges.ttc_vmin = ranges.tc_vmin = a.vmin;
    ranges.ttc_vmax = a.vmax > a.vmin ? a.vmax : auto_max(ttc);
    ranges.tc_vmax = a.vmax > a.vmin ? a.vmax : auto_max(tc);
    img = flowinv::combine(ttc, tc, ranges);
  } else {
    flowinv::MapKind kind;
    if (a.map == "ttc_inv") kind = flowinv::MapKind::ttc_inv;
    else if (a.map == "tc_inv") kind = flowinv::MapKind::tc_inv;
    else throw flowinv::BadRange("--map must be ttc_inv, tc_inv, or combined");
    const auto grid = flowinv::splat_map(scene, scene.rig, a.t, kind);
    img = flowinv::colorize(grid, a.vmin, a.vmax > a.vmin ? a.vmax : auto_max(grid));
  }
  flowinv::write_ppm(img, a.out);
}

std::string pyramid_scene_text() {
  std::ostringstream out;
  out << "# square-based pyramid ahead of the camera\n";
  out << "camera speed=1 focal=64 width=128 height=128\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& p : flowinv::pyramid_cloud({0.0, -1.0, 12.0}, 2.0, 3.0, 20))
    out << "point " << num(p.position0.x) << ' ' << num(p.position0.y) << ' '
        << num(p.position0.z) << "\n";
  return out.str();
}

std::string map_scene_text() {
  std::ostringstream out;
  out << "# wall + pole + one moving box\n";
  out << "camera speed=2 focal=128 width=256 height=256\n";
  out << "box 0 0 20 24 24 0.02 samples=48\n";          // fronto-parallel wall
  out << "box 4 0 10 0.02 0.02 8 samples=24\n";          // pole at d = 4
  out << "box -3 1 9 1 1 1 samples=6 0.8 0 0\n";         // moving box
  return out.str();
}

void run_demo(const std::string& out_dir, std::uint64_t seed) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  // pyramid sequence: tracks -> invariants -> constancy + detect
  spit((dir / "pyramid.scene").string(), pyramid_scene_text());
  SimulateArgs sim;
  sim.scene_path = (dir / "pyramid.scene").string();
  sim.frames = 4;
  sim.dt = 1.0;
  sim.seed = seed;
  sim.out = (dir / "pyramid_tracks.csv").string();
  run_simulate(sim);
  run_transform(sim.out, (dir / "pyramid_invariants.csv").string(), 0.0);
  run_constancy((dir / "pyramid_invariants.csv").string(), 0.0, 3.0,
                (dir / "pyramid_constancy.txt").string());

  // map sequence: invariant maps at three time instants
  spit((dir / "map.scene").string(), map_scene_text());
  for (int k = 0; k < 3; ++k) {
    for (const std::string map : {"ttc_inv", "tc_inv", "combined"}) {
      RenderArgs r;
      r.scene_path = (dir / "map.scene").string();
      r.t = k * 1.0;
      r.map = map;
      r.out = (dir / (map + "_t" + std::to_string(k) + ".ppm")).string();
      run_render(r);
    }
  }

  // detection on the map scene
  SimulateArgs det_sim;
  det_sim.scene_path = (dir / "map.scene").string();
  det_sim.frames = 4;
  det_sim.dt = 0.5;
  det_sim.seed = seed;
  det_sim.out = (dir / "map_tracks.csv").string();
  run_simulate(det_sim);
  run_transform(det_sim.out, (dir / "map_invariants.csv").string(), 0.0);
  run_detect((dir / "map_invariants.csv").string(), (dir / "map_labels.csv").string(),
             flowinv::kDefaultEpsAbs, flowinv::kDefaultEpsRel);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optical-flow invariant simulator (Time-Clearance / TTC)"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "synthesize flow tracks from a scene");
  simulate->add_option("--scene", sim.scene_path, "scene file")->required();
  simulate->add_option("--frames", sim.frames, "number of frames (>= 2)");
  simulate->add_option("--dt", sim.dt, "frame spacing, seconds");
  simulate->add_option("--flow", sim.flow, "analytic | finite-diff");
  simulate->add_option("--noise", sim.noise, "relative rho_dot noise sigma");
  simulate->add_option("--seed", sim.seed, "noise seed");
  simulate->add_option("--out", sim.out, "tracks CSV path");

  std::string in_path, out_path = "invariants.csv";
  double focal_override = 0.0;
  auto* transform = app.add_subcommand("transform", "flow tracks -> invariant domain");
  transform->add_option("input", in_path, "tracks CSV")->required();
  transform->add_option("--out", out_path, "invariants CSV path");
  transform->add_option("--focal", focal_override, "focal length override, pixels");

  std::string det_in, det_out = "labels.csv";
  double eps_abs = flowinv::kDefaultEpsAbs, eps_rel = flowinv::kDefaultEpsRel;
  auto* detect = app.add_subcommand("detect", "label moving points by constancy violation");
  detect->add_option("input", det_in, "invariants CSV")->required();
  detect->add_option("--eps-abs", eps_abs, "absolute residual threshold, seconds");
  detect->add_option("--eps-rel", eps_rel, "relative residual threshold");
  detect->add_option("--out", det_out, "labels CSV path");

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "color-coded invariant map to PPM");
  render->add_option("--scene", ren.scene_path, "scene file")->required();
  render->add_option("--t", ren.t, "frame time, seconds");
  render->add_option("--map", ren.map, "ttc_inv | tc_inv | combined");
  render->add_option("--vmin", ren.vmin, "color range minimum");
  render->add_option("--vmax", ren.vmax, "color range maximum (default: 99th percentile)");
  render->add_option("--out", ren.out, "output PPM path");

  std::string con_in, con_out;
  double t1 = 0.0, t2 = 1.0;
  auto* constancy = app.add_subcommand("constancy", "shape-constancy report between two frames");
  constancy->add_option("input", con_in, "invariants CSV")->required();
  constancy->add_option("--t1", t1, "first frame time");
  constancy->add_option("--t2", t2, "second frame time");
  constancy->add_option("--out", con_out, "also write the report here");

  std::string demo_out = "demo_out";
  std::uint64_t demo_seed = 0;
  auto* demo = app.add_subcommand("demo", "reproduce the pyramid and map sequences");
  demo->add_option("--out", demo_out, "output directory");
  demo->add_option("--seed", demo_seed, "noise seed");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) run_simulate(sim);
    else if (transform->parsed()) run_transform(in_path, out_path, focal_override);
    else if (detect->parsed()) run_detect(det_in, det_out, eps_abs, eps_rel);
    else if (render->parsed()) run_render(ren);
    else if (constancy->parsed()) run_constancy(con_in, t1, t2, con_out);
    else if (demo->parsed()) run_demo(demo_out, demo_seed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
