#include "cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "palis/codec.hpp"
#include "palis/error.hpp"
#include "palis/fitter.hpp"
#include "palis/formats.hpp"
#include "palis/metrics.hpp"
#include "palis/parallel.hpp"
#include "palis/raster.hpp"
#include "palis/reconstruct.hpp"
#include "palis/synth.hpp"

namespace palis::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

std::string version_text() {
  return std::string("palis ") + kToolVersion + "\n" +
         "graph file version " + std::to_string(kGraphFormatVersion) + "\n" +
         "grid file version " + std::to_string(kGridFormatVersion) + "\n" +
         "float raster PLSF version " + std::to_string(kFloatRasterVersion) + "\n" +
         "byte mask PGM P5 maxval 255";
}

std::string sci(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12e", v);
  return buf.data();
}

struct RasterFlags {
  double tau_inv = 8.0;
  double t_in = 1.0;
  double t_out = 10.0;

  void add(CLI::App& app) {
    app.add_option("--tau-inv", tau_inv, "Sharpness factor")->capture_default_str();
    app.add_option("--t-in", t_in, "Projection factor on the segment")->capture_default_str();
    app.add_option("--t-out", t_out, "Projection factor beyond the endpoints")->capture_default_str();
  }
  RasterParams params() const { return {tau_inv, t_in, t_out}; }
};

struct FitFlags {
  double lr = 0.25;
  int iters = 500;
  double tol = 1e-12;
  std::string optimizer = "gd";
  double momentum = 0.9;

  void add(CLI::App& app) {
    app.add_option("--lr", lr, "Step length in pixels")->capture_default_str();
    app.add_option("--iters", iters, "Iteration budget")->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--tol", tol, "Stop when the loss changes by less than this")->capture_default_str();
    app.add_option("--optimizer", optimizer, "gd or momentum")
        ->capture_default_str()
        ->check(CLI::IsMember({"gd", "momentum"}));
    app.add_option("--momentum", momentum, "Momentum coefficient")->capture_default_str();
  }
  FitConfig config(const RasterParams& raster) const {
    FitConfig c;
    c.learning_rate = lr;
    c.max_iters = iters;
    c.tol = tol;
    c.optimizer = optimizer == "momentum" ? Optimizer::Momentum : Optimizer::GradientDescent;
    c.momentum = momentum;
    c.raster = raster;
    return c;
  }
};

struct ReconstructFlags {
  double tau_d = 2.0;
  double tau_a = 15.0;

  void add(CLI::App& app) {
    app.add_option("--tau-d", tau_d, "Distance threshold in pixels")->capture_default_str();
    app.add_option("--tau-a", tau_a, "Angle threshold in degrees")->capture_default_str();
  }
  ReconstructParams params() const {
    ReconstructParams p;
    p.tau_d = tau_d;
    p.tau_a = tau_a;
    return p;
  }
};

struct MetricFlags {
  std::string metric = "all";
  AplsParams apls;
  TopoParams topo;
  std::string matching = "greedy";

  void add(CLI::App& app, bool with_selector) {
    if (with_selector) {
      app.add_option("--metric", metric, "apls, topo or all")
          ->capture_default_str()
          ->check(CLI::IsMember({"apls", "topo", "all"}));
    }
    app.add_option("--control-point-spacing", apls.control_point_spacing)->capture_default_str();
    app.add_option("--snap-radius", apls.snap_radius)->capture_default_str();
    app.add_option("--seed-interval", topo.seed_interval)->capture_default_str();
    app.add_option("--match-radius", topo.match_radius)->capture_default_str();
    app.add_option("--propagation-radius", topo.propagation_radius)->capture_default_str();
    app.add_option("--marble-interval", topo.marble_interval)->capture_default_str();
    app.add_option("--matching", matching, "greedy or max")
        ->capture_default_str()
        ->check(CLI::IsMember({"greedy", "max"}));
  }

  // One "name value params" line per score.
  std::string score_record(const RoadGraph& gt, const RoadGraph& prop, std::vector<TopoSeedRecord>* per_seed) {
    topo.matching = matching == "max" ? MarbleMatching::MaxCardinality : MarbleMatching::Greedy;
    std::string out;
    if (metric == "apls" || metric == "all") {
      const AplsBreakdown b = apls_breakdown(gt, prop, apls);
      const std::string params = " control_point_spacing=" + format_fixed6(apls.control_point_spacing) +
                                 " snap_radius=" + format_fixed6(apls.snap_radius) + "\n";
      out += "apls " + format_fixed6(b.score) + params;
      out += "apls_gt_to_prop " + format_fixed6(b.gt_to_prop) + params;
      out += "apls_prop_to_gt " + format_fixed6(b.prop_to_gt) + params;
    }
    if (metric == "topo" || metric == "all") {
      const TopoScore s = palis::topo(gt, prop, topo, per_seed);
      const std::string params = " seed_interval=" + format_fixed6(topo.seed_interval) +
                                 " match_radius=" + format_fixed6(topo.match_radius) +
                                 " propagation_radius=" + format_fixed6(topo.propagation_radius) +
                                 " marble_interval=" + format_fixed6(topo.marble_interval) + " matching=" + matching +
                                 "\n";
      out += "topo_precision " + format_fixed6(s.precision) + params;
      out += "topo_recall " + format_fixed6(s.recall) + params;
      out += "topo_f1 " + format_fixed6(s.f1) + params;
    }
    return out;
  }
};

std::string per_seed_lines(const std::vector<TopoSeedRecord>& records) {
  std::string out = "# seed_x seed_y matched holes marbles matches\n";
  for (const TopoSeedRecord& r : records) {
    out += format_fixed6(r.seed.x) + " " + format_fixed6(r.seed.y) + " " + (r.matched ? "1" : "0") + " " +
           std::to_string(r.holes) + " " + std::to_string(r.marbles) + " " + std::to_string(r.matches) + "\n";
  }
  return out;
}

std::string fit_log(const FitReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.loss_trace.size(); ++i) {
    out += std::to_string(i) + " " + sci(report.loss_trace[i]) + "\n";
  }
  out += std::to_string(report.loss_trace.size()) + " " + sci(report.final_loss) + "\n";
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patched line segment road graphs", "palis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_text());
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = hardware)");

  // encode
  auto* encode = app.add_subcommand("encode", "Graph file -> grid file");
  std::string enc_in, enc_out;
  std::optional<int> enc_width, enc_height;
  int patch_size = 8;
  encode->add_option("graph", enc_in, "Input graph file")->required();
  encode->add_option("-o,--out", enc_out, "Output grid file")->required();
  encode->add_option("--width", enc_width, "Image width (defaults to the graph file)");
  encode->add_option("--height", enc_height, "Image height (defaults to the graph file)");
  encode->add_option("--patch-size", patch_size)->capture_default_str();

  // rasterize
  auto* rasterize = app.add_subcommand("rasterize", "Grid file -> float raster and 8-bit preview");
  std::string ras_in, ras_out, ras_preview;
  RasterFlags ras_flags;
  rasterize->add_option("grid", ras_in, "Input grid file")->required();
  rasterize->add_option("-o,--out", ras_out, "Output float raster")->required();
  rasterize->add_option("--preview", ras_preview, "Optional PGM preview");
  ras_flags.add(*rasterize);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit I-cell segments to a target mask or to vector labels");
  std::string fit_grid, fit_target, fit_out, fit_log_path, fit_labels, fit_reference;
  std::string supervision = "mask";
  std::string init_mode = "keep";
  std::uint64_t fit_seed = 0;
  RasterFlags fit_raster;
  FitFlags fit_flags;
  fit->add_option("grid", fit_grid, "Initial grid file")->required();
  fit->add_option("--target", fit_target, "Target float raster (mask supervision)");
  fit->add_option("--labels", fit_labels, "Label grid file (sorted/unsorted supervision)");
  fit->add_option("-o,--out", fit_out, "Output grid file")->required();
  fit->add_option("--log", fit_log_path, "Loss log (iteration loss per line)");
  fit->add_option("--reference", fit_reference, "Reference grid for endpoint error");
  fit->add_option("--supervision", supervision)
      ->capture_default_str()
      ->check(CLI::IsMember({"mask", "sorted", "unsorted"}));
  fit->add_option("--init", init_mode, "keep the input segments or reset to the default")
      ->capture_default_str()
      ->check(CLI::IsMember({"keep", "default"}));
  fit->add_option("--seed", fit_seed)->capture_default_str();
  fit_raster.add(*fit);
  fit_flags.add(*fit);

  // reconstruct
  auto* reconstruct = app.add_subcommand("reconstruct", "Grid file -> graph file");
  std::string rec_in, rec_out, rec_svg;
  ReconstructFlags rec_flags;
  reconstruct->add_option("grid", rec_in, "Input grid file")->required();
  reconstruct->add_option("-o,--out", rec_out, "Output graph file")->required();
  reconstruct->add_option("--svg", rec_svg, "Optional SVG overlay");
  rec_flags.add(*reconstruct);

  // eval
  auto* eval = app.add_subcommand("eval", "Score a proposal graph against ground truth");
  std::string eval_gt, eval_prop, eval_out, eval_per_seed;
  MetricFlags eval_flags;
  eval->add_option("gt", eval_gt, "Ground-truth graph file")->required();
  eval->add_option("prop", eval_prop, "Proposal graph file")->required();
  eval->add_option("-o,--out", eval_out, "Score record (stdout when omitted)");
  eval->add_option("--per-seed", eval_per_seed, "TOPO per-seed diagnostics");
  eval_flags.add(*eval, true);

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Encode or load, fit, reconstruct, score, render");
  std::string pipe_gt, pipe_target, pipe_grid, pipe_dir;
  bool pipe_no_fit = false;
  RasterFlags pipe_raster;
  FitFlags pipe_fit;
  ReconstructFlags pipe_rec;
  MetricFlags pipe_metrics;
  pipeline->add_option("--gt", pipe_gt, "Ground-truth graph file");
  pipeline->add_option("--target", pipe_target, "Target float raster (with --grid)");
  pipeline->add_option("--grid", pipe_grid, "Grid file providing patch classes (with --target)");
  pipeline->add_option("--out-dir", pipe_dir, "Output directory")->required();
  pipeline->add_option("--patch-size", patch_size)->capture_default_str();
  pipeline->add_flag("--no-fit", pipe_no_fit, "Reconstruct from the encoded grid directly");
  pipe_raster.add(*pipeline);
  pipe_fit.add(*pipeline);
  pipe_rec.add(*pipeline);
  pipe_metrics.add(*pipeline, false);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  std::string scene_name, synth_out, synth_mask;
  std::uint64_t synth_seed = 0;
  SynthParams synth_params;
  synth->add_option("--scene", scene_name)->required()->check(CLI::IsMember({"grid", "plus", "overpass", "manhattan"}));
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("-o,--out", synth_out, "Output graph file")->required();
  synth->add_option("--mask", synth_mask, "Optional centerline mask (PGM)");
  synth->add_option("--width", synth_params.width)->capture_default_str();
  synth->add_option("--height", synth_params.height)->capture_default_str();
  synth->add_option("--patch-size", synth_params.patch_size)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    set_max_threads(threads);

    if (encode->parsed()) {
      const GraphDocument doc = load_graph(enc_in);
      std::vector<EncodeDiagnostic> diagnostics;
      const PatchGrid grid =
          encode_graph(doc.graph, enc_width.value_or(doc.width), enc_height.value_or(doc.height), patch_size, &diagnostics);
      for (const EncodeDiagnostic& d : diagnostics) {
        err << "warning: cell (" << d.row << ", " << d.col << "): " << d.message << "\n";
      }
      save_grid(enc_out, grid);
    } else if (rasterize->parsed()) {
      const PatchGrid grid = load_grid(ras_in);
      const SoftMask mask = compose_soft_mask(grid, ras_flags.params());
      save_float_raster(ras_out, mask);
      if (!ras_preview.empty()) save_byte_mask(ras_preview, to_byte_mask(mask));
    } else if (fit->parsed()) {
      PatchGrid init = load_grid(fit_grid);
      if (init_mode == "default") init = default_initialization(init);
      std::optional<PatchGrid> reference;
      if (!fit_reference.empty()) reference = load_grid(fit_reference);
      const FitConfig cfg = fit_flags.config(fit_raster.params());
      FitResult result;
      if (supervision == "mask") {
        if (fit_target.empty()) throw UsageError("--target is required for mask supervision");
        const SoftMask target = load_float_raster(fit_target);
        result = fit_palis(init, target, cfg, reference ? &*reference : nullptr);
      } else {
        if (fit_labels.empty()) throw UsageError("--labels is required for vector supervision");
        const PatchGrid labels = load_grid(fit_labels);
        const VectorSupervision mode =
            supervision == "sorted" ? VectorSupervision::Sorted : VectorSupervision::Unsorted;
        result = fit_vector_supervised(init, labels, mode, cfg, fit_seed);
        if (reference) result.report.mean_endpoint_error = mean_endpoint_error(result.grid, *reference);
      }
      save_grid(fit_out, result.grid);
      if (!fit_log_path.empty()) write_file(fit_log_path, fit_log(result.report));
      out << "iterations " << result.report.iterations << "\n";
      out << "final_loss " << sci(result.report.final_loss) << "\n";
      if (result.report.mean_endpoint_error) {
        out << "mean_endpoint_error " << format_fixed6(*result.report.mean_endpoint_error) << "\n";
      }
    } else if (reconstruct->parsed()) {
      const PatchGrid grid = load_grid(rec_in);
      std::vector<std::string> diagnostics;
      const RoadGraph g = reconstruct_graph(grid, rec_flags.params(), &diagnostics);
      for (const std::string& d : diagnostics) err << "note: " << d << "\n";
      save_graph(rec_out, {grid.width(), grid.height(), g});
      if (!rec_svg.empty()) write_file(rec_svg, render_svg(g, grid.width(), grid.height(), {&grid, nullptr}));
    } else if (eval->parsed()) {
      const GraphDocument gt = load_graph(eval_gt);
      const GraphDocument prop = load_graph(eval_prop);
      std::vector<TopoSeedRecord> per_seed;
      const std::string record = eval_flags.score_record(gt.graph, prop.graph, &per_seed);
      if (eval_out.empty()) {
        out << record;
      } else {
        write_file(eval_out, record);
      }
      if (!eval_per_seed.empty()) write_file(eval_per_seed, per_seed_lines(per_seed));
    } else if (pipeline->parsed()) {
      const bool from_gt = !pipe_gt.empty();
      if (from_gt == (!pipe_target.empty() || !pipe_grid.empty())) {
        throw UsageError("pipeline needs either --gt or both --target and --grid");
      }
      if (!from_gt && (pipe_target.empty() || pipe_grid.empty())) {
        throw UsageError("--target and --grid must be given together");
      }
      const RasterParams raster = pipe_raster.params();
      std::optional<GraphDocument> gt;
      PatchGrid classes;
      SoftMask target;
      if (from_gt) {
        gt = load_graph(pipe_gt);
        classes = encode_graph(gt->graph, gt->width, gt->height, patch_size);
        target = compose_soft_mask(classes, raster);
      } else {
        classes = load_grid(pipe_grid);
        target = load_float_raster(pipe_target);
      }

      fs::create_directories(pipe_dir);
      const fs::path dir(pipe_dir);
      PatchGrid fitted = classes;
      if (!pipe_no_fit) {
        const FitResult result = fit_palis(default_initialization(classes), target, pipe_fit.config(raster),
                                              from_gt ? &classes : nullptr);
        fitted = result.grid;
        write_file(dir / "fit.log", fit_log(result.report));
      }
      save_grid(dir / "grid.json", fitted);
      std::vector<std::string> diagnostics;
      const RoadGraph g = reconstruct_graph(fitted, pipe_rec.params(), &diagnostics);
      for (const std::string& d : diagnostics) err << "note: " << d << "\n";
      save_graph(dir / "graph.json", {fitted.width(), fitted.height(), g});
      write_file(dir / "overlay.svg", render_svg(g, fitted.width(), fitted.height(), {&fitted, &target}));
      if (gt) {
        const std::string record = pipe_metrics.score_record(gt->graph, g, nullptr);
        write_file(dir / "scores.txt", record);
        out << record;
      }
    } else if (synth->parsed()) {
      const GraphDocument doc = synth_scene(*parse_scene(scene_name), synth_seed, synth_params);
      save_graph(synth_out, doc);
      if (!synth_mask.empty()) {
        save_byte_mask(synth_mask, to_byte_mask(render_centerline_mask(doc.graph, doc.width, doc.height)));
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const fs::filesystem_error& e) {
    err << "format error: io: " << e.what() << "\n";
    return kFormat;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvariant;
  }
  return kOk;
}

}  // namespace palis::cli
