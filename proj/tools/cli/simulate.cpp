#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>

#include "cli/commands.hpp"
#include "obkit/interaction.hpp"
#include "obkit/log.hpp"
#include "obkit/metrics.hpp"
#include "obkit/parallel.hpp"
#include "obkit/predictors.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::cli {
namespace {

struct ImageResult {
  std::string id;
  Extent extent;
  metrics::ResidualCounts counts;
  std::size_t fn_segments = 0;
  std::size_t fp_segments = 0;
  double f_initial = 0.0;
  double f_refined = 0.0;
};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void merge_into(BinaryMap& dst, const BinaryMap& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] |= src.data()[i];
}

std::size_t pixel_count(const std::vector<BoundarySegment>& segs) {
  std::size_t n = 0;
  for (const auto& s : segs) n += s.length();
  return n;
}

}  // namespace

void add_simulate(CLI::App& app, SimulateOptions& o) {
  auto* cmd = app.add_subcommand("simulate", "Machine-simulated interaction: predict, scribble, refine");
  cmd->add_option("--images", o.images, "Directory of RGB images")->required();
  cmd->add_option("--gt", o.gt, "Directory of gt masks with matching stems")->required();
  cmd->add_option("--predictor", o.predictor, "gradient | oracle:<gt-dir>,<fn_rate>,<fp_rate> | extern:<command>")
      ->required();
  cmd->add_option("--radius", o.radius, "Scribble disk radius")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--min-seg-len", o.min_seg_len, "Segments must be strictly longer than this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-segs", o.max_segs, "At most this many FN and this many FP segments");
  cmd->add_option("--progressive", o.progressive, "Rounds of one FN and one FP scribble")->check(CLI::PositiveNumber);
  cmd->add_option("--max-perturb", o.max_perturb, "Position noise, Chebyshev pixels")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--length-perturb", o.length_perturb, "Endpoint noise as a fraction of the segment length")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--threshold", o.threshold, "Threshold T")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_flag("--binary", o.binary, "Binary previous output");
  cmd->add_option("--match-tolerance", o.match_tolerance, "Residual tolerance in pixels (default: evaluation d_max)");
  cmd->add_option("--predictor-timeout", o.predictor_timeout, "External predictor timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->required();
}

void run_simulate(const SimulateOptions& o, const Context& ctx) {
  predict::PredictorSpec spec = predict::parse_predictor_spec(o.predictor);
  spec.seed = ctx.globals.seed;
  spec.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(o.predictor_timeout * 1000.0));
  const auto images = files_by_stem(o.images, {".png", ".jpg", ".jpeg", ".ppm", ".bmp", ".tif", ".tiff"});
  const auto gts = files_by_stem(o.gt, {".png"});
  std::vector<std::string> ids;
  for (const auto& [id, path] : images) {
    if (gts.contains(id)) {
      ids.push_back(id);
    } else {
      log::warn("no gt for image " + path.string());
    }
  }
  if (ids.empty()) throw Error(ErrorCode::NoPairs, o.images.string() + " and " + o.gt.string() + " share no stems");

  ThresholdConfig tcfg{o.threshold, o.binary ? ThresholdMode::binary : ThresholdMode::non_binary};
  interact::SelectionConfig sel;
  sel.min_segment_length = o.min_seg_len;
  sel.max_segments = o.progressive ? std::optional<std::size_t>(1) : o.max_segs;
  sel.validate();
  const int rounds = o.progressive.value_or(1);
  for (const char* sub : {"initial", "fn", "fp", "refined"}) std::filesystem::create_directories(o.out / sub);

  std::vector<ImageResult> results(ids.size());
  parallel_for(ids.size(), ctx.globals.jobs, [&](std::size_t i) {
    const std::string& id = ids[i];
    const RgbImage rgb = io::read_rgb(images.at(id));
    const BinaryMap gt = read_gt(gts.at(id));
    if (gt.extent() != rgb.extent()) throw Error(ErrorCode::DimensionMismatch, gts.at(id).string() + " differs from its image in size");
    const double d_max = metrics::MatchConfig{}.d_max(gt.extent());
    const double tol = o.match_tolerance.value_or(d_max);

    predict::PredictorInput input = predict::PredictorInput::initial(rgb, id);
    const ProbabilityMap initial = interact::postprocess(predict::predict(spec, input), tcfg);
    ProbabilityMap prev = initial;
    interact::FnFpMap all(gt.extent());
    ImageResult r{id, gt.extent()};
    for (int round = 0; round < rounds; ++round) {
      const auto res = interact::extract_residual_segments(interact::boundary_of(prev, tcfg), gt, tol);
      const auto fn = interact::select_segments(res.fn, sel);
      const auto fp = interact::select_segments(res.fp, sel);
      r.fn_segments += fn.size();
      r.fp_segments += fp.size();
      r.counts.fn_pixels += pixel_count(fn);
      r.counts.fp_pixels += pixel_count(fp);
      if (fn.empty() && fp.empty()) continue;
      interact::ScribbleConfig scfg;
      scfg.disk_radius = o.radius;
      scfg.max_position_perturbation = o.max_perturb;
      scfg.length_perturbation_fraction = o.length_perturb;
      scfg.rng_seed = derive_seed(ctx.globals.seed, id + "#" + std::to_string(round));
      const interact::FnFpMap fnfp = interact::simulate_scribbles(fn, fp, scfg, gt.extent());
      merge_into(all.fn, fnfp.fn);
      merge_into(all.fp, fnfp.fp);
      input.fnfp = fnfp;
      input.prev = prev;
      prev = interact::refine_round(prev, predict::predict(spec, input), fnfp, tcfg);
    }
    r.counts.gt_on = count_on(gt);
    r.counts.gt_off = gt.size() - r.counts.gt_on;
    r.f_initial = metrics::f_measure(metrics::match_boundaries(interact::boundary_of(initial, tcfg), gt, d_max));
    r.f_refined = metrics::f_measure(metrics::match_boundaries(interact::boundary_of(prev, tcfg), gt, d_max));
    io::write_float_map(o.out / "initial" / (id + ".obfmap"), initial);
    io::write_mask(o.out / "fn" / (id + ".png"), all.fn);
    io::write_mask(o.out / "fp" / (id + ".png"), all.fp);
    io::write_float_map(o.out / "refined" / (id + ".obfmap"), prev);
    results[i] = std::move(r);
  });

  std::string csv = "id,width,height,gt_pixels,gt_off_pixels,fn_segments,fn_pixels,fp_segments,fp_pixels,f_initial,f_refined\n";
  std::vector<metrics::ResidualCounts> counts;
  double f0 = 0.0, f1 = 0.0;
  for (const ImageResult& r : results) {
    csv += r.id + "," + std::to_string(r.extent.width) + "," + std::to_string(r.extent.height) + "," +
           std::to_string(r.counts.gt_on) + "," + std::to_string(r.counts.gt_off) + "," + std::to_string(r.fn_segments) +
           "," + std::to_string(r.counts.fn_pixels) + "," + std::to_string(r.fp_segments) + "," +
           std::to_string(r.counts.fp_pixels) + "," + fixed(r.f_initial) + "," + fixed(r.f_refined) + "\n";
    counts.push_back(r.counts);
    f0 += r.f_initial;
    f1 += r.f_refined;
  }
  io::write_text(o.out / "summary.csv", csv);
  const auto avg = metrics::avg_fn_fp(counts);
  nlohmann::ordered_json report{
      {"images", results.size()},
      {"predictor", predict::format_predictor_spec(spec)},
      {"seed", ctx.globals.seed},
      {"radius", o.radius},
      {"min_seg_len", o.min_seg_len},
      {"max_segs", sel.max_segments ? nlohmann::ordered_json(*sel.max_segments) : nlohmann::ordered_json(nullptr)},
      {"rounds", rounds},
      {"threshold", o.threshold},
      {"binary", o.binary},
      {"avg_fn", avg.avg_fn},
      {"avg_fp", avg.avg_fp},
      {"mean_f_initial", f0 / double(results.size())},
      {"mean_f_refined", f1 / double(results.size())},
  };
  io::write_text(o.out / "report.json", report.dump(2) + "\n");
  ctx.out << "simulated " << results.size() << " images; mean F " << fixed(f0 / double(results.size())) << " -> "
          << fixed(f1 / double(results.size())) << "\n";
}

}  // namespace obkit::cli
