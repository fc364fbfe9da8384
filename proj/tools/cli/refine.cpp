#include <ostream>

#include "cli/commands.hpp"
#include "obkit/interaction.hpp"
#include "obkit/predictors.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::cli {

void add_refine(CLI::App& app, RefineOptions& o) {
  auto* cmd = app.add_subcommand("refine", "One refinement round from a scribble document");
  cmd->add_option("--image", o.image, "RGB image")->required();
  cmd->add_option("--prev", o.prev, "Previous output (.obfmap); predicted from the image when omitted");
  cmd->add_option("--scribbles", o.scribbles, "Scribble document (JSON)")->required();
  cmd->add_option("--predictor", o.predictor, "Predictor spec")->capture_default_str();
  cmd->add_option("--gt", o.gt, "gt mask handed to an oracle predictor");
  cmd->add_option("--threshold", o.threshold, "Threshold T")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_flag("--binary", o.binary, "Binary previous output");
  cmd->add_option("--predictor-timeout", o.predictor_timeout, "External predictor timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Refined map (.obfmap)")->required();
  cmd->add_option("--ob-out", o.ob_out, "Thin boundary mask (.png)");
}

void run_refine(const RefineOptions& o, const Context& ctx) {
  predict::PredictorSpec spec = predict::parse_predictor_spec(o.predictor);
  spec.seed = ctx.globals.seed;
  spec.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(o.predictor_timeout * 1000.0));
  const ThresholdConfig tcfg{o.threshold, o.binary ? ThresholdMode::binary : ThresholdMode::non_binary};
  const std::string id = o.image.stem().string();
  predict::PredictorInput input = predict::PredictorInput::initial(io::read_rgb(o.image), id);
  if (o.gt) input.gt = read_gt(*o.gt);
  if (o.prev) {
    input.prev = io::read_float_map(*o.prev);
    validate_probability(input.prev);
    require_same_extent(input.prev, *input.rgb, "previous output differs from the image in size");
  } else {
    input.prev = interact::postprocess(predict::predict(spec, input), tcfg);
  }
  const auto doc = interact::parse_scribble_document(io::read_text(o.scribbles));
  input.fnfp = interact::rasterize(doc, input.extent());
  const ProbabilityMap out = interact::refine_round(input.prev, predict::predict(spec, input), input.fnfp, tcfg);
  io::write_float_map(o.out, out);
  const BinaryMap ob = interact::boundary_of(out, tcfg);
  if (o.ob_out) io::write_mask(*o.ob_out, ob);
  ctx.out << "refined " << id << ": " << count_on(ob) << " boundary pixels\n";
}

}  // namespace obkit::cli
