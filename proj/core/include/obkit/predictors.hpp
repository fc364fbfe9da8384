#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "obkit/interaction.hpp"
#include "obkit/raster.hpp"
#include "obkit/rng.hpp"

namespace obkit::predict {

/// RGB (3 channels), scribble map (2) and previous output (1).
struct PredictorInput {
  std::optional<RgbImage> rgb;
  interact::FnFpMap fnfp;
  ProbabilityMap prev;
  // Used by the oracle predictor: the sample name for its gt lookup and seed,
  // or the gt itself.
  std::string sample_id;
  std::optional<BinaryMap> gt;

  Extent extent() const;
  /// Throws DimensionMismatch when present rasters disagree.
  void validate() const;

  /// All-zero scribbles and previous output for an image.
  static PredictorInput initial(RgbImage rgb, std::string sample_id = {});
};

enum class PredictorKind { gradient, oracle_noise, external };

struct PredictorSpec {
  PredictorKind kind = PredictorKind::gradient;
  // oracle_noise
  std::filesystem::path gt_dir;
  double fn_rate = 0.0;
  double fp_rate = 0.0;
  std::uint64_t seed = 0;
  // external
  std::string command;
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};

  void validate() const;
};

/// `gradient`, `oracle:<gt-dir>,<fn_rate>,<fp_rate>` or `extern:<command>`.
/// Throws InvalidArgument.
PredictorSpec parse_predictor_spec(std::string_view text);
std::string format_predictor_spec(const PredictorSpec& spec);

/// Dispatches on spec.kind. The result always lies in [0,1].
ProbabilityMap predict(const PredictorSpec& spec, const PredictorInput& input);

/// Sobel magnitude of luminance over its 99th percentile, clamped to [0,1].
ProbabilityMap gradient_predictor(const RgbImage& rgb);

/// gt at 1.0 with each gt segment dropped with probability fn_rate and each
/// fp_source segment added with probability fp_rate.
ProbabilityMap oracle_noise_predictor(const BinaryMap& gt, double fn_rate, double fp_rate, Rng& rng,
                                      const std::vector<BoundarySegment>& fp_source);

/// Work-directory protocol. Files written into `dir`:
///   rgb.png        8-bit RGB (omitted without an image)
///   fn.png, fp.png 8-bit masks, 0 or 255
///   prev.obfmap    previous output
///   manifest.json  {"width","height","rgb"?,"fn","fp","prev","output"}
/// The command runs as `/bin/sh -c "<command> '<dir>'"`; it must exit 0 and
/// leave `out.obfmap` of the same size. Values are clamped to [0,1].
void write_work_dir(const std::filesystem::path& dir, const PredictorInput& input);
ProbabilityMap run_external(const std::string& command, const PredictorInput& input, const std::filesystem::path& dir,
                            std::chrono::milliseconds timeout);

struct ProcessResult {
  int exit_code = -1;  // -1 when killed or not exited normally
  bool timed_out = false;
};
/// Runs `/bin/sh -c script` and kills the process group after `timeout`.
ProcessResult run_shell(const std::string& script, std::chrono::milliseconds timeout);

}  // namespace obkit::predict
