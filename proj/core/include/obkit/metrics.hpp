#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "obkit/raster.hpp"

namespace obkit::metrics {

enum class MatchSolver {
  bucketed,  // greedy by distance bucket, then augmenting paths to maximum cardinality
  greedy,    // greedy by distance bucket only
  min_cost,  // maximum cardinality with minimum total distance; small images only
};

struct MatchConfig {
  double d_max_fraction = 0.0075;  // of the image diagonal
  int thresholds = 99;             // t_i = i / (thresholds + 1)
  MatchSolver solver = MatchSolver::bucketed;

  void validate() const;
  double d_max(Extent e) const { return d_max_fraction * std::hypot(double(e.width), double(e.height)); }
  std::vector<double> threshold_grid() const;
};

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;  // unmatched prediction pixels
  std::size_t fn = 0;  // unmatched gt pixels
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

/// One-to-one correspondence between on-pixels with pair distance <= d_max.
/// Both maps must be thin (NotThin otherwise).
MatchCounts match_boundaries(const BinaryMap& pred, const BinaryMap& gt, double d_max,
                             MatchSolver solver = MatchSolver::bucketed);

/// Precision is 1 without predictions; recall is 1 without gt.
double precision(const MatchCounts& c);
double recall(const MatchCounts& c);
double f_measure(double p, double r);
double f_measure(const MatchCounts& c);

struct PrPoint {
  double threshold = 0.0;
  MatchCounts counts;
  double precision = 1.0;
  double recall = 0.0;

  double f() const { return f_measure(precision, recall); }
};

using PrCurve = std::vector<PrPoint>;

PrPoint make_point(double threshold, const MatchCounts& counts);

/// Threshold sweep: at each t, morph_thin(prob >= t) is matched against gt.
/// `prob` is expected to be NMS-thinned already.
PrCurve pr_curve(const ProbabilityMap& prob, const BinaryMap& gt, const MatchConfig& cfg);

struct EvalReport {
  double ods = 0.0;
  double ods_threshold = 0.0;
  double ois = 0.0;
  double ap = 0.0;
  double avg_fn = 0.0;
  double avg_fp = 0.0;
  std::vector<PrCurve> curves;
  std::vector<std::size_t> best_index;  // per image, index of its best-F threshold
};

/// ODS from counts summed over images at a shared threshold, OIS from counts
/// summed at each image's own best threshold, AP as mean interpolated
/// precision over 101 recall levels of the aggregate curve.
EvalReport summarize(std::vector<PrCurve> curves);

struct ImageResiduals {
  std::vector<BoundarySegment> fn;
  std::vector<BoundarySegment> fp;
  const BinaryMap* gt = nullptr;
};

struct AvgFnFp {
  double avg_fn = 0.0;
  double avg_fp = 0.0;
  std::size_t excluded_fn = 0;  // images with an empty gt
  std::size_t excluded_fp = 0;  // images whose gt covers every pixel
};

struct ResidualCounts {
  std::size_t fn_pixels = 0;
  std::size_t fp_pixels = 0;
  std::size_t gt_on = 0;
  std::size_t gt_off = 0;
};

/// Unweighted means over images of |fn pixels| / |gt on| and
/// |fp pixels| / |gt off|.
AvgFnFp avg_fn_fp(const std::vector<ImageResiduals>& images);
AvgFnFp avg_fn_fp(const std::vector<ResidualCounts>& images);

}  // namespace obkit::metrics
