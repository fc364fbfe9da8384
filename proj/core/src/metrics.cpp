#include <algorithm>
#include <set>

#include "obkit/log.hpp"
#include "obkit/metrics.hpp"

namespace obkit::metrics {
namespace {

MatchCounts operator+(MatchCounts a, const MatchCounts& b) {
  a.tp += b.tp;
  a.fp += b.fp;
  a.fn += b.fn;
  return a;
}

std::size_t pixel_count(const std::vector<BoundarySegment>& segs) {
  std::set<Pixel> all;
  for (const auto& s : segs) all.insert(s.points.begin(), s.points.end());
  return all.size();
}

}  // namespace

void MatchConfig::validate() const {
  if (!(d_max_fraction > 0.0)) throw Error(ErrorCode::InvalidArgument, "d_max fraction must be > 0");
  if (thresholds < 1) throw Error(ErrorCode::InvalidArgument, "threshold count must be >= 1");
}

std::vector<double> MatchConfig::threshold_grid() const {
  std::vector<double> t(static_cast<std::size_t>(thresholds));
  for (int i = 0; i < thresholds; ++i) t[i] = double(i + 1) / double(thresholds + 1);
  return t;
}

double precision(const MatchCounts& c) { return c.tp + c.fp == 0 ? 1.0 : double(c.tp) / double(c.tp + c.fp); }
double recall(const MatchCounts& c) { return c.tp + c.fn == 0 ? 1.0 : double(c.tp) / double(c.tp + c.fn); }
double f_measure(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }
double f_measure(const MatchCounts& c) { return f_measure(precision(c), recall(c)); }

PrPoint make_point(double threshold, const MatchCounts& counts) {
  return {threshold, counts, precision(counts), recall(counts)};
}

PrCurve pr_curve(const ProbabilityMap& prob, const BinaryMap& gt, const MatchConfig& cfg) {
  cfg.validate();
  require_same_extent(prob, gt, "prediction and gt differ in size");
  const double d_max = cfg.d_max(gt.extent());
  PrCurve curve;
  for (const double t : cfg.threshold_grid()) {
    const BinaryMap pred = morph_thin(threshold_binary(prob, t));
    curve.push_back(make_point(t, match_boundaries(pred, gt, d_max, cfg.solver)));
  }
  return curve;
}

EvalReport summarize(std::vector<PrCurve> curves) {
  if (curves.empty()) throw Error(ErrorCode::EmptyDataset, "no images to summarize");
  const std::size_t n = curves.front().size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty PR curve");
  for (const auto& c : curves) {
    if (c.size() != n) throw Error(ErrorCode::InvalidArgument, "PR curves use different threshold grids");
    for (std::size_t i = 0; i < n; ++i) {
      if (c[i].threshold != curves.front()[i].threshold) {
        throw Error(ErrorCode::InvalidArgument, "PR curves use different threshold grids");
      }
    }
  }
  EvalReport r;
  std::vector<PrPoint> aggregate;
  for (std::size_t i = 0; i < n; ++i) {
    MatchCounts sum;
    for (const auto& c : curves) sum = sum + c[i].counts;
    aggregate.push_back(make_point(curves.front()[i].threshold, sum));
  }
  r.ods = -1.0;
  for (const PrPoint& p : aggregate) {
    if (p.f() > r.ods) {
      r.ods = p.f();
      r.ods_threshold = p.threshold;
    }
  }
  MatchCounts best_sum;
  for (const auto& c : curves) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (c[i].f() > c[best].f()) best = i;
    r.best_index.push_back(best);
    best_sum = best_sum + c[best].counts;
  }
  r.ois = f_measure(best_sum);
  constexpr int kRecallLevels = 101;
  double total = 0.0;
  for (int k = 0; k < kRecallLevels; ++k) {
    const double level = double(k) / double(kRecallLevels - 1);
    double best = 0.0;
    for (const PrPoint& p : aggregate)
      if (p.recall >= level) best = std::max(best, p.precision);
    total += best;
  }
  r.ap = total / kRecallLevels;
  r.curves = std::move(curves);
  return r;
}

AvgFnFp avg_fn_fp(const std::vector<ImageResiduals>& images) {
  std::vector<ResidualCounts> counts;
  for (const ImageResiduals& img : images) {
    if (img.gt == nullptr) throw Error(ErrorCode::MissingInput, "image without gt");
    const std::size_t on = count_on(*img.gt);
    counts.push_back({pixel_count(img.fn), pixel_count(img.fp), on, img.gt->size() - on});
  }
  return avg_fn_fp(counts);
}

AvgFnFp avg_fn_fp(const std::vector<ResidualCounts>& images) {
  if (images.empty()) throw Error(ErrorCode::EmptyDataset, "no images for avg_fn/avg_fp");
  AvgFnFp out;
  double fn_sum = 0.0, fp_sum = 0.0;
  std::size_t fn_n = 0, fp_n = 0;
  for (const ResidualCounts& c : images) {
    if (c.gt_on == 0) {
      ++out.excluded_fn;
      log::warn(std::string(to_string(ErrorCode::EmptyGt)) + ": image with empty gt left out of avg_fn");
    } else {
      fn_sum += double(c.fn_pixels) / double(c.gt_on);
      ++fn_n;
    }
    if (c.gt_off == 0) {
      ++out.excluded_fp;
    } else {
      fp_sum += double(c.fp_pixels) / double(c.gt_off);
      ++fp_n;
    }
  }
  out.avg_fn = fn_n ? fn_sum / double(fn_n) : 0.0;
  out.avg_fp = fp_n ? fp_sum / double(fp_n) : 0.0;
  return out;
}

}  // namespace obkit::metrics
