#include <algorithm>

#include "obkit/interaction.hpp"

namespace obkit::interact {

ProbabilityMap refine(const ProbabilityMap& prev, const ProbabilityMap& candidate, const FnFpMap& fnfp) {
  require_same_extent(prev, candidate, "previous output and candidate differ in size");
  require_same_extent(prev, fnfp.fn, "scribble map differs in size");
  require_same_extent(fnfp.fn, fnfp.fp, "fn and fp channels differ in size");
  ProbabilityMap out = prev;
  auto o = out.data();
  const auto c = candidate.data();
  const auto fn = fnfp.fn.data();
  const auto fp = fnfp.fp.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (fn[i]) {
      o[i] = std::max(o[i], c[i]);
    } else if (fp[i]) {
      o[i] = 0.0f;
    }
  }
  return out;
}

ProbabilityMap postprocess(const ProbabilityMap& raw, const ThresholdConfig& cfg) {
  return apply_threshold(nms_thin(raw), cfg);
}

ProbabilityMap refine_round(const ProbabilityMap& prev, const ProbabilityMap& raw_candidate, const FnFpMap& fnfp,
                            const ThresholdConfig& cfg) {
  return apply_threshold(refine(prev, nms_thin(raw_candidate), fnfp), cfg);
}

BinaryMap boundary_of(const ProbabilityMap& map, const ThresholdConfig& cfg) {
  return morph_thin(threshold_binary(map, cfg.threshold));
}

}  // namespace obkit::interact
