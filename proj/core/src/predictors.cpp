#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cmath>

#include "obkit/metrics.hpp"
#include "obkit/predictors.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::predict {
namespace {

double parse_rate(std::string_view s, const char* what) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string("predictor ") + what + " '" + std::string(s) + "' is not a number");
  }
  return v;
}

Raster<double> luminance(const RgbImage& rgb) {
  Raster<double> l(rgb.extent());
  for (std::size_t i = 0; i < l.size(); ++i) {
    const Rgb8 c = rgb.data()[i];
    l.data()[i] = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
  }
  return l;
}

BinaryMap load_oracle_gt(const PredictorSpec& spec, const PredictorInput& input) {
  if (input.gt) return *input.gt;
  if (input.sample_id.empty()) throw Error(ErrorCode::MissingInput, "oracle predictor needs a sample id or gt");
  const auto path = spec.gt_dir / (input.sample_id + ".png");
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingInput, "no oracle gt at " + path.string());
  BinaryMap gt = io::read_mask(path);
  return is_thin(gt) ? gt : morph_thin(gt);
}

}  // namespace

Extent PredictorInput::extent() const { return rgb ? rgb->extent() : prev.extent(); }

void PredictorInput::validate() const {
  const Extent e = extent();
  if (fnfp.fn.extent() != e || fnfp.fp.extent() != e || prev.extent() != e) {
    throw Error(ErrorCode::DimensionMismatch, "predictor input rasters differ in size");
  }
  if (gt && gt->extent() != e) throw Error(ErrorCode::DimensionMismatch, "oracle gt differs in size");
}

PredictorInput PredictorInput::initial(RgbImage rgb, std::string sample_id) {
  PredictorInput in;
  const Extent e = rgb.extent();
  in.rgb = std::move(rgb);
  in.fnfp = interact::FnFpMap(e);
  in.prev = ProbabilityMap(e);
  in.sample_id = std::move(sample_id);
  return in;
}

void PredictorSpec::validate() const {
  if (kind == PredictorKind::oracle_noise) {
    if (!(fn_rate >= 0.0 && fn_rate <= 1.0) || !(fp_rate >= 0.0 && fp_rate <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "oracle rates must lie in [0,1]");
    }
  }
  if (kind == PredictorKind::external && command.empty()) {
    throw Error(ErrorCode::InvalidArgument, "external predictor needs a command");
  }
  if (timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "predictor timeout must be positive");
}

PredictorSpec parse_predictor_spec(std::string_view text) {
  PredictorSpec spec;
  if (text == "gradient") {
    spec.kind = PredictorKind::gradient;
  } else if (text.starts_with("oracle:")) {
    spec.kind = PredictorKind::oracle_noise;
    const std::string_view body = text.substr(7);
    const auto c2 = body.rfind(',');
    const auto c1 = c2 == std::string_view::npos || c2 == 0 ? std::string_view::npos : body.rfind(',', c2 - 1);
    if (c1 == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument, "expected oracle:<gt-dir>,<fn_rate>,<fp_rate>");
    }
    spec.gt_dir = std::string(body.substr(0, c1));
    if (spec.gt_dir.empty()) throw Error(ErrorCode::InvalidArgument, "oracle predictor needs a gt directory");
    spec.fn_rate = parse_rate(body.substr(c1 + 1, c2 - c1 - 1), "fn_rate");
    spec.fp_rate = parse_rate(body.substr(c2 + 1), "fp_rate");
  } else if (text.starts_with("extern:")) {
    spec.kind = PredictorKind::external;
    spec.command = std::string(text.substr(7));
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown predictor '" + std::string(text) + "'");
  }
  spec.validate();
  return spec;
}

std::string format_predictor_spec(const PredictorSpec& spec) {
  switch (spec.kind) {
    case PredictorKind::gradient:
      return "gradient";
    case PredictorKind::oracle_noise: {
      auto num = [](double v) {
        char buf[32];
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, end);
      };
      return "oracle:" + spec.gt_dir.string() + "," + num(spec.fn_rate) + "," + num(spec.fp_rate);
    }
    case PredictorKind::external:
      return "extern:" + spec.command;
  }
  return {};
}

ProbabilityMap gradient_predictor(const RgbImage& rgb) {
  const Raster<double> l = luminance(rgb);
  const int w = l.width(), h = l.height();
  Raster<double> mag(l.extent());
  auto at = [&](int x, int y) { return l(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
      mag(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  ProbabilityMap out(l.extent());
  if (mag.empty()) return out;
  std::vector<double> sorted(mag.data().begin(), mag.data().end());
  const auto k = static_cast<std::size_t>(std::floor(0.99 * double(sorted.size() - 1)));
  std::nth_element(sorted.begin(), sorted.begin() + k, sorted.end());
  double scale = sorted[k];
  if (scale <= 0.0) scale = *std::max_element(sorted.begin() + k, sorted.end());
  if (scale <= 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = static_cast<float>(std::clamp(mag.data()[i] / scale, 0.0, 1.0));
  }
  return out;
}

ProbabilityMap oracle_noise_predictor(const BinaryMap& gt, double fn_rate, double fp_rate, Rng& rng,
                                      const std::vector<BoundarySegment>& fp_source) {
  if (!(fn_rate >= 0.0 && fn_rate <= 1.0) || !(fp_rate >= 0.0 && fp_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "oracle rates must lie in [0,1]");
  }
  ProbabilityMap out = to_probability(gt);
  for (const auto& seg : trace_segments(gt)) {
    if (!rng.bernoulli(fn_rate)) continue;
    for (const Pixel p : seg.points) out[p] = 0.0f;
  }
  for (const auto& seg : fp_source) {
    if (!rng.bernoulli(fp_rate)) continue;
    for (const Pixel p : seg.points)
      if (out.extent().contains(p)) out[p] = 1.0f;
  }
  return out;
}

ProbabilityMap predict(const PredictorSpec& spec, const PredictorInput& input) {
  spec.validate();
  input.validate();
  switch (spec.kind) {
    case PredictorKind::gradient:
      if (!input.rgb) throw Error(ErrorCode::MissingInput, "gradient predictor needs an image");
      return gradient_predictor(*input.rgb);
    case PredictorKind::oracle_noise: {
      const BinaryMap gt = load_oracle_gt(spec, input);
      if (gt.extent() != input.extent()) throw Error(ErrorCode::DimensionMismatch, "oracle gt differs in size");
      Rng rng(derive_seed(spec.seed, input.sample_id));
      std::vector<BoundarySegment> fp_source;
      if (input.rgb) fp_source = interact::stage1_fp_source(*input.rgb, gt, metrics::MatchConfig{}.d_max(gt.extent()));
      ProbabilityMap out = oracle_noise_predictor(gt, spec.fn_rate, spec.fp_rate, rng, fp_source);
      // Under a scribble the oracle answers with the truth.
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (input.fnfp.fn.data()[i] || input.fnfp.fp.data()[i]) out.data()[i] = gt.data()[i] ? 1.0f : 0.0f;
      }
      return out;
    }
    case PredictorKind::external: {
      auto base = std::filesystem::temp_directory_path() / "obkit-predict-XXXXXX";
      std::string tmpl = base.string();
      if (::mkdtemp(tmpl.data()) == nullptr) throw Error(ErrorCode::IoError, "cannot create predictor work directory");
      const std::filesystem::path dir = tmpl;
      try {
        ProbabilityMap out = run_external(spec.command, input, dir, spec.timeout);
        std::filesystem::remove_all(dir);
        return out;
      } catch (...) {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
        throw;
      }
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown predictor kind");
}

}  // namespace obkit::predict
