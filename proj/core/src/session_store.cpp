#include <nlohmann/json.hpp>

#include <random>
#include <stdexcept>

#include "obkit/log.hpp"
#include "obkit/raster_io.hpp"
#include "obkit/service.hpp"

namespace obkit::service {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string random_id() {
  static std::mutex m;
  static std::random_device rd;
  std::lock_guard lock(m);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t v = rd();
    for (int k = 0; k < 8; ++k, v >>= 4) id.push_back(kHex[v & 15]);
  }
  return id;
}

bool looks_like_id(const std::string& s) {
  return s.size() == 32 && s.find_first_not_of("0123456789abcdef") == std::string::npos;
}

fs::path round_dir(const fs::path& session_dir, std::size_t k) { return session_dir / "rounds" / std::to_string(k); }

ordered_json segments_json(const BinaryMap& ob) {
  ordered_json segs = ordered_json::array();
  for (const auto& s : trace_segments(ob)) {
    ordered_json pts = ordered_json::array();
    for (const Pixel p : s.points) pts.push_back({p.x, p.y});
    segs.push_back(std::move(pts));
  }
  return segs;
}

std::vector<std::uint8_t> to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

BinaryMap Session::current_ob() const { return interact::boundary_of(prev(), threshold); }

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (!looks_like_id(name)) continue;
    if (!fs::exists(entry.path() / "meta.json")) {
      log::warn("discarding incomplete session " + name);
      fs::remove_all(entry.path());
      continue;
    }
    try {
      auto s = std::make_shared<Slot>();
      s->session = load(entry.path());
      sessions_.emplace(name, std::move(s));
    } catch (const std::exception& e) {
      log::warn("cannot restore session " + name + ": " + e.what());
    }
  }
  log::info("restored " + std::to_string(sessions_.size()) + " sessions from " + root_.string());
}

std::string SessionStore::create(RgbImage rgb, predict::PredictorSpec predictor, std::optional<BinaryMap> gt,
                                 const ThresholdConfig& threshold) {
  if (gt) require_same_extent(rgb, *gt, "gt differs from the image in size");
  Session s;
  {
    std::lock_guard lock(mutex_);
    do {
      s.id = random_id();
    } while (sessions_.contains(s.id) || fs::exists(root_ / s.id));
  }
  s.predictor = std::move(predictor);
  s.threshold = threshold;
  s.gt = std::move(gt);
  predict::PredictorInput input = predict::PredictorInput::initial(std::move(rgb), s.id);
  input.gt = s.gt;
  s.initial = interact::postprocess(predict::predict(s.predictor, input), s.threshold);
  s.rgb = std::move(*input.rgb);
  persist_new(s);
  auto slot_ptr = std::make_shared<Slot>();
  slot_ptr->session = std::move(s);
  const std::string id = slot_ptr->session.id;
  std::lock_guard lock(mutex_);
  sessions_.emplace(id, std::move(slot_ptr));
  return id;
}

bool SessionStore::contains(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return sessions_.contains(id);
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

std::shared_ptr<SessionStore::Slot> SessionStore::slot(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw std::out_of_range("unknown session " + id);
  return it->second;
}

void SessionStore::with_session(const std::string& id, const std::function<void(Session&)>& fn) {
  const auto s = slot(id);
  std::lock_guard lock(s->mutex);
  fn(s->session);
}

void SessionStore::read_session(const std::string& id, const std::function<void(const Session&)>& fn) {
  const auto s = slot(id);
  std::lock_guard lock(s->mutex);
  fn(s->session);
}

const Round& SessionStore::submit(Session& s, const interact::ScribbleDocument& doc) {
  Round r;
  r.scribbles = doc;
  r.fnfp = interact::rasterize(doc, s.rgb.extent());
  predict::PredictorInput input;
  input.rgb = s.rgb;
  input.fnfp = r.fnfp;
  input.prev = s.prev();
  input.sample_id = s.id;
  input.gt = s.gt;
  const ProbabilityMap raw = predict::predict(s.predictor, input);
  r.output = interact::refine_round(s.prev(), raw, r.fnfp, s.threshold);
  r.ob = interact::boundary_of(r.output, s.threshold);
  s.rounds.push_back(std::move(r));
  try {
    persist_round(s);
  } catch (...) {
    s.rounds.pop_back();
    throw;
  }
  return s.rounds.back();
}

void SessionStore::persist_new(const Session& s) {
  const fs::path dir = root_ / s.id;
  fs::create_directories(dir);
  io::write_rgb(dir / "rgb.png", s.rgb);
  if (s.gt) io::write_mask(dir / "gt.png", *s.gt);
  io::write_float_map(dir / "initial.obfmap", s.initial);
  write_meta(s);
}

void SessionStore::persist_round(const Session& s) {
  const std::size_t k = s.rounds.size();
  const Round& r = s.rounds.back();
  const fs::path dir = round_dir(root_ / s.id, k);
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::write_text(dir / "scribbles.json", interact::format_scribble_document(r.scribbles));
  io::write_mask(dir / "fn.png", r.fnfp.fn);
  io::write_mask(dir / "fp.png", r.fnfp.fp);
  io::write_float_map(dir / "output.obfmap", r.output);
  io::write_mask(dir / "ob.png", r.ob);
  write_meta(s);
}

void SessionStore::write_meta(const Session& s) {
  ordered_json meta{
      {"id", s.id},
      {"predictor", predict::format_predictor_spec(s.predictor)},
      {"seed", s.predictor.seed},
      {"timeout_ms", s.predictor.timeout.count()},
      {"threshold", s.threshold.threshold},
      {"mode", s.threshold.mode == ThresholdMode::binary ? "binary" : "non_binary"},
      {"has_gt", s.gt.has_value()},
      {"rounds", s.rounds.size()},
  };
  io::write_text(root_ / s.id / "meta.json", meta.dump(2) + "\n");
}

Session SessionStore::load(const fs::path& dir) {
  const auto meta = nlohmann::json::parse(io::read_text(dir / "meta.json"));
  Session s;
  s.id = meta.at("id").get<std::string>();
  s.predictor = predict::parse_predictor_spec(meta.at("predictor").get<std::string>());
  s.predictor.seed = meta.at("seed").get<std::uint64_t>();
  s.predictor.timeout = std::chrono::milliseconds(meta.at("timeout_ms").get<std::int64_t>());
  s.threshold.threshold = meta.at("threshold").get<double>();
  s.threshold.mode = meta.at("mode").get<std::string>() == "binary" ? ThresholdMode::binary : ThresholdMode::non_binary;
  s.rgb = io::read_rgb(dir / "rgb.png");
  if (meta.at("has_gt").get<bool>()) s.gt = io::read_mask(dir / "gt.png");
  s.initial = io::read_float_map(dir / "initial.obfmap");
  const auto committed = meta.at("rounds").get<std::size_t>();
  for (std::size_t k = 1; k <= committed; ++k) {
    const fs::path rd = round_dir(dir, k);
    Round r;
    r.scribbles = interact::parse_scribble_document(io::read_text(rd / "scribbles.json"));
    r.fnfp = interact::FnFpMap(io::read_mask(rd / "fn.png"), io::read_mask(rd / "fp.png"));
    r.output = io::read_float_map(rd / "output.obfmap");
    r.ob = io::read_mask(rd / "ob.png");
    s.rounds.push_back(std::move(r));
  }
  // A round written after the last committed meta.json never happened.
  if (fs::exists(dir / "rounds")) {
    for (const auto& e : fs::directory_iterator(dir / "rounds")) {
      const std::string name = e.path().filename().string();
      if (name.find_first_not_of("0123456789") != std::string::npos || std::stoul(name) > committed) {
        fs::remove_all(e.path());
      }
    }
  }
  return s;
}

std::vector<std::uint8_t> SessionStore::export_archive(const Session& s) {
  if (s.rounds.empty()) throw std::logic_error("session has no rounds");
  const BinaryMap ob = s.current_ob();
  ordered_json rounds = ordered_json::array();
  for (std::size_t k = 0; k < s.rounds.size(); ++k) {
    const Round& r = s.rounds[k];
    rounds.push_back({{"round", k + 1},
                      {"scribbles", ordered_json::parse(interact::format_scribble_document(r.scribbles))},
                      {"fn_pixels", count_on(r.fnfp.fn)},
                      {"fp_pixels", count_on(r.fnfp.fp)},
                      {"ob_pixels", count_on(r.ob)}});
  }
  const ordered_json log_doc{{"id", s.id},
                             {"width", s.rgb.width()},
                             {"height", s.rgb.height()},
                             {"predictor", predict::format_predictor_spec(s.predictor)},
                             {"threshold", s.threshold.threshold},
                             {"mode", s.threshold.mode == ThresholdMode::binary ? "binary" : "non_binary"},
                             {"initial_ob_pixels", count_on(interact::boundary_of(s.initial, s.threshold))},
                             {"rounds", rounds}};
  const ordered_json seg_doc{{"width", s.rgb.width()}, {"height", s.rgb.height()}, {"segments", segments_json(ob)}};
  return make_tar({{"mask.png", io::encode_mask(ob)},
                   {"segments.json", to_bytes(seg_doc.dump(2) + "\n")},
                   {"session_log.json", to_bytes(log_doc.dump(2) + "\n")}});
}

}  // namespace obkit::service
