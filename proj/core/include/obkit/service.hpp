#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obkit/interaction.hpp"
#include "obkit/predictors.hpp"
#include "obkit/raster.hpp"

namespace obkit::service {

struct TarEntry {
  std::string name;
  std::vector<std::uint8_t> bytes;
};

/// ustar archive; every entry has mode 0644, owner 0 and mtime 0.
std::vector<std::uint8_t> make_tar(const std::vector<TarEntry>& entries);
std::vector<TarEntry> read_tar(std::span<const std::uint8_t> archive);

struct Round {
  interact::ScribbleDocument scribbles;
  interact::FnFpMap fnfp;
  ProbabilityMap output;  // post-processed map after the round
  BinaryMap ob;           // thin boundary of `output`
};

struct Session {
  std::string id;
  RgbImage rgb;
  std::optional<BinaryMap> gt;
  predict::PredictorSpec predictor;
  ThresholdConfig threshold;
  ProbabilityMap initial;  // post-processed first prediction
  std::vector<Round> rounds;

  const ProbabilityMap& prev() const { return rounds.empty() ? initial : rounds.back().output; }
  BinaryMap current_ob() const;
};

/// Sessions kept as one directory each:
///   rgb.png, gt.png (optional), initial.obfmap
///   rounds/<k>/{scribbles.json, fn.png, fp.png, output.obfmap, ob.png}
///   meta.json  written last; its round count is the commit point
/// On open, directories without meta.json and rounds past the committed
/// count are discarded.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Runs the predictor on the fresh session and persists it.
  std::string create(RgbImage rgb, predict::PredictorSpec predictor, std::optional<BinaryMap> gt,
                     const ThresholdConfig& threshold);

  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;

  /// Calls fn with exclusive access to the session. Throws std::out_of_range
  /// for an unknown id.
  void with_session(const std::string& id, const std::function<void(Session&)>& fn);
  void read_session(const std::string& id, const std::function<void(const Session&)>& fn);

  /// Appends one refinement round and persists it before returning.
  const Round& submit(Session& s, const interact::ScribbleDocument& doc);

  /// mask.png, segments.json, session_log.json. Throws std::logic_error
  /// when the session has no rounds.
  static std::vector<std::uint8_t> export_archive(const Session& s);

 private:
  struct Slot {
    std::mutex mutex;
    Session session;
  };
  std::shared_ptr<Slot> slot(const std::string& id) const;
  void persist_new(const Session& s);
  void persist_round(const Session& s);
  void write_meta(const Session& s);
  Session load(const std::filesystem::path& dir);

  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

struct ServerConfig {
  std::filesystem::path session_dir;
  std::string default_predictor = "gradient";
  ThresholdConfig threshold;
  std::chrono::milliseconds predictor_timeout{std::chrono::seconds(300)};
};

/// HTTP front end:
///   POST /sessions                       multipart: image, predictor?, gt?
///   GET  /sessions/{id}/prediction       ?format=obfmap (default) | png
///   POST /sessions/{id}/scribbles        scribble document; ?async=1 polls
///   GET  /sessions/{id}/jobs/{token}
///   GET  /sessions/{id}/ob
///   POST /sessions/{id}/export
///   GET  /healthz
class Server {
 public:
  explicit Server(ServerConfig cfg);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and returns the port; port 0 picks a free one.
  int bind(const std::string& host, int port);
  /// Serves until stop().
  void run();
  void stop();

  SessionStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace obkit::service
