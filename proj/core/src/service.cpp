#include <atomic>
#include <nlohmann/json.hpp>
#include <thread>

#include "obkit/log.hpp"
#include "obkit/raster_io.hpp"
#include "obkit/service.hpp"

// After Eigen: resolv.h defines _res.
#include <httplib.h>

namespace obkit::service {
namespace {

using nlohmann::ordered_json;

void reply(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump() + "\n", "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"error", message}});
}

int status_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ExternalFailure:
      return 502;
    case ErrorCode::IoError:
      return 500;
    default:
      return 422;
  }
}

ordered_json round_summary(const std::string& id, const Session& s) {
  return {{"id", id},
          {"round", s.rounds.size()},
          {"ob_pixels", count_on(s.rounds.back().ob)},
          {"ob", "/sessions/" + id + "/ob"},
          {"prediction", "/sessions/" + id + "/prediction"}};
}

struct Job {
  enum class State { pending, done, failed } state = State::pending;
  ordered_json result;
};

}  // namespace

struct Server::Impl {
  ServerConfig cfg;
  SessionStore store;
  httplib::Server http;
  std::mutex jobs_mutex;
  std::map<std::string, std::shared_ptr<Job>> jobs;  // key: "<session>/<token>"
  std::vector<std::jthread> workers;
  std::atomic<std::uint64_t> next_token{1};

  explicit Impl(ServerConfig c) : cfg(std::move(c)), store(cfg.session_dir) { routes(); }

  // Runs fn for a known session, mapping failures onto HTTP codes.
  template <typename Fn>
  void on_session(const std::string& id, httplib::Response& res, Fn&& fn) {
    if (!store.contains(id)) return fail(res, 404, "unknown session " + id);
    try {
      store.with_session(id, [&](Session& s) { fn(s); });
    } catch (const std::out_of_range&) {
      fail(res, 404, "unknown session " + id);
    } catch (const Error& e) {
      fail(res, status_for(e), e.what());
    }
  }

  void create(const httplib::Request& req, httplib::Response& res) {
    if (!req.has_file("image")) return fail(res, 400, "multipart field 'image' is required");
    const std::string& image = req.get_file_value("image").content;
    RgbImage rgb;
    try {
      rgb = io::decode_rgb({reinterpret_cast<const std::uint8_t*>(image.data()), image.size()});
    } catch (const Error& e) {
      return fail(res, 400, e.what());
    }
    predict::PredictorSpec spec;
    std::optional<BinaryMap> gt;
    try {
      const std::string text = req.has_file("predictor") ? req.get_file_value("predictor").content : cfg.default_predictor;
      spec = predict::parse_predictor_spec(text);
      spec.timeout = cfg.predictor_timeout;
      if (req.has_file("gt")) {
        const std::string& g = req.get_file_value("gt").content;
        BinaryMap m = io::decode_mask({reinterpret_cast<const std::uint8_t*>(g.data()), g.size()});
        gt = is_thin(m) ? std::move(m) : morph_thin(m);
      }
    } catch (const Error& e) {
      return fail(res, 422, e.what());
    }
    try {
      const std::string id = store.create(std::move(rgb), spec, std::move(gt), cfg.threshold);
      log::info("created session " + id);
      reply(res, 201, {{"id", id}, {"prediction", "/sessions/" + id + "/prediction"}});
    } catch (const Error& e) {
      fail(res, status_for(e), e.what());
    }
  }

  void scribbles(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!store.contains(id)) return fail(res, 404, "unknown session " + id);
    interact::ScribbleDocument doc;
    try {
      doc = interact::parse_scribble_document(req.body);
    } catch (const Error& e) {
      return fail(res, 422, e.what());
    }
    if (req.get_param_value("async") == "1") {
      const std::string token = std::to_string(next_token++);
      auto job = std::make_shared<Job>();
      {
        std::lock_guard lock(jobs_mutex);
        jobs[id + "/" + token] = job;
        workers.emplace_back([this, id, doc, job] {
          httplib::Response inner;
          on_session(id, inner, [&](Session& s) {
            store.submit(s, doc);
            inner.status = 200;
            inner.body = round_summary(id, s).dump();
          });
          std::lock_guard lock(jobs_mutex);
          job->result = ordered_json::parse(inner.body);
          job->state = inner.status == 200 ? Job::State::done : Job::State::failed;
          if (job->state == Job::State::failed) job->result["status_code"] = inner.status;
        });
      }
      return reply(res, 202, {{"token", token}, {"poll", "/sessions/" + id + "/jobs/" + token}});
    }
    on_session(id, res, [&](Session& s) {
      store.submit(s, doc);
      reply(res, 200, round_summary(id, s));
    });
  }

  void job_status(const httplib::Request& req, httplib::Response& res) {
    const std::string key = std::string(req.matches[1]) + "/" + std::string(req.matches[2]);
    std::lock_guard lock(jobs_mutex);
    const auto it = jobs.find(key);
    if (it == jobs.end()) return fail(res, 404, "unknown job");
    const Job& job = *it->second;
    switch (job.state) {
      case Job::State::pending:
        return reply(res, 202, {{"status", "pending"}});
      case Job::State::done: {
        ordered_json body{{"status", "done"}};
        body.update(job.result);
        return reply(res, 200, body);
      }
      case Job::State::failed: {
        ordered_json body{{"status", "failed"}};
        body.update(job.result);
        return reply(res, 200, body);
      }
    }
  }

  void routes() {
    http.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"status", "ok"}, {"sessions", store.ids().size()}});
    });
    http.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { create(req, res); });
    http.Get(R"(/sessions/([0-9a-f]+)/prediction)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string format = req.has_param("format") ? req.get_param_value("format") : "obfmap";
      if (format != "obfmap" && format != "png") return fail(res, 400, "format must be obfmap or png");
      on_session(req.matches[1], res, [&](const Session& s) {
        if (format == "png") {
          const auto bytes = io::encode_mask(s.current_ob());
          res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        } else {
          const auto bytes = io::encode_float_map(s.prev());
          res.set_content(std::string(bytes.begin(), bytes.end()), "application/octet-stream");
        }
        res.status = 200;
      });
    });
    http.Get(R"(/sessions/([0-9a-f]+)/ob)", [this](const httplib::Request& req, httplib::Response& res) {
      on_session(req.matches[1], res, [&](const Session& s) {
        const auto bytes = io::encode_mask(s.current_ob());
        res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        res.status = 200;
      });
    });
    http.Post(R"(/sessions/([0-9a-f]+)/scribbles)",
              [this](const httplib::Request& req, httplib::Response& res) { scribbles(req, res); });
    http.Get(R"(/sessions/([0-9a-f]+)/jobs/([0-9]+))",
             [this](const httplib::Request& req, httplib::Response& res) { job_status(req, res); });
    http.Post(R"(/sessions/([0-9a-f]+)/export)", [this](const httplib::Request& req, httplib::Response& res) {
      on_session(req.matches[1], res, [&](const Session& s) {
        if (s.rounds.empty()) return fail(res, 409, "session has no rounds yet");
        const auto bytes = SessionStore::export_archive(s);
        res.set_content(std::string(bytes.begin(), bytes.end()), "application/x-tar");
        res.set_header("Content-Disposition", "attachment; filename=\"" + s.id + ".tar\"");
        res.status = 200;
      });
    });
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        fail(res, 500, e.what());
      } catch (...) {
        fail(res, 500, "internal error");
      }
    });
  }
};

Server::Server(ServerConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

Server::~Server() {
  stop();
  std::vector<std::jthread> workers;
  {
    std::lock_guard lock(impl_->jobs_mutex);
    workers.swap(impl_->workers);
  }
  workers.clear();
}

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->http.bind_to_any_port(host);
    if (p < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
    return p;
  }
  if (!impl_->http.bind_to_port(host, port)) {
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

SessionStore& Server::store() { return impl_->store; }

}  // namespace obkit::service
