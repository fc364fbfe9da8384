#include <pthread.h>
#include <signal.h>

#include <ostream>
#include <thread>

#include "cli/commands.hpp"
#include "obkit/log.hpp"
#include "obkit/predictors.hpp"
#include "obkit/service.hpp"

namespace obkit::cli {

void add_serve(CLI::App& app, ServeOptions& o) {
  auto* cmd = app.add_subcommand("serve", "Run the annotation service");
  cmd->add_option("--dir", o.dir, "Session directory")->capture_default_str();
  cmd->add_option("--host", o.host, "Listen address")->capture_default_str();
  cmd->add_option("--port", o.port, "Listen port (0 picks one)")->check(CLI::Range(0, 65535))->capture_default_str();
  cmd->add_option("--predictor", o.predictor, "Default predictor spec")->capture_default_str();
  cmd->add_option("--threshold", o.threshold, "Threshold T")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_flag("--binary", o.binary, "Binary previous output");
  cmd->add_option("--predictor-timeout", o.predictor_timeout, "External predictor timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void run_serve(const ServeOptions& o, const Context& ctx) {
  predict::parse_predictor_spec(o.predictor);
  service::ServerConfig cfg;
  cfg.session_dir = o.dir;
  cfg.default_predictor = o.predictor;
  cfg.threshold = {o.threshold, o.binary ? ThresholdMode::binary : ThresholdMode::non_binary};
  cfg.predictor_timeout = std::chrono::milliseconds(static_cast<std::int64_t>(o.predictor_timeout * 1000.0));

  // Block the stop signals here so every server thread inherits the mask;
  // one thread waits for them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  service::Server server(cfg);
  const int port = server.bind(o.host, o.port);
  ctx.out << "listening on http://" << o.host << ":" << port << "\n" << std::flush;
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    log::info("stopping on signal " + std::to_string(sig));
    server.stop();
  });
  server.run();
  // run() can also end without a signal; wake the waiter.
  if (waiter.joinable()) pthread_kill(waiter.native_handle(), SIGTERM);
}

}  // namespace obkit::cli
