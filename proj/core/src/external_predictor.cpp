#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <nlohmann/json.hpp>
#include <thread>

#include "obkit/log.hpp"
#include "obkit/predictors.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::predict {
namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

BinaryMap to_mask(const BinaryMap& channel) {
  BinaryMap m(channel.extent());
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = channel.data()[i] ? 1 : 0;
  return m;
}

}  // namespace

ProcessResult run_shell(const std::string& script, std::chrono::milliseconds timeout) {
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::ExternalFailure, "fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    ::execl("/bin/sh", "sh", "-c", script.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto wait_step = std::chrono::milliseconds(1);
  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw Error(ErrorCode::ExternalFailure, "waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      return {-1, true};
    }
    std::this_thread::sleep_for(wait_step);
    wait_step = std::min(wait_step * 2, std::chrono::milliseconds(50));
  }
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, false};
}

void write_work_dir(const std::filesystem::path& dir, const PredictorInput& input) {
  input.validate();
  std::filesystem::create_directories(dir);
  const Extent e = input.extent();
  nlohmann::ordered_json manifest{{"width", e.width}, {"height", e.height}};
  if (input.rgb) {
    io::write_rgb(dir / "rgb.png", *input.rgb);
    manifest["rgb"] = "rgb.png";
  }
  io::write_mask(dir / "fn.png", to_mask(input.fnfp.fn));
  io::write_mask(dir / "fp.png", to_mask(input.fnfp.fp));
  io::write_float_map(dir / "prev.obfmap", input.prev);
  manifest["fn"] = "fn.png";
  manifest["fp"] = "fp.png";
  manifest["prev"] = "prev.obfmap";
  manifest["output"] = "out.obfmap";
  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

ProbabilityMap run_external(const std::string& command, const PredictorInput& input, const std::filesystem::path& dir,
                            std::chrono::milliseconds timeout) {
  write_work_dir(dir, input);
  const auto out_path = dir / "out.obfmap";
  std::filesystem::remove(out_path);
  const std::string script = command + " " + shell_quote(dir.string());
  log::debug("external predictor: " + script);
  const ProcessResult r = run_shell(script, timeout);
  if (r.timed_out) {
    throw Error(ErrorCode::ExternalFailure, "predictor timed out after " + std::to_string(timeout.count()) + " ms");
  }
  if (r.exit_code != 0) {
    throw Error(ErrorCode::ExternalFailure, "predictor exited with status " + std::to_string(r.exit_code));
  }
  Raster<float> out;
  try {
    out = io::read_float_map(out_path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ExternalFailure, std::string("unreadable predictor output: ") + e.what());
  }
  if (out.extent() != input.extent()) throw Error(ErrorCode::ExternalFailure, "predictor output has the wrong size");
  for (float& v : out.data()) v = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
  return out;
}

}  // namespace obkit::predict
