#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "obkit/raster.hpp"

namespace obkit::cli {

struct Globals {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string log_level = "info";
};

struct Context {
  const Globals& globals;
  std::ostream& out;
};

struct GenerateOptions {
  std::vector<std::filesystem::path> scenes;
  std::filesystem::path out;
  std::optional<int> supersample;
  double gap_factor = 3.0;
  int walk_limit = 8;
  double contact_tolerance = 0.5;
  std::string name = "obkit";
};

struct EvaluateOptions {
  std::filesystem::path pred;
  std::filesystem::path gt;
  double max_dist = 0.0075;
  int thresholds = 99;
  std::string solver = "bucketed";
  std::filesystem::path out;
  std::optional<std::filesystem::path> segments_summary;
  bool no_nms = false;
};

struct SimulateOptions {
  std::filesystem::path images;
  std::filesystem::path gt;
  std::string predictor;
  double radius = 12.0;
  std::size_t min_seg_len = 30;
  std::optional<std::size_t> max_segs;
  std::optional<int> progressive;
  int max_perturb = 3;
  double length_perturb = 0.2;
  double threshold = 0.7;
  bool binary = false;
  std::optional<double> match_tolerance;
  double predictor_timeout = 300.0;
  std::filesystem::path out;
};

struct RefineOptions {
  std::filesystem::path image;
  std::optional<std::filesystem::path> prev;
  std::filesystem::path scribbles;
  std::string predictor = "gradient";
  std::optional<std::filesystem::path> gt;
  double threshold = 0.7;
  bool binary = false;
  double predictor_timeout = 300.0;
  std::filesystem::path out;
  std::optional<std::filesystem::path> ob_out;
};

struct ServeOptions {
  std::filesystem::path dir = "sessions";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string predictor = "gradient";
  double threshold = 0.7;
  bool binary = false;
  double predictor_timeout = 300.0;
};

void add_generate(CLI::App& app, GenerateOptions& o);
void add_evaluate(CLI::App& app, EvaluateOptions& o);
void add_simulate(CLI::App& app, SimulateOptions& o);
void add_refine(CLI::App& app, RefineOptions& o);
void add_serve(CLI::App& app, ServeOptions& o);

void run_generate(const GenerateOptions& o, const Context& ctx);
void run_evaluate(const EvaluateOptions& o, const Context& ctx);
void run_simulate(const SimulateOptions& o, const Context& ctx);
void run_refine(const RefineOptions& o, const Context& ctx);
void run_serve(const ServeOptions& o, const Context& ctx);

// Files in `dir` with one of the given extensions, keyed by stem.
std::map<std::string, std::filesystem::path> files_by_stem(const std::filesystem::path& dir,
                                                          const std::vector<std::string>& extensions);
// A mask (.png) or float map (.obfmap) as a probability map.
ProbabilityMap read_prediction(const std::filesystem::path& path);
// Reads a gt mask and thins it when needed.
BinaryMap read_gt(const std::filesystem::path& path);

}  // namespace obkit::cli
