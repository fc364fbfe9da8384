#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include "cli/commands.hpp"
#include "obkit/dataset.hpp"
#include "obkit/metrics.hpp"
#include "obkit/parallel.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::cli {
namespace {

struct GtSource {
  std::vector<std::string> ids;
  std::function<BinaryMap(std::size_t)> load;
};

GtSource gt_source(const std::filesystem::path& gt) {
  GtSource src;
  if (std::filesystem::is_regular_file(gt)) {
    auto bench = std::make_shared<dataset::Benchmark>(dataset::load_benchmark(gt));
    for (const auto& s : bench->manifest().samples) src.ids.push_back(s.id);
    src.load = [bench](std::size_t i) { return bench->load_gt(i); };
    return src;
  }
  auto files = std::make_shared<std::vector<std::filesystem::path>>();
  for (const auto& [id, path] : files_by_stem(gt, {".png"})) {
    src.ids.push_back(id);
    files->push_back(path);
  }
  src.load = [files](std::size_t i) { return read_gt((*files)[i]); };
  return src;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

metrics::AvgFnFp read_summary(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + ": empty summary");
  const auto header = split(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::ParseError, path.string() + ": no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t fn = column("fn_pixels"), fp = column("fp_pixels"), on = column("gt_pixels"),
                    off = column("gt_off_pixels");
  std::vector<metrics::ResidualCounts> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw Error(ErrorCode::ParseError, path.string() + ": ragged row");
    try {
      rows.push_back({std::stoull(cells[fn]), std::stoull(cells[fp]), std::stoull(cells[on]), std::stoull(cells[off])});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, path.string() + ": bad count in '" + line + "'");
    }
  }
  return metrics::avg_fn_fp(rows);
}

metrics::MatchSolver parse_solver(const std::string& s) {
  if (s == "bucketed") return metrics::MatchSolver::bucketed;
  if (s == "greedy") return metrics::MatchSolver::greedy;
  return metrics::MatchSolver::min_cost;
}

}  // namespace

void add_evaluate(CLI::App& app, EvaluateOptions& o) {
  auto* cmd = app.add_subcommand("evaluate", "Score predictions against ground truth (ODS, OIS, AP)");
  cmd->add_option("--pred", o.pred, "Directory of <id>.obfmap or <id>.png predictions")->required();
  cmd->add_option("--gt", o.gt, "Directory of <id>.png masks, or a benchmark manifest")->required();
  cmd->add_option("--max-dist", o.max_dist, "Match distance as a fraction of the image diagonal")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--thresholds", o.thresholds, "Number of uniform thresholds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--solver", o.solver, "Correspondence solver")
      ->check(CLI::IsMember({"bucketed", "greedy", "min_cost"}))
      ->capture_default_str();
  cmd->add_option("--segments-summary", o.segments_summary, "summary.csv from simulate, for avg_fn and avg_fp");
  cmd->add_flag("--no-nms", o.no_nms, "Do not thin float-map predictions before the sweep");
  cmd->add_option("--out", o.out, "Report file (JSON)")->required();
}

void run_evaluate(const EvaluateOptions& o, const Context& ctx) {
  const GtSource gt = gt_source(o.gt);
  const auto preds = files_by_stem(o.pred, {".obfmap", ".png"});
  if (gt.ids.empty()) throw Error(ErrorCode::EmptyDataset, "no gt masks in " + o.gt.string());
  std::vector<std::filesystem::path> pred_paths;
  for (const auto& id : gt.ids) {
    const auto it = preds.find(id);
    if (it == preds.end()) throw Error(ErrorCode::MissingFile, (o.pred / (id + ".obfmap")).string());
    pred_paths.push_back(it->second);
  }
  metrics::MatchConfig cfg;
  cfg.d_max_fraction = o.max_dist;
  cfg.thresholds = o.thresholds;
  cfg.solver = parse_solver(o.solver);
  std::vector<metrics::PrCurve> curves(gt.ids.size());
  parallel_for(gt.ids.size(), ctx.globals.jobs, [&](std::size_t i) {
    const BinaryMap g = gt.load(i);
    ProbabilityMap p = read_prediction(pred_paths[i]);
    if (p.extent() != g.extent()) {
      throw Error(ErrorCode::DimensionMismatch, pred_paths[i].string() + " differs from its gt in size");
    }
    if (pred_paths[i].extension() == ".obfmap" && !o.no_nms) p = nms_thin(p);
    curves[i] = metrics::pr_curve(p, g, cfg);
  });
  metrics::EvalReport report = metrics::summarize(std::move(curves));
  nlohmann::ordered_json j;
  j["images"] = gt.ids.size();
  j["ods"] = report.ods;
  j["ods_threshold"] = report.ods_threshold;
  j["ois"] = report.ois;
  j["ap"] = report.ap;
  if (o.segments_summary) {
    const auto avg = read_summary(*o.segments_summary);
    j["avg_fn"] = avg.avg_fn;
    j["avg_fp"] = avg.avg_fp;
    j["display"] = {{"avg_fn_x1e2", avg.avg_fn * 1e2}, {"avg_fp_x1e3", avg.avg_fp * 1e3}, {"avg_fp_x1e4", avg.avg_fp * 1e4}};
  }
  j["config"] = {{"max_dist", o.max_dist}, {"thresholds", o.thresholds}, {"solver", o.solver}, {"nms", !o.no_nms}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < gt.ids.size(); ++i) {
    const metrics::PrPoint& best = report.curves[i][report.best_index[i]];
    rows.push_back({{"id", gt.ids[i]},
                    {"best_threshold", best.threshold},
                    {"f", best.f()},
                    {"precision", best.precision},
                    {"recall", best.recall},
                    {"tp", best.counts.tp},
                    {"fp", best.counts.fp},
                    {"fn", best.counts.fn}});
  }
  j["per_image"] = std::move(rows);
  io::write_text(o.out, j.dump(2) + "\n");
  ctx.out << "ods " << report.ods << " ois " << report.ois << " ap " << report.ap << " over " << gt.ids.size()
          << " images\n";
}

}  // namespace obkit::cli
