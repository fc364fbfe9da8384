#include "cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "cli/commands.hpp"
#include "obkit/error.hpp"
#include "obkit/log.hpp"

namespace obkit::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Occlusion-boundary toolkit", "obkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off (OBKIT_LOG overrides)")
      ->capture_default_str();

  GenerateOptions gen;
  EvaluateOptions eval;
  SimulateOptions sim;
  RefineOptions ref;
  ServeOptions serve;
  add_generate(app, gen);
  add_evaluate(app, eval);
  add_simulate(app, sim);
  add_refine(app, ref);
  add_serve(app, serve);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "obkit: " << e.what() << "\n";
    return 1;
  }

  try {
    const char* env = std::getenv("OBKIT_LOG");
    log::set_level(log::parse_level(env && *env ? env : g.log_level));
    const Context ctx{g, out};
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "generate") run_generate(gen, ctx);
    if (cmd == "evaluate") run_evaluate(eval, ctx);
    if (cmd == "simulate") run_simulate(sim, ctx);
    if (cmd == "refine") run_refine(ref, ctx);
    if (cmd == "serve") run_serve(serve, ctx);
    return 0;
  } catch (const Error& e) {
    err << "obkit: " << e.what() << "\n";
    return is_input_error(e.code()) ? 1 : 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "obkit: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "obkit: internal error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace obkit::cli
