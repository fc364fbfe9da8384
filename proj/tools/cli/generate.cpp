#include <ostream>

#include "cli/commands.hpp"
#include "obkit/log.hpp"
#include "obkit/obgen.hpp"
#include "obkit/parallel.hpp"
#include "obkit/scene_io.hpp"

namespace obkit::cli {

void add_generate(CLI::App& app, GenerateOptions& o) {
  auto* cmd = app.add_subcommand("generate", "Render occlusion-boundary ground truth from mesh scenes");
  cmd->add_option("--scene", o.scenes, "Scene description file (repeatable)")->required();
  cmd->add_option("--out", o.out, "Output benchmark directory")->required();
  cmd->add_option("--supersample", o.supersample, "Rays per pixel side, 1 or 2 (overrides the scene)")
      ->check(CLI::Range(1, 2));
  cmd->add_option("--gap-factor", o.gap_factor, "Depth gaps up to this many footprints are continuous")
      ->capture_default_str();
  cmd->add_option("--walk-limit", o.walk_limit, "Triangles in the adjacency walk (0 disables)")->capture_default_str();
  cmd->add_option("--contact-tolerance", o.contact_tolerance, "Contact distance in footprints")->capture_default_str();
  cmd->add_option("--name", o.name, "Benchmark name")->capture_default_str();
}

void run_generate(const GenerateOptions& o, const Context& ctx) {
  std::vector<gen::ExportSample> samples(o.scenes.size());
  const unsigned outer = std::min<unsigned>(ctx.globals.jobs, static_cast<unsigned>(o.scenes.size()));
  const unsigned inner = std::max(1u, ctx.globals.jobs / std::max(1u, outer));
  parallel_for(o.scenes.size(), outer, [&](std::size_t i) {
    const geom::LoadedScene scene = geom::load_scene(o.scenes[i]);
    gen::GenConfig cfg;
    cfg.gap_factor = o.gap_factor;
    cfg.adjacency_walk_limit = o.walk_limit;
    cfg.contact_tolerance = o.contact_tolerance;
    cfg.supersample = o.supersample.value_or(scene.supersample);
    cfg.jobs = inner;
    const geom::Bvh bvh(scene.geometry.mesh);
    gen::GeneratedSample g = gen::generate_ob(bvh, scene.camera, cfg);
    gen::ExportSample& s = samples[i];
    s.name = o.scenes[i].stem().string();
    s.rgb = gen::shade(g.gbuffer, scene.camera);
    s.depth = g.gbuffer.depth_map();
    s.ob = std::move(g.ob);
    log::info(s.name + ": " + std::to_string(count_on(s.ob.boundary)) + " boundary pixels");
  });
  const auto manifest = gen::export_benchmark(samples, o.out, o.name);
  ctx.out << "wrote " << manifest.samples.size() << " samples to " << (o.out / "manifest").string() << "\n";
}

}  // namespace obkit::cli
