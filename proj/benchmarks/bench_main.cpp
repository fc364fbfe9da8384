#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "obkit/geometry.hpp"
#include "obkit/interaction.hpp"
#include "obkit/metrics.hpp"
#include "obkit/obgen.hpp"
#include "obkit/rng.hpp"

namespace {

using namespace obkit;
using geom::Vec3;

// A wavy floor with a row of boxes standing on it.
geom::SceneMesh make_scene(int tess) {
  std::vector<Vec3> v;
  std::vector<geom::TriangleIndices> t;
  std::vector<int> ids;
  const auto base = [&] { return static_cast<std::uint32_t>(v.size()); };

  const std::uint32_t f0 = base();
  for (int j = 0; j <= tess; ++j)
    for (int i = 0; i <= tess; ++i) {
      const double x = -4.0 + 8.0 * i / tess, z = 2.0 + 10.0 * j / tess;
      v.emplace_back(x, 1.0 + 0.1 * std::sin(2.0 * x) * std::cos(z), z);
    }
  for (int j = 0; j < tess; ++j)
    for (int i = 0; i < tess; ++i) {
      const std::uint32_t a = f0 + j * (tess + 1) + i, b = a + 1, c = a + tess + 1, d = c + 1;
      t.push_back({a, b, d});
      t.push_back({a, d, c});
      ids.insert(ids.end(), 2, 0);
    }

  for (int k = 0; k < 6; ++k) {
    const Vec3 c(-3.0 + 1.2 * k, 0.4, 4.0 + 1.1 * k);
    const std::uint32_t o = base();
    for (int n = 0; n < 8; ++n)
      v.push_back(c + Vec3(n & 1 ? 0.4 : -0.4, n & 2 ? 0.6 : -0.6, n & 4 ? 0.4 : -0.4));
    static constexpr std::array<std::array<std::uint32_t, 4>, 6> faces{
        {{0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1}, {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}}};
    for (const auto& f : faces) {
      t.push_back({o + f[0], o + f[1], o + f[2]});
      t.push_back({o + f[0], o + f[2], o + f[3]});
      ids.insert(ids.end(), 2, k + 1);
    }
  }
  return geom::SceneMesh::build(std::move(v), std::move(t), std::move(ids));
}

geom::PinholeCamera make_camera(int w, int h) {
  geom::PinholeCamera cam;
  cam.width = w;
  cam.height = h;
  cam.fx = cam.fy = 0.9 * w;
  cam.cx = w / 2.0;
  cam.cy = h / 2.0;
  return cam;
}

// Thin map of random circles.
BinaryMap circles(Extent e, std::uint64_t seed) {
  Rng rng(seed);
  BinaryMap m(e);
  for (int k = 0; k < 12; ++k) {
    const double cx = rng.uniform01() * e.width, cy = rng.uniform01() * e.height;
    const double r = 10 + rng.uniform01() * e.width / 6.0;
    Pixel prev{-1, -1};
    for (int s = 0; s <= 256; ++s) {
      const double a = 2 * std::numbers::pi * s / 256;
      const Pixel p{static_cast<int>(cx + r * std::cos(a)), static_cast<int>(cy + r * std::sin(a))};
      if (prev.x >= 0)
        for (const Pixel q : interact::line_pixels(prev, p))
          if (q.x >= 0 && q.y >= 0 && q.x < e.width && q.y < e.height) m(q.x, q.y) = 1;
      prev = p;
    }
  }
  return morph_thin(m);
}

void BM_BvhBuild(benchmark::State& state) {
  const auto mesh = make_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(geom::Bvh(mesh).node_count());
  state.counters["triangles"] = static_cast<double>(mesh.triangle_count());
}
BENCHMARK(BM_BvhBuild)->Arg(32)->Arg(128);

void BM_RenderGBuffer(benchmark::State& state) {
  const auto mesh = make_scene(64);
  const geom::Bvh bvh(mesh);
  const auto cam = make_camera(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 3 / 4);
  for (auto _ : state) benchmark::DoNotOptimize(geom::render_gbuffer(bvh, cam));
  state.SetItemsProcessed(state.iterations() * cam.width * cam.height);
}
BENCHMARK(BM_RenderGBuffer)->Arg(160)->Arg(320)->Unit(benchmark::kMillisecond);

void BM_GenerateOb(benchmark::State& state) {
  const auto mesh = make_scene(64);
  const geom::Bvh bvh(mesh);
  const auto cam = make_camera(320, 240);
  for (auto _ : state) benchmark::DoNotOptimize(gen::generate_ob(bvh, cam, gen::GenConfig{}));
}
BENCHMARK(BM_GenerateOb)->Unit(benchmark::kMillisecond);

void BM_Match(benchmark::State& state) {
  const Extent e{320, 240};
  const auto pred = circles(e, 1), gt = circles(e, 2);
  const auto solver = static_cast<metrics::MatchSolver>(state.range(0));
  const double d = metrics::MatchConfig{}.d_max(e);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::match_boundaries(pred, gt, d, solver));
  state.counters["pixels"] = static_cast<double>(count_on(pred) + count_on(gt));
}
BENCHMARK(BM_Match)
    ->Arg(static_cast<int>(metrics::MatchSolver::bucketed))
    ->Arg(static_cast<int>(metrics::MatchSolver::min_cost))
    ->Arg(static_cast<int>(metrics::MatchSolver::greedy))
    ->Unit(benchmark::kMillisecond);

void BM_PrCurve(benchmark::State& state) {
  const Extent e{320, 240};
  const auto gt = circles(e, 3);
  Rng rng(4);
  ProbabilityMap prob(e);
  for (int y = 0; y < e.height; ++y)
    for (int x = 0; x < e.width; ++x)
      if (gt(x, y)) prob(x, y) = static_cast<float>(0.05 + 0.9 * rng.uniform01());
  metrics::MatchConfig cfg;
  cfg.thresholds = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::pr_curve(prob, gt, cfg));
}
BENCHMARK(BM_PrCurve)->Arg(9)->Arg(99)->Unit(benchmark::kMillisecond);

void BM_NmsThin(benchmark::State& state) {
  const Extent e{320, 240};
  const auto thin = circles(e, 5);
  const auto thick = dilate_disk(on_pixels(thin), 2.0, e);
  ProbabilityMap prob(e);
  for (int y = 0; y < e.height; ++y)
    for (int x = 0; x < e.width; ++x) prob(x, y) = thick(x, y) ? (thin(x, y) ? 0.9f : 0.5f) : 0.0f;
  for (auto _ : state) benchmark::DoNotOptimize(nms_thin(prob));
}
BENCHMARK(BM_NmsThin)->Unit(benchmark::kMillisecond);

void BM_MorphThin(benchmark::State& state) {
  const Extent e{320, 240};
  const auto thick = dilate_disk(on_pixels(circles(e, 6)), 2.0, e);
  for (auto _ : state) benchmark::DoNotOptimize(morph_thin(thick));
}
BENCHMARK(BM_MorphThin)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
