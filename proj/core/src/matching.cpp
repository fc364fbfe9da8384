#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "obkit/metrics.hpp"

namespace obkit::metrics {
namespace {

constexpr int kFree = -1;

struct Graph {
  std::size_t left = 0, right = 0;
  // adj[u] lists (right node, squared distance), nearest first.
  std::vector<std::vector<std::pair<int, int>>> adj;
};

Graph build_graph(const BinaryMap& pred, const BinaryMap& gt, double d_max) {
  Graph g;
  Raster<int> gt_index(gt.extent(), kFree);
  for (int y = 0; y < gt.height(); ++y)
    for (int x = 0; x < gt.width(); ++x)
      if (gt(x, y)) gt_index(x, y) = static_cast<int>(g.right++);
  const auto offsets = disk_offsets(d_max);
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      if (!pred(x, y)) continue;
      auto& edges = g.adj.emplace_back();
      for (const Pixel o : offsets) {
        const int v = gt_index.at_or(x + o.x, y + o.y, kFree);
        if (v != kFree) edges.emplace_back(v, o.x * o.x + o.y * o.y);
      }
    }
  }
  g.left = g.adj.size();
  return g;
}

struct Matching {
  std::vector<int> of_left, of_right;
  std::size_t size = 0;
};

Matching greedy(const Graph& g) {
  Matching m{std::vector<int>(g.left, kFree), std::vector<int>(g.right, kFree), 0};
  std::vector<std::tuple<int, int, int>> edges;  // (d2, left, right)
  for (std::size_t u = 0; u < g.left; ++u)
    for (const auto& [v, d2] : g.adj[u]) edges.emplace_back(d2, static_cast<int>(u), v);
  std::sort(edges.begin(), edges.end());
  for (const auto& [d2, u, v] : edges) {
    if (m.of_left[u] != kFree || m.of_right[v] != kFree) continue;
    m.of_left[u] = v;
    m.of_right[v] = u;
    ++m.size;
  }
  return m;
}

// Hopcroft-Karp phases starting from an existing matching.
void augment(const Graph& g, Matching& m) {
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> layer(g.left), cursor(g.left);
  std::vector<int> queue;
  queue.reserve(g.left);
  for (;;) {
    queue.clear();
    for (std::size_t u = 0; u < g.left; ++u) {
      layer[u] = m.of_left[u] == kFree ? 0 : inf;
      if (layer[u] == 0) queue.push_back(static_cast<int>(u));
    }
    bool found = false;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      for (const auto& [v, d2] : g.adj[u]) {
        const int w = m.of_right[v];
        if (w == kFree) {
          found = true;
        } else if (layer[w] == inf) {
          layer[w] = layer[u] + 1;
          queue.push_back(w);
        }
      }
    }
    if (!found) return;
    std::fill(cursor.begin(), cursor.end(), 0);
    std::vector<int> path;  // left nodes on the current DFS path
    for (std::size_t root = 0; root < g.left; ++root) {
      if (m.of_left[root] != kFree) continue;
      path.assign(1, static_cast<int>(root));
      while (!path.empty()) {
        const int u = path.back();
        if (cursor[u] == static_cast<int>(g.adj[u].size())) {
          layer[u] = inf;  // dead end for this phase
          path.pop_back();
          continue;
        }
        const int v = g.adj[u][cursor[u]].first;
        const int w = m.of_right[v];
        if (w == kFree) {
          // Flip the alternating path ending at v.
          int next_v = v;
          for (auto it = path.rbegin(); it != path.rend(); ++it) {
            const int pu = *it;
            const int prev_v = m.of_left[pu];
            m.of_left[pu] = next_v;
            m.of_right[next_v] = pu;
            next_v = prev_v;
          }
          ++m.size;
          for (const int pu : path) layer[pu] = inf;
          path.clear();
        } else if (layer[w] == layer[u] + 1) {
          ++cursor[u];
          path.push_back(w);
        } else {
          ++cursor[u];
        }
      }
    }
  }
}

// Successive shortest paths with Johnson potentials.
Matching min_cost(const Graph& g) {
  const double inf = std::numeric_limits<double>::infinity();
  Matching m{std::vector<int>(g.left, kFree), std::vector<int>(g.right, kFree), 0};
  std::vector<double> pot_l(g.left, 0.0), pot_r(g.right, 0.0), dist_l(g.left), dist_r(g.right);
  std::vector<int> parent(g.right);
  using Item = std::tuple<double, int, int>;  // (dist, side, node); side 0 left, 1 right
  for (;;) {
    std::fill(dist_l.begin(), dist_l.end(), inf);
    std::fill(dist_r.begin(), dist_r.end(), inf);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t u = 0; u < g.left; ++u) {
      if (m.of_left[u] == kFree) {
        dist_l[u] = 0.0;
        pq.emplace(0.0, 0, static_cast<int>(u));
      }
    }
    int target = kFree;
    double target_dist = inf;
    while (!pq.empty()) {
      const auto [d, side, node] = pq.top();
      pq.pop();
      if (d > target_dist) break;
      if (side == 0) {
        if (d > dist_l[node]) continue;
        for (const auto& [v, d2] : g.adj[node]) {
          if (m.of_left[node] == v) continue;
          const double rc = std::max(0.0, std::sqrt(double(d2)) + pot_l[node] - pot_r[v]);
          if (d + rc < dist_r[v]) {
            dist_r[v] = d + rc;
            parent[v] = node;
            pq.emplace(dist_r[v], 1, v);
          }
        }
      } else {
        if (d > dist_r[node]) continue;
        const int w = m.of_right[node];
        if (w == kFree) {
          if (d < target_dist) {
            target_dist = d;
            target = node;
          }
        } else if (d < dist_l[w]) {
          dist_l[w] = d;
          pq.emplace(d, 0, w);
        }
      }
    }
    if (target == kFree) break;
    for (std::size_t u = 0; u < g.left; ++u) pot_l[u] += std::min(dist_l[u], target_dist);
    for (std::size_t v = 0; v < g.right; ++v) pot_r[v] += std::min(dist_r[v], target_dist);
    for (int v = target; v != kFree;) {
      const int u = parent[v];
      const int prev_v = m.of_left[u];
      m.of_left[u] = v;
      m.of_right[v] = u;
      v = prev_v;
    }
    ++m.size;
  }
  return m;
}

}  // namespace

MatchCounts match_boundaries(const BinaryMap& pred, const BinaryMap& gt, double d_max, MatchSolver solver) {
  require_same_extent(pred, gt, "prediction and gt differ in size");
  if (!is_thin(pred)) throw Error(ErrorCode::NotThin, "prediction map has a 2x2 block");
  if (!is_thin(gt)) throw Error(ErrorCode::NotThin, "gt map has a 2x2 block");
  if (!(d_max >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative matching distance");
  const Graph g = build_graph(pred, gt, d_max);
  Matching m;
  switch (solver) {
    case MatchSolver::greedy:
      m = greedy(g);
      break;
    case MatchSolver::bucketed:
      m = greedy(g);
      augment(g, m);
      break;
    case MatchSolver::min_cost:
      m = min_cost(g);
      break;
  }
  return {m.size, g.left - m.size, g.right - m.size};
}

}  // namespace obkit::metrics
