#include <array>
#include <cstdint>
#include <unordered_set>

#include "obkit/raster.hpp"

namespace obkit {
namespace {

constexpr std::array<Pixel, 8> kOffsets = {{{1, 0}, {1, -1}, {0, -1}, {-1, -1},
                                            {-1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

// Mixed adjacency: a diagonal link only counts when neither shared 4-neighbor
// is on. This removes the redundant triangles 8-adjacency forms at corners,
// so junctions are only the genuine branch points.
struct Adjacency {
  const BinaryMap& map;

  int neighbors(Pixel p, std::array<Pixel, 8>& out) const {
    int n = 0;
    for (const Pixel o : kOffsets) {
      const Pixel q{p.x + o.x, p.y + o.y};
      if (!map.at_or(q.x, q.y, 0)) continue;
      if (o.x != 0 && o.y != 0 &&
          (map.at_or(p.x + o.x, p.y, 0) || map.at_or(p.x, p.y + o.y, 0))) {
        continue;
      }
      out[n++] = q;
    }
    return n;
  }

  int degree(Pixel p) const {
    std::array<Pixel, 8> tmp;
    return neighbors(p, tmp);
  }
};

std::uint64_t edge_key(const BinaryMap& m, Pixel a, Pixel b) {
  auto idx = [&](Pixel p) {
    return static_cast<std::uint64_t>(p.y) * static_cast<std::uint64_t>(m.width()) +
           static_cast<std::uint64_t>(p.x);
  };
  std::uint64_t i = idx(a), j = idx(b);
  if (i > j) std::swap(i, j);
  return (i << 32) | j;
}

}  // namespace

std::vector<BoundarySegment> trace_segments(const BinaryMap& b) {
  if (!is_thin(b)) throw Error(ErrorCode::RejectNotThin, "map contains a 2x2 block");

  const Adjacency adj{b};
  Raster<std::uint8_t> assigned(b.extent());
  std::unordered_set<std::uint64_t> walked;
  std::vector<BoundarySegment> segments;

  auto emit = [&](std::vector<Pixel>& path) {
    BoundarySegment seg;
    for (const Pixel p : path) {
      if (assigned[p]) continue;
      assigned[p] = 1;
      seg.points.push_back(p);
    }
    if (!seg.points.empty()) segments.push_back(std::move(seg));
  };

  // Branches between nodes (endpoints, junctions, isolated pixels).
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) {
      const Pixel start{x, y};
      if (!b[start]) continue;
      std::array<Pixel, 8> first;
      const int n = adj.neighbors(start, first);
      if (n == 2) continue;
      if (n == 0) {
        std::vector<Pixel> single{start};
        emit(single);
        continue;
      }
      for (int k = 0; k < n; ++k) {
        if (!walked.insert(edge_key(b, start, first[k])).second) continue;
        std::vector<Pixel> path{start};
        Pixel prev = start, cur = first[k];
        while (cur != start && adj.degree(cur) == 2) {
          path.push_back(cur);
          std::array<Pixel, 8> nb;
          adj.neighbors(cur, nb);
          const Pixel next = nb[0] == prev ? nb[1] : nb[0];
          walked.insert(edge_key(b, cur, next));
          prev = cur;
          cur = next;
        }
        path.push_back(cur);
        emit(path);
      }
    }
  }

  // Whatever is left consists of closed loops of degree-2 pixels.
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) {
      const Pixel start{x, y};
      if (!b[start] || assigned[start]) continue;
      std::vector<Pixel> path{start};
      std::array<Pixel, 8> nb;
      adj.neighbors(start, nb);
      Pixel prev = start, cur = nb[0];
      while (cur != start) {
        path.push_back(cur);
        adj.neighbors(cur, nb);
        const Pixel next = nb[0] == prev ? nb[1] : nb[0];
        prev = cur;
        cur = next;
      }
      emit(path);
    }
  }
  return segments;
}

}  // namespace obkit
