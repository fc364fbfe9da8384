#include <array>

#include "obkit/raster.hpp"

namespace obkit {
namespace {

// Neighbor order E, NE, N, NW, W, SW, S, SE.
constexpr std::array<Pixel, 8> kRing = {{{1, 0}, {1, -1}, {0, -1}, {-1, -1},
                                         {-1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

std::array<int, 8> ring(const BinaryMap& m, int x, int y) {
  std::array<int, 8> n{};
  for (int k = 0; k < 8; ++k) n[k] = m.at_or(x + kRing[k].x, y + kRing[k].y, 0) ? 1 : 0;
  return n;
}

int neighbor_count(const std::array<int, 8>& n) {
  int c = 0;
  for (int v : n) c += v;
  return c;
}

// Yokoi connectivity number for 8-connected foreground. A pixel is simple
// (deletable without changing topology) iff this equals 1.
int yokoi8(const std::array<int, 8>& n) {
  int c = 0;
  for (int k = 0; k < 8; k += 2) {
    const int a = 1 - n[k], b = 1 - n[(k + 1) % 8], d = 1 - n[(k + 2) % 8];
    c += a - a * b * d;
  }
  return c;
}

// Part of a 2x2 all-on block; only such pixels are candidates for deletion,
// so maps that are already thin pass through unchanged.
bool in_block(const BinaryMap& m, int x, int y) {
  for (int oy = -1; oy <= 0; ++oy)
    for (int ox = -1; ox <= 0; ++ox)
      if (m.at_or(x + ox, y + oy, 0) && m.at_or(x + ox + 1, y + oy, 0) && m.at_or(x + ox, y + oy + 1, 0) &&
          m.at_or(x + ox + 1, y + oy + 1, 0))
        return true;
  return false;
}

bool peel(BinaryMap& m, Pixel border) {
  bool changed = false;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || m.at_or(x + border.x, y + border.y, 0) || !in_block(m, x, y)) continue;
      const auto n = ring(m, x, y);
      if (neighbor_count(n) >= 2 && yokoi8(n) == 1) {
        m(x, y) = 0;
        changed = true;
      }
    }
  }
  return changed;
}

bool clear_squares(BinaryMap& m) {
  bool changed = false;
  for (int y = 0; y + 1 < m.height(); ++y) {
    for (int x = 0; x + 1 < m.width(); ++x) {
      const std::array<Pixel, 4> block = {{{x, y}, {x + 1, y}, {x, y + 1}, {x + 1, y + 1}}};
      if (!(m[block[0]] && m[block[1]] && m[block[2]] && m[block[3]])) continue;
      bool removed = false;
      for (const Pixel p : block) {
        if (yokoi8(ring(m, p.x, p.y)) == 1) {
          m[p] = 0;
          removed = true;
          break;
        }
      }
      if (!removed) {
        // Every block pixel is a cut pixel (e.g. an X with a 2x2 core). No
        // topology-preserving deletion exists; drop the pixel with the fewest
        // outside neighbors so the map is at least thin.
        Pixel victim = block[0];
        int best = 9;
        for (const Pixel p : block) {
          const int outside = neighbor_count(ring(m, p.x, p.y)) - 3;
          if (outside < best) {
            best = outside;
            victim = p;
          }
        }
        m[victim] = 0;
      }
      changed = true;
    }
  }
  return changed;
}

}  // namespace

bool is_thin(const BinaryMap& b) {
  for (int y = 0; y + 1 < b.height(); ++y)
    for (int x = 0; x + 1 < b.width(); ++x)
      if (b(x, y) && b(x + 1, y) && b(x, y + 1) && b(x + 1, y + 1)) return false;
  return true;
}

BinaryMap morph_thin(const BinaryMap& b) {
  BinaryMap m(b.extent());
  for (std::size_t i = 0; i < b.size(); ++i) m.data()[i] = b.data()[i] ? 1 : 0;
  bool changed = true;
  while (changed) {
    changed = false;
    changed |= peel(m, {0, -1});
    changed |= peel(m, {0, 1});
    changed |= peel(m, {1, 0});
    changed |= peel(m, {-1, 0});
    changed |= clear_squares(m);
  }
  return m;
}

}  // namespace obkit
