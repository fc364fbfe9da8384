#include <array>
#include <cstdio>
#include <cstring>

#include "obkit/error.hpp"
#include "obkit/service.hpp"

namespace obkit::service {
namespace {

constexpr std::size_t kBlock = 512;

void put_octal(std::uint8_t* field, std::size_t width, std::uint64_t value) {
  // width - 1 digits, then NUL
  std::snprintf(reinterpret_cast<char*>(field), width, "%0*llo", static_cast<int>(width - 1),
                static_cast<unsigned long long>(value));
}

std::uint64_t get_octal(const std::uint8_t* field, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width && field[i] >= '0' && field[i] <= '7'; ++i) v = v * 8 + (field[i] - '0');
  return v;
}

}  // namespace

std::vector<std::uint8_t> make_tar(const std::vector<TarEntry>& entries) {
  std::vector<std::uint8_t> out;
  for (const TarEntry& e : entries) {
    if (e.name.empty() || e.name.size() > 99) throw Error(ErrorCode::InvalidArgument, "tar entry name length");
    std::array<std::uint8_t, kBlock> h{};
    std::memcpy(h.data(), e.name.data(), e.name.size());
    put_octal(h.data() + 100, 8, 0644);
    put_octal(h.data() + 108, 8, 0);
    put_octal(h.data() + 116, 8, 0);
    put_octal(h.data() + 124, 12, e.bytes.size());
    put_octal(h.data() + 136, 12, 0);
    std::memset(h.data() + 148, ' ', 8);
    h[156] = '0';
    std::memcpy(h.data() + 257, "ustar", 6);
    std::memcpy(h.data() + 263, "00", 2);
    unsigned sum = 0;
    for (const std::uint8_t b : h) sum += b;
    std::snprintf(reinterpret_cast<char*>(h.data() + 148), 7, "%06o", sum);
    h[155] = ' ';
    out.insert(out.end(), h.begin(), h.end());
    out.insert(out.end(), e.bytes.begin(), e.bytes.end());
    out.resize((out.size() + kBlock - 1) / kBlock * kBlock, 0);
  }
  out.resize(out.size() + 2 * kBlock, 0);
  return out;
}

std::vector<TarEntry> read_tar(std::span<const std::uint8_t> archive) {
  std::vector<TarEntry> out;
  std::size_t pos = 0;
  while (pos + kBlock <= archive.size()) {
    const std::uint8_t* h = archive.data() + pos;
    if (h[0] == 0) break;
    unsigned sum = 0;
    for (std::size_t i = 0; i < kBlock; ++i) sum += (i >= 148 && i < 156) ? ' ' : h[i];
    if (sum != get_octal(h + 148, 8)) throw Error(ErrorCode::ParseError, "tar header checksum mismatch");
    TarEntry e;
    e.name.assign(reinterpret_cast<const char*>(h), strnlen(reinterpret_cast<const char*>(h), 100));
    const std::uint64_t size = get_octal(h + 124, 12);
    pos += kBlock;
    if (pos + size > archive.size()) throw Error(ErrorCode::ParseError, "truncated tar entry");
    e.bytes.assign(archive.begin() + pos, archive.begin() + pos + size);
    pos += (size + kBlock - 1) / kBlock * kBlock;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace obkit::service
