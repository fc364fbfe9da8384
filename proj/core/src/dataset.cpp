#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "obkit/dataset.hpp"
#include "obkit/log.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::dataset {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(line) + ": " + what);
}

bool is_hex64(std::string_view s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

void put_ref(std::ostringstream& out, const char* key, const FileRef& ref) {
  out << key << ' ' << ref.sha256 << ' ' << ref.path.generic_string() << '\n';
}

bool is_image(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".ppm" || ext == ".bmp" || ext == ".tif" ||
         ext == ".tiff";
}

std::map<std::string, std::filesystem::path> by_stem(const std::filesystem::path& dir) {
  std::map<std::string, std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && is_image(e.path())) out.emplace(e.path().stem().string(), e.path());
  }
  return out;
}

}  // namespace

std::string format_manifest(const Manifest& m) {
  std::ostringstream out;
  out << kManifestMagic << ' ' << m.version << '\n';
  out << "name " << m.name << '\n';
  for (const SampleEntry& s : m.samples) {
    out << "sample " << s.id << '\n';
    if (s.rgb) put_ref(out, "rgb", *s.rgb);
    put_ref(out, "gt", s.gt);
    if (s.depth) put_ref(out, "depth", *s.depth);
    if (s.labels) put_ref(out, "labels", *s.labels);
  }
  return out.str();
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::set<std::string> has_gt;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? std::string() : line.substr(sp + 1);
    if (!header) {
      if (key != kManifestMagic) fail(line_no, "missing obkit-manifest header");
      if (rest != "1") fail(line_no, "unsupported manifest version '" + rest + "'");
      header = true;
      continue;
    }
    if (key == "name") {
      m.name = rest;
    } else if (key == "sample") {
      if (rest.empty()) fail(line_no, "sample without id");
      m.samples.push_back({});
      m.samples.back().id = rest;
    } else if (key == "rgb" || key == "gt" || key == "depth" || key == "labels") {
      if (m.samples.empty()) fail(line_no, key + " before any sample");
      const auto sp2 = rest.find(' ');
      if (sp2 == std::string::npos) fail(line_no, "expected '<sha256> <path>'");
      FileRef ref{rest.substr(sp2 + 1), rest.substr(0, sp2)};
      if (!is_hex64(ref.sha256)) fail(line_no, "bad sha256");
      if (ref.path.empty()) fail(line_no, "empty path");
      SampleEntry& s = m.samples.back();
      if (key == "rgb") s.rgb = ref;
      if (key == "depth") s.depth = ref;
      if (key == "labels") s.labels = ref;
      if (key == "gt") {
        s.gt = ref;
        has_gt.insert(s.id);
      }
    } else {
      fail(line_no, "unknown record '" + key + "'");
    }
  }
  if (!header) throw Error(ErrorCode::ParseError, "empty manifest");
  std::set<std::string> ids;
  for (const SampleEntry& s : m.samples) {
    if (!ids.insert(s.id).second) throw Error(ErrorCode::ParseError, "duplicate sample id '" + s.id + "'");
    if (!has_gt.contains(s.id)) throw Error(ErrorCode::ParseError, "sample '" + s.id + "' has no gt");
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  io::write_text(path, format_manifest(m));
}

Benchmark load_benchmark(const std::filesystem::path& manifest_path, bool verify_checksums) {
  if (!std::filesystem::is_regular_file(manifest_path)) throw Error(ErrorCode::MissingFile, manifest_path.string());
  Benchmark b;
  b.manifest_ = parse_manifest(io::read_text(manifest_path));
  b.root_ = manifest_path.parent_path();
  auto check = [&](const FileRef& ref) {
    const auto full = b.root_ / ref.path;
    if (!std::filesystem::is_regular_file(full)) throw Error(ErrorCode::MissingFile, full.string());
    if (verify_checksums && sha256_file(full) != ref.sha256) throw Error(ErrorCode::ChecksumMismatch, full.string());
  };
  for (const SampleEntry& s : b.manifest_.samples) {
    if (s.rgb) check(*s.rgb);
    check(s.gt);
    if (s.depth) check(*s.depth);
    if (s.labels) check(*s.labels);
  }
  return b;
}

BinaryMap Benchmark::load_gt(std::size_t i) const {
  BinaryMap gt = io::read_mask(resolve(entry(i).gt));
  if (!is_thin(gt)) {
    ++*thinned_;
    log::warn("gt of sample '" + entry(i).id + "' is not thin; thinned on load");
    gt = morph_thin(gt);
  }
  return gt;
}

std::optional<RgbImage> Benchmark::load_rgb(std::size_t i) const {
  if (!entry(i).rgb) return std::nullopt;
  return io::read_rgb(resolve(*entry(i).rgb));
}

std::optional<Raster<float>> Benchmark::load_depth(std::size_t i) const {
  if (!entry(i).depth) return std::nullopt;
  return io::read_float_map(resolve(*entry(i).depth));
}

ImportResult import_pairs(const std::filesystem::path& images_dir, const std::filesystem::path& masks_dir,
                          const std::filesystem::path& out_manifest, const std::string& name) {
  const auto images = by_stem(images_dir);
  const auto masks = by_stem(masks_dir);
  ImportResult result;
  result.manifest.name = name;
  const auto root = std::filesystem::absolute(out_manifest).parent_path();
  auto relative = [&](const std::filesystem::path& p) {
    return std::filesystem::relative(std::filesystem::absolute(p), root);
  };
  for (const auto& [stem, image] : images) {
    const auto m = masks.find(stem);
    if (m == masks.end()) {
      result.unmatched.push_back(image);
      continue;
    }
    SampleEntry s;
    s.id = stem;
    s.rgb = FileRef{relative(image), sha256_file(image)};
    s.gt = FileRef{relative(m->second), sha256_file(m->second)};
    result.manifest.samples.push_back(std::move(s));
  }
  for (const auto& [stem, mask] : masks) {
    if (!images.contains(stem)) result.unmatched.push_back(mask);
  }
  for (const auto& u : result.unmatched) log::warn("no partner for " + u.string());
  if (result.manifest.samples.empty()) {
    throw Error(ErrorCode::NoPairs, images_dir.string() + " and " + masks_dir.string() + " share no file stems");
  }
  write_manifest(out_manifest, result.manifest);
  return result;
}

}  // namespace obkit::dataset
