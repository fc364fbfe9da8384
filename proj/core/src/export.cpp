#include <set>

#include "obkit/obgen.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::gen {
namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (const char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "sample";
  return out;
}

}  // namespace

dataset::Manifest export_benchmark(std::span<const ExportSample> samples, const std::filesystem::path& out_dir,
                                   const std::string& benchmark_name) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples to export");
  dataset::Manifest manifest;
  manifest.name = benchmark_name;
  std::set<std::string> used;

  for (const ExportSample& s : samples) {
    const std::string base = sanitize(s.name);
    std::string id = base;
    for (int k = 1; used.contains(id); ++k) id = base + "_" + std::to_string(k);
    used.insert(id);

    dataset::SampleEntry entry;
    entry.id = id;
    const auto gt_rel = std::filesystem::path("gt") / (id + ".png");
    const auto labels_rel = std::filesystem::path("labels") / (id + ".png");
    const auto depth_rel = std::filesystem::path("depth") / (id + ".obfmap");
    io::write_mask(out_dir / gt_rel, s.ob.boundary);
    io::write_gray(out_dir / labels_rel, encode_labels(s.ob));
    io::write_float_map(out_dir / depth_rel, s.depth);
    entry.gt = dataset::make_ref(out_dir, gt_rel);
    entry.labels = dataset::make_ref(out_dir, labels_rel);
    entry.depth = dataset::make_ref(out_dir, depth_rel);
    if (s.rgb_path) {
      io::Bytes bytes;
      try {
        bytes = io::read_file(*s.rgb_path);
      } catch (const Error&) {
        throw Error(ErrorCode::IoError, s.rgb_path->string());
      }
      const auto rgb_rel = std::filesystem::path("images") / (id + s.rgb_path->extension().string());
      io::write_file(out_dir / rgb_rel, bytes);
      entry.rgb = dataset::make_ref(out_dir, rgb_rel);
    } else if (s.rgb) {
      const auto rgb_rel = std::filesystem::path("images") / (id + ".png");
      io::write_rgb(out_dir / rgb_rel, *s.rgb);
      entry.rgb = dataset::make_ref(out_dir, rgb_rel);
    }
    manifest.samples.push_back(std::move(entry));
  }
  dataset::write_manifest(out_dir / "manifest", manifest);
  return manifest;
}

}  // namespace obkit::gen
