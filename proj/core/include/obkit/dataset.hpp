#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obkit/raster.hpp"

namespace obkit::dataset {

struct FileRef {
  std::filesystem::path path;  // relative to the manifest's directory
  std::string sha256;          // lowercase hex
  friend bool operator==(const FileRef&, const FileRef&) = default;
};

struct SampleEntry {
  std::string id;
  std::optional<FileRef> rgb;
  FileRef gt;
  std::optional<FileRef> depth;
  std::optional<FileRef> labels;
  friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

struct Manifest {
  int version = 1;
  std::string name;
  std::vector<SampleEntry> samples;
  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline constexpr std::string_view kManifestMagic = "obkit-manifest";

/// Line format:
///   obkit-manifest 1
///   name <text>
///   sample <id>
///   rgb|gt|depth|labels <sha256> <relative path>
/// File lines attach to the most recent `sample`.
std::string format_manifest(const Manifest& m);
Manifest parse_manifest(std::string_view text);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);
/// `file` is relative to `root`.
FileRef make_ref(const std::filesystem::path& root, const std::filesystem::path& file);

/// A loaded manifest with lazily read rasters.
class Benchmark {
 public:
  const Manifest& manifest() const { return manifest_; }
  const std::filesystem::path& root() const { return root_; }
  std::size_t size() const { return manifest_.samples.size(); }
  const SampleEntry& entry(std::size_t i) const { return manifest_.samples.at(i); }
  std::filesystem::path resolve(const FileRef& ref) const { return root_ / ref.path; }

  /// GT mask validated as {0,255}; thinned (and counted) when not thin.
  BinaryMap load_gt(std::size_t i) const;
  std::optional<RgbImage> load_rgb(std::size_t i) const;
  std::optional<Raster<float>> load_depth(std::size_t i) const;

  std::size_t thinning_warnings() const { return thinned_->load(); }

 private:
  friend Benchmark load_benchmark(const std::filesystem::path& manifest_path, bool verify_checksums);
  Manifest manifest_;
  std::filesystem::path root_;
  std::shared_ptr<std::atomic<std::size_t>> thinned_ = std::make_shared<std::atomic<std::size_t>>(0);
};

/// Parses and checks a manifest: unique ids, every file present
/// (MissingFile) and, when requested, checksums (ChecksumMismatch).
Benchmark load_benchmark(const std::filesystem::path& manifest_path, bool verify_checksums = true);

struct ImportResult {
  Manifest manifest;
  std::vector<std::filesystem::path> unmatched;  // files without a partner
};

/// Pairs images and masks by filename stem and writes a manifest at
/// `out_manifest`. Throws NoPairs when nothing matches.
ImportResult import_pairs(const std::filesystem::path& images_dir, const std::filesystem::path& masks_dir,
                          const std::filesystem::path& out_manifest, const std::string& name = "imported");

}  // namespace obkit::dataset
