#include <algorithm>

#include "cli/commands.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::cli {

std::map<std::string, std::filesystem::path> files_by_stem(const std::filesystem::path& dir,
                                                          const std::vector<std::string>& extensions) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::MissingFile, dir.string() + " is not a directory");
  std::map<std::string, std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (std::find(extensions.begin(), extensions.end(), ext) == extensions.end()) continue;
    const auto [it, inserted] = out.emplace(e.path().stem().string(), e.path());
    if (!inserted) {
      throw Error(ErrorCode::InvalidArgument, "two files share the stem '" + it->first + "' in " + dir.string());
    }
  }
  return out;
}

ProbabilityMap read_prediction(const std::filesystem::path& path) {
  if (path.extension() == ".obfmap") {
    ProbabilityMap p = io::read_float_map(path);
    try {
      validate_probability(p);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
    }
    return p;
  }
  return to_probability(io::read_mask(path));
}

BinaryMap read_gt(const std::filesystem::path& path) {
  BinaryMap gt = io::read_mask(path);
  return is_thin(gt) ? gt : morph_thin(gt);
}

}  // namespace obkit::cli
