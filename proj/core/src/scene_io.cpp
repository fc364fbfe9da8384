#include "obkit/scene_io.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "obkit/log.hpp"
#include "obkit/raster_io.hpp"

namespace obkit::geom {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double to_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    parse_fail(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

long to_long(std::string_view s, std::size_t line) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) parse_fail(line, "bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

ObjMesh parse_obj(std::string_view text) {
  std::vector<Vec3> vertices;
  std::vector<TriangleIndices> triangles;
  std::vector<int> instances;
  std::vector<std::string> names;
  std::map<std::string, int> group_ids;
  std::string group;
  std::size_t dropped = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = raw.substr(0, raw.find('#'));
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (tok[0] == "v") {
      if (tok.size() < 4) parse_fail(line_no, "vertex needs 3 coordinates");
      vertices.emplace_back(to_double(tok[1], line_no), to_double(tok[2], line_no), to_double(tok[3], line_no));
    } else if (tok[0] == "o" || tok[0] == "g") {
      group = tok.size() > 1 ? std::string(trim(line.substr(line.find(tok[1])))) : std::string();
    } else if (tok[0] == "f") {
      if (tok.size() < 4) parse_fail(line_no, "face needs at least 3 vertices");
      std::vector<std::uint32_t> idx;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const std::string_view ref = tok[k].substr(0, tok[k].find('/'));
        long v = to_long(ref, line_no);
        if (v < 0) v = static_cast<long>(vertices.size()) + v + 1;
        if (v < 1 || v > static_cast<long>(vertices.size())) parse_fail(line_no, "vertex index out of range");
        idx.push_back(static_cast<std::uint32_t>(v - 1));
      }
      auto [it, inserted] = group_ids.try_emplace(group, static_cast<int>(names.size()));
      if (inserted) names.push_back(group);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        const TriangleIndices tri{idx[0], idx[k], idx[k + 1]};
        const Vec3& a = vertices[tri[0]];
        if (!((vertices[tri[1]] - a).cross(vertices[tri[2]] - a).norm() > 0.0)) {
          ++dropped;
          continue;
        }
        triangles.push_back(tri);
        instances.push_back(it->second);
      }
    }
  }

  ObjMesh out;
  out.mesh = SceneMesh::build(std::move(vertices), std::move(triangles), std::move(instances));
  out.instance_names = std::move(names);
  out.dropped_degenerate = dropped;
  return out;
}

SceneDescription parse_scene_description(std::string_view text, const std::filesystem::path& base_dir) {
  static const std::set<std::string> kKnown = {"mesh", "width", "height", "fx", "fy", "cx", "cy",
                                               "rotation", "translation", "supersample"};
  std::map<std::string, std::string> values;
  std::map<std::string, std::size_t> lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (!kKnown.contains(key)) parse_fail(line_no, "unknown key '" + key + "'");
    if (values.contains(key)) parse_fail(line_no, "duplicate key '" + key + "'");
    values[key] = std::string(trim(line.substr(eq + 1)));
    lines[key] = line_no;
  }
  for (const char* required : {"mesh", "width", "height", "fx", "fy", "cx", "cy"}) {
    if (!values.contains(required)) throw Error(ErrorCode::ParseError, std::string("missing key '") + required + "'");
  }
  auto numbers = [&](const std::string& key, std::size_t count) {
    const auto tok = split_ws(values.at(key));
    if (tok.size() != count) parse_fail(lines.at(key), key + " needs " + std::to_string(count) + " values");
    std::vector<double> out;
    for (const auto t : tok) out.push_back(to_double(t, lines.at(key)));
    return out;
  };

  SceneDescription scene;
  scene.mesh_path = base_dir / values.at("mesh");
  auto& cam = scene.camera;
  cam.width = static_cast<int>(to_long(values.at("width"), lines.at("width")));
  cam.height = static_cast<int>(to_long(values.at("height"), lines.at("height")));
  cam.fx = numbers("fx", 1)[0];
  cam.fy = numbers("fy", 1)[0];
  cam.cx = numbers("cx", 1)[0];
  cam.cy = numbers("cy", 1)[0];
  if (values.contains("rotation")) {
    const auto r = numbers("rotation", 9);
    for (int i = 0; i < 9; ++i) cam.rotation(i / 3, i % 3) = r[static_cast<std::size_t>(i)];
  }
  if (values.contains("translation")) {
    const auto t = numbers("translation", 3);
    cam.translation = Vec3(t[0], t[1], t[2]);
  }
  if (values.contains("supersample")) {
    scene.supersample = static_cast<int>(to_long(values.at("supersample"), lines.at("supersample")));
    if (scene.supersample != 1 && scene.supersample != 2) parse_fail(lines.at("supersample"), "supersample must be 1 or 2");
  }
  return scene;
}

std::string format_scene_description(const SceneDescription& scene) {
  std::ostringstream out;
  out.precision(17);
  const auto& c = scene.camera;
  out << "mesh = " << scene.mesh_path.generic_string() << "\n"
      << "width = " << c.width << "\nheight = " << c.height << "\n"
      << "fx = " << c.fx << "\nfy = " << c.fy << "\ncx = " << c.cx << "\ncy = " << c.cy << "\n"
      << "rotation =";
  for (int i = 0; i < 9; ++i) out << ' ' << c.rotation(i / 3, i % 3);
  out << "\ntranslation = " << c.translation.x() << ' ' << c.translation.y() << ' ' << c.translation.z()
      << "\nsupersample = " << scene.supersample << "\n";
  return out.str();
}

LoadedScene load_scene(const std::filesystem::path& description) {
  if (!std::filesystem::is_regular_file(description)) throw Error(ErrorCode::MissingFile, description.string());
  const SceneDescription desc = parse_scene_description(io::read_text(description), description.parent_path());
  desc.camera.validate();
  if (!std::filesystem::is_regular_file(desc.mesh_path)) throw Error(ErrorCode::MissingFile, desc.mesh_path.string());
  LoadedScene scene;
  scene.geometry = parse_obj(io::read_text(desc.mesh_path));
  scene.camera = desc.camera;
  scene.supersample = desc.supersample;
  if (scene.geometry.dropped_degenerate > 0) {
    log::warn(std::to_string(scene.geometry.dropped_degenerate) + " degenerate face(s) dropped from " +
              desc.mesh_path.string());
  }
  return scene;
}

}  // namespace obkit::geom
