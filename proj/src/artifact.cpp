#include "atlas/artifact.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace atlas {

using nlohmann::json;

namespace {

json bounds_json(const RootBounds& b) {
  return {{"cx", b.cx}, {"cy", b.cy}, {"side", b.side}, {"pad", b.pad_fraction}};
}

RootBounds bounds_from(const json& j) {
  return {j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("side").get<double>(),
          j.at("pad").get<double>()};
}

json bandwidth_json(const Bandwidth& bw) { return json::array({bw.hx, bw.hy}); }
Bandwidth bandwidth_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json slice_json(const SliceGrid& s) { return {{"count", s.count}, {"values", s.grid.values}}; }

SliceGrid slice_from(const json& j, std::size_t nx, std::size_t ny, const GridExtent& extent) {
  SliceGrid s;
  s.count = j.at("count").get<std::size_t>();
  s.grid = {nx, ny, extent, j.at("values").get<std::vector<double>>()};
  if (s.grid.values.size() != nx * ny) throw ArtifactError("grid values do not match the resolution");
  return s;
}

json manifest_to_json(const Manifest& m) {
  return {{"version", m.version},
          {"mode", std::string(to_string(m.mode))},
          {"points", m.point_count},
          {"levels", m.levels},
          {"tiles", m.tiles_per_level},
          {"groups", m.groups},
          {"times", m.times},
          {"grids", m.grid_count},
          {"labels", m.label_count},
          {"vocabulary", m.vocabulary_size},
          {"files",
           {{"data", std::string(kDataFile)},
            {"grid", std::string(kGridFile)},
            {"summary", std::string(kSummaryFile)}}}};
}

Manifest manifest_from(const json& j) {
  Manifest m;
  m.version = j.at("version").get<std::string>();
  check_version(m.version);
  m.mode = parse_summary_mode(j.at("mode").get<std::string>());
  m.point_count = j.at("points").get<std::uint64_t>();
  m.levels = j.at("levels").get<std::vector<int>>();
  m.tiles_per_level = j.at("tiles").get<std::vector<std::uint64_t>>();
  m.groups = j.at("groups").get<std::vector<std::string>>();
  m.times = j.at("times").get<std::vector<std::string>>();
  m.grid_count = j.at("grids").get<std::uint64_t>();
  m.label_count = j.at("labels").get<std::uint64_t>();
  m.vocabulary_size = j.at("vocabulary").get<std::uint64_t>();
  return m;
}

json keywords_json(const std::vector<Keyword>& keywords) {
  json arr = json::array();
  for (const auto& k : keywords) arr.push_back(json::array({k.term, k.score}));
  return arr;
}

std::vector<Keyword> keywords_from(const json& j) {
  std::vector<Keyword> out;
  for (const auto& k : j) out.push_back({k.at(0).get<std::string>(), k.at(1).get<double>()});
  return out;
}

void check_grid_shape(const DensityGrid& g, const DensityGrid& ref) {
  if (g.nx != ref.nx || g.ny != ref.ny || !(g.extent == ref.extent)) {
    throw ArtifactError("all density grids must share one extent and resolution");
  }
}

template <class Fn>
auto with_context(std::string_view what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ArtifactError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

void check_version(std::string_view version) {
  int major = -1;
  const auto [ptr, ec] = std::from_chars(version.data(), version.data() + version.size(), major);
  int expected = 0;
  std::from_chars(kArtifactVersion.data(), kArtifactVersion.data() + kArtifactVersion.size(), expected);
  if (ec != std::errc() || major != expected) {
    throw ArtifactError("unsupported artifact version '" + std::string(version) + "' (expected " +
                        std::to_string(expected) + ".x)");
  }
}

void write_data(std::ostream& out, std::span<const PointRecord> points) {
  for (const auto& p : points) {
    out << to_ndjson(p) << '\n';
  }
}

std::string manifest_json(const Manifest& manifest) { return manifest_to_json(manifest).dump(); }

std::string write_grid(const GridDocument& doc) {
  const auto& d = doc.density;
  const auto& ref = d.overall.grid;
  json groups = json::object(), group_bw = json::object(), grids = json::object();
  for (const auto& [name, g] : d.groups) {
    check_grid_shape(g.overall.grid, ref);
    groups[name] = slice_json(g.overall);
    group_bw[name] = bandwidth_json(g.bandwidth);
  }
  for (const auto& [group, times] : d.slices) {
    json per_time = json::object();
    for (const auto& [time, s] : times) {
      check_grid_shape(s.grid, ref);
      per_time[time] = slice_json(s);
    }
    grids[group] = std::move(per_time);
  }

  json j = {
      {"meta", manifest_to_json(doc.meta)},
      {"bounds", bounds_json(doc.bounds)},
      {"extent", {{"x0", ref.extent.x0}, {"x1", ref.extent.x1}, {"y0", ref.extent.y0}, {"y1", ref.extent.y1}}},
      {"resolution", {{"nx", ref.nx}, {"ny", ref.ny}}},
      {"bandwidths", {{"overall", bandwidth_json(d.bandwidth)}, {"groups", std::move(group_bw)}}},
      {"thresholds", doc.thresholds},
      {"overall", slice_json(d.overall)},
      {"groups", std::move(groups)},
      {"grids", std::move(grids)},
  };
  return j.dump();
}

GridDocument parse_grid(std::string_view json_text) {
  return with_context("grid file", [&] {
    const json j = json::parse(json_text);
    GridDocument doc;
    doc.meta = manifest_from(j.at("meta"));
    doc.bounds = bounds_from(j.at("bounds"));
    doc.thresholds = j.at("thresholds").get<std::vector<double>>();

    const auto& e = j.at("extent");
    const GridExtent extent{e.at("x0").get<double>(), e.at("x1").get<double>(), e.at("y0").get<double>(),
                            e.at("y1").get<double>()};
    const auto nx = j.at("resolution").at("nx").get<std::size_t>();
    const auto ny = j.at("resolution").at("ny").get<std::size_t>();

    auto& d = doc.density;
    d.bandwidth = bandwidth_from(j.at("bandwidths").at("overall"));
    d.overall = slice_from(j.at("overall"), nx, ny, extent);
    const auto& group_bw = j.at("bandwidths").at("groups");
    for (const auto& [name, g] : j.at("groups").items()) {
      d.groups[name] = {bandwidth_from(group_bw.at(name)), slice_from(g, nx, ny, extent)};
    }
    for (const auto& [group, times] : j.at("grids").items()) {
      auto& per_time = d.slices[group];
      for (const auto& [time, s] : times.items()) per_time[time] = slice_from(s, nx, ny, extent);
    }
    return doc;
  });
}

std::string write_summaries(const SummaryDocument& doc) {
  const bool text = doc.mode == SummaryMode::text;
  json levels = json::array();
  for (const auto& level : doc.levels) {
    json tiles = json::array();
    for (const auto& t : level.tiles) {
      const Rect r = tile_bounds(t.key, doc.bounds);
      json tile = {{"ix", t.key.ix}, {"iy", t.key.iy}, {"cx", r.center_x()}, {"cy", r.center_y()}};
      if (text) tile["keywords"] = keywords_json(t.keywords);
      else tile["exemplars"] = t.exemplars;
      tiles.push_back(std::move(tile));
    }
    levels.push_back({{"level", level.level}, {"tiles", std::move(tiles)}});
  }
  json labels = json::array();
  for (const auto& l : doc.labels) {
    json label = {{"x", l.position.x}, {"y", l.position.y}, {"level", l.tile.level}, {"ix", l.tile.ix},
                  {"iy", l.tile.iy}};
    if (text) label["keywords"] = keywords_json(l.keywords);
    else label["exemplars"] = l.exemplars;
    labels.push_back(std::move(label));
  }
  json j = {{"version", doc.version},
            {"mode", std::string(to_string(doc.mode))},
            {"bounds", bounds_json(doc.bounds)},
            {"levels", std::move(levels)},
            {"labels", std::move(labels)}};
  return j.dump();
}

SummaryDocument parse_summaries(std::string_view json_text) {
  return with_context("summary file", [&] {
    const json j = json::parse(json_text);
    SummaryDocument doc;
    doc.version = j.at("version").get<std::string>();
    check_version(doc.version);
    doc.mode = parse_summary_mode(j.at("mode").get<std::string>());
    doc.bounds = bounds_from(j.at("bounds"));
    const bool text = doc.mode == SummaryMode::text;
    for (const auto& lv : j.at("levels")) {
      SummaryLevel level;
      level.level = lv.at("level").get<int>();
      for (const auto& t : lv.at("tiles")) {
        TileSummary s;
        s.key = {level.level, t.at("ix").get<std::uint32_t>(), t.at("iy").get<std::uint32_t>()};
        if (!s.key.valid()) throw ArtifactError("summary file has an invalid tile key");
        if (text) s.keywords = keywords_from(t.at("keywords"));
        else s.exemplars = t.at("exemplars").get<std::vector<std::uint32_t>>();
        level.tiles.push_back(std::move(s));
      }
      doc.levels.push_back(std::move(level));
    }
    for (const auto& l : j.at("labels")) {
      AutoLabel label;
      label.position = {l.at("x").get<double>(), l.at("y").get<double>()};
      label.tile = {l.at("level").get<int>(), l.at("ix").get<std::uint32_t>(), l.at("iy").get<std::uint32_t>()};
      if (text) label.keywords = keywords_from(l.at("keywords"));
      else label.exemplars = l.at("exemplars").get<std::vector<std::uint32_t>>();
      doc.labels.push_back(std::move(label));
    }
    return doc;
  });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ArtifactError("read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw ArtifactError("write failed: " + path.string());
}

void write_artifact(const std::filesystem::path& dir, const Artifact& artifact) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ArtifactError("cannot create " + dir.string() + ": " + ec.message());

  const auto data_path = dir / kDataFile;
  {
    std::ofstream out(data_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot write " + data_path.string());
    write_data(out, artifact.points);
    out.close();
    if (!out) throw ArtifactError("write failed: " + data_path.string());
  }
  write_file(dir / kGridFile, write_grid(artifact.grid));
  write_file(dir / kSummaryFile, write_summaries(artifact.summary));
}

Artifact read_artifact(const std::filesystem::path& dir) {
  Artifact a;
  a.grid = parse_grid(read_file(dir / kGridFile));
  a.summary = parse_summaries(read_file(dir / kSummaryFile));
  try {
    a.points = load_points(dir / kDataFile, ParseOptions{.strict = true});
  } catch (const std::exception& e) {
    throw ArtifactError(e.what());
  }
  validate_artifact(a);
  return a;
}

void validate_artifact(const Artifact& a) {
  const auto& m = a.grid.meta;
  const auto fail = [](const std::string& what) { throw ArtifactError("manifest mismatch: " + what); };
  if (m.point_count != a.points.size()) fail("point count");
  if (m.mode != a.summary.mode) fail("summary mode");
  if (!(a.grid.bounds == a.summary.bounds)) fail("root bounds");
  if (m.levels.size() != a.summary.levels.size() || m.tiles_per_level.size() != m.levels.size()) {
    fail("level list");
  }
  for (std::size_t i = 0; i < m.levels.size(); ++i) {
    const auto& level = a.summary.levels[i];
    if (level.level != m.levels[i]) fail("level depths");
    if (level.tiles.size() != m.tiles_per_level[i]) fail("tile count at level " + std::to_string(level.level));
    if (a.points.empty()) continue;
    const TileLevel occupied = build_leaf_level(a.points, a.summary.bounds, level.level);
    for (const auto& t : level.tiles) {
      if (!occupied.find(t.key.ix, t.key.iy)) fail("summary tile is not occupied");
    }
  }
  if (m.grid_count != a.grid.density.grid_count()) fail("grid count");
  if (m.label_count != a.summary.labels.size()) fail("label count");
  if (a.grid.density.overall.count != a.points.size()) fail("overall grid count");
}

}  // namespace atlas
