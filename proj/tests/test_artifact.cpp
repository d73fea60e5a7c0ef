#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "atlas/artifact.hpp"
#include "atlas/pipeline.hpp"
#include "test_support.hpp"

using namespace atlas;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("atlas_artifact_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::vector<PointRecord> tagged_corpus(std::size_t per_cluster, std::uint64_t seed) {
  auto pts = testing::clustered_corpus({{0, 0, 1}, {6, 1, 0.8}, {2, 7, 1.2}}, per_cluster, 25, 7, seed);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].group = i % 2 ? "journal" : "conference";
    pts[i].time = std::to_string(2020 + i % 3);
  }
  return pts;
}

fs::path write_input(const std::vector<PointRecord>& pts) {
  const auto path = fs::temp_directory_path() / ("atlas_in_" + std::to_string(::getpid()) + ".ndjson");
  std::ofstream out(path);
  write_data(out, pts);
  return path;
}

BuildOptions small_grid() {
  BuildOptions o;
  o.grid_size = 40;
  return o;
}

}  // namespace

TEST_CASE("empty dataset writes an empty point file") {
  const auto dir = scratch("empty");
  Artifact a;
  a.grid.meta.grid_count = 1;
  write_artifact(dir, a);
  CHECK(fs::file_size(dir / kDataFile) == 0);
  auto back = read_artifact(dir);
  CHECK(back.points.empty());
  CHECK(back.grid.meta.point_count == 0);
  fs::remove_all(dir);
}

TEST_CASE("point stream round trip") {
  auto pts = tagged_corpus(20, 1);
  pts[3].text.reset();
  pts[4].text = "with \"quotes\"\nand newline";
  std::stringstream ss;
  write_data(ss, pts);
  CHECK(parse_points(ss) == pts);
}

TEST_CASE("one line per point") {
  auto pts = testing::uniform_points(10000, 44);
  std::stringstream ss;
  write_data(ss, pts);
  std::size_t lines = 0;
  for (std::string line; std::getline(ss, line);) ++lines;
  CHECK(lines == 10000);
}

TEST_CASE("single global grid has empty slice maps") {
  auto pts = testing::uniform_points(50, 2);
  auto result = build(pts, small_grid());
  const auto doc = nlohmann::json::parse(write_grid(result.artifact.grid));
  CHECK(doc.at("groups").empty());
  CHECK(doc.at("grids").empty());
  CHECK(doc.at("overall").at("values").size() == 40 * 40);
  CHECK(doc.at("meta").at("grids") == 1);
}

TEST_CASE("two groups by three times enumerate nine grids") {
  auto pts = tagged_corpus(30, 3);
  auto result = build(pts, small_grid());
  const auto doc = nlohmann::json::parse(write_grid(result.artifact.grid));
  CHECK(doc.at("groups").size() == 2);
  std::size_t slices = 0;
  for (const auto& [group, times] : doc.at("grids").items()) slices += times.size();
  CHECK(slices == 6);
  CHECK(doc.at("meta").at("grids") == 6 + 2 + 1);
  CHECK(result.artifact.grid.meta.times == std::vector<std::string>{"2020", "2021", "2022"});
  CHECK(result.artifact.grid.meta.groups == std::vector<std::string>{"conference", "journal"});
}

TEST_CASE("inconsistent extents are refused") {
  auto result = build(tagged_corpus(10, 4), small_grid());
  auto doc = result.artifact.grid;
  doc.density.groups.begin()->second.overall.grid.extent.x1 += 1;
  CHECK_THROWS_AS(write_grid(doc), ArtifactError);
}

TEST_CASE("minimal summary document") {
  SummaryDocument doc;
  doc.bounds = {0.5, 0.5, 1, 0};
  doc.levels.push_back({0, {{{0, 0, 0}, {{"cat", 2.2}}, {}}}});
  const auto j = nlohmann::json::parse(write_summaries(doc));
  REQUIRE(j.at("levels").size() == 1);
  REQUIRE(j.at("levels")[0].at("tiles").size() == 1);
  CHECK(j.at("levels")[0].at("tiles")[0].at("keywords") == nlohmann::json::parse("[[\"cat\",2.2]]"));
  CHECK(parse_summaries(write_summaries(doc)) == doc);
}

TEST_CASE("full round trip and byte determinism") {
  auto pts = tagged_corpus(60, 5);
  const auto d1 = scratch("a"), d2 = scratch("b");
  const auto input = write_input(pts);
  auto r1 = build_from_file(input, d1, small_grid());
  write_artifact(d2, build(pts, small_grid()).artifact);

  auto back = read_artifact(d1);
  CHECK(back.points == r1.artifact.points);
  CHECK(back.grid == r1.artifact.grid);
  CHECK(back.summary == r1.artifact.summary);
  for (auto f : {kDataFile, kGridFile, kSummaryFile}) CHECK(read_file(d1 / f) == read_file(d2 / f));
  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::remove(input);
}

TEST_CASE("exemplar-mode round trip") {
  auto pts = testing::uniform_points(400, 8);
  const auto dir = scratch("exemplar");
  auto result = build(pts, small_grid());
  CHECK(result.artifact.summary.mode == SummaryMode::exemplar);
  write_artifact(dir, result.artifact);
  auto back = read_artifact(dir);
  CHECK(back.summary == result.artifact.summary);
  CHECK(back.grid == result.artifact.grid);
  fs::remove_all(dir);
}

TEST_CASE("unknown major versions are rejected") {
  CHECK_NOTHROW(check_version("1.0.0"));
  CHECK_NOTHROW(check_version("1.7.3"));
  CHECK_THROWS_WITH_AS(check_version("2.0.0"), doctest::Contains("unsupported artifact version"), ArtifactError);
  CHECK_THROWS_AS(check_version("garbage"), ArtifactError);

  auto result = build(testing::uniform_points(30, 9), small_grid());
  auto summary = nlohmann::json::parse(write_summaries(result.artifact.summary));
  summary["version"] = "3.1.0";
  CHECK_THROWS_AS(parse_summaries(summary.dump()), ArtifactError);
  auto grid = nlohmann::json::parse(write_grid(result.artifact.grid));
  grid["meta"]["version"] = "0.9.0";
  CHECK_THROWS_AS(parse_grid(grid.dump()), ArtifactError);
}

TEST_CASE("manifest mismatches are caught on load") {
  auto options = small_grid();
  options.levels = {3, 1};
  auto result = build(tagged_corpus(20, 6), options);
  const auto dir = scratch("mismatch");
  write_artifact(dir, result.artifact);
  {
    std::ofstream out(dir / kDataFile, std::ios::app);
    out << "{\"x\":0,\"y\":0}\n";
  }
  CHECK_THROWS_WITH_AS(read_artifact(dir), doctest::Contains("point count"), ArtifactError);

  // An unoccupied tile in the finest summary level must be refused.
  auto bad = result.artifact;
  auto& fine = bad.summary.levels.front();
  const auto occupied = build_leaf_level(bad.points, bad.summary.bounds, fine.level);
  TileKey empty{fine.level, 0, 0};
  while (occupied.find(empty.ix, empty.iy)) ++empty.ix;
  REQUIRE(empty.valid());
  fine.tiles.push_back({empty, {}, {}});
  bad.grid.meta.tiles_per_level.front() += 1;
  CHECK_THROWS_WITH_AS(validate_artifact(bad), doctest::Contains("not occupied"), ArtifactError);

  auto wrong_labels = result.artifact;
  wrong_labels.grid.meta.label_count += 1;
  CHECK_THROWS_AS(validate_artifact(wrong_labels), ArtifactError);
  fs::remove_all(dir);
}

TEST_CASE("coarsest summary level covers exactly the occupied tiles") {
  auto pts = testing::clustered_corpus({{-3, -2, 0.4}, {3, -1.5, 0.5}, {0.5, 3, 0.45}}, 300, 20, 6, 2);
  auto result = build(pts, small_grid());
  const auto& s = result.artifact.summary;
  const auto& coarse = s.levels.back();
  const auto occupied = build_leaf_level(result.artifact.points, s.bounds, coarse.level);
  REQUIRE(coarse.tiles.size() == occupied.tiles.size());
  for (std::size_t i = 0; i < coarse.tiles.size(); ++i) CHECK(coarse.tiles[i].key == occupied.tiles[i].key);
}

TEST_CASE("missing files are reported with their path") {
  CHECK_THROWS_WITH_AS(read_artifact("/nonexistent/atlas"), doctest::Contains("/nonexistent/atlas"), ArtifactError);
}
