// embedding-atlas: build, query, and serve multi-resolution embedding summaries.

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "atlas/pipeline.hpp"
#include "atlas/search.hpp"
#include "atlas/server.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
  }
  return out;
}

int run_build(const std::string& input, const std::string& out_dir, const atlas::BuildOptions& options,
              const atlas::ParseOptions& parse) {
  const auto started = std::chrono::steady_clock::now();
  auto result = atlas::build_from_file(input, out_dir, options, parse);
  const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  for (const auto& d : result.diagnostics) std::cerr << "warning: " << d << '\n';
  const auto& meta = result.artifact.grid.meta;
  std::cout << "built " << out_dir << ": " << meta.point_count << " points, mode "
            << atlas::to_string(meta.mode) << ", levels";
  for (std::size_t i = 0; i < meta.levels.size(); ++i) {
    std::cout << ' ' << meta.levels[i] << " (" << meta.tiles_per_level[i] << " tiles)";
  }
  std::cout << ", " << meta.grid_count << " grids, " << meta.label_count << " labels in " << seconds << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-resolution summaries for 2D embedding maps"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "Summarize an ND-JSON point file into an artifact directory");
  std::string input, out_dir;
  atlas::ParseOptions parse;
  atlas::BuildOptions options;
  std::string levels_text, mode_text = "auto", stopwords_text = "none", bandwidth_text, thresholds_text;
  build->add_option("--input", input, "Input ND-JSON points")->required()->check(CLI::ExistingFile);
  build->add_option("--out", out_dir, "Output artifact directory")->required();
  build->add_flag("--strict", parse.strict, "Abort on the first bad input line");
  build->add_option("--pad", options.pad_fraction, "Root square padding fraction")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  build->add_option("--levels", levels_text, "Explicit quadtree depths, e.g. 8,6,4");
  build->add_option("--target-per-tile", options.target_per_tile, "Average points per finest tile")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  build->add_option("--mode", mode_text, "text|exemplar (default: text when points carry text)")
      ->check(CLI::IsMember({"auto", "text", "exemplar"}));
  build->add_option("--ngram-max", options.ngram_max, "Longest n-gram")->capture_default_str()->check(CLI::Range(1, 8));
  build->add_option("--top-k", options.top_k, "Keywords or exemplars per tile")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  build->add_option("--stopwords", stopwords_text, "Stopword list: <path>|builtin|none")->capture_default_str();
  build->add_option("--min-df", options.min_df, "Minimum term occurrences")->capture_default_str()->check(CLI::PositiveNumber);
  build->add_option("--grid", options.grid_size, "Density grid resolution per side")
      ->capture_default_str()
      ->check(CLI::Range(2, 4096));
  build->add_option("--bandwidth", bandwidth_text, "KDE bandwidth override hx,hy");
  build->add_option("--thresholds", thresholds_text, "Contour quantiles q1,q2,... in (0,1]");
  build->add_option("--max-labels", options.max_labels, "Maximum automatic labels")->capture_default_str();
  build->add_option("--time-key", parse.time_key, "Input key holding the time tag ('' disables)")->capture_default_str();
  build->add_option("--group-key", parse.group_key, "Input key holding the group tag ('' disables)")
      ->capture_default_str();

  // search
  auto* search = app.add_subcommand("search", "Query an artifact's text offline");
  std::string search_dir, query;
  std::size_t limit = atlas::kDefaultSearchLimit;
  search->add_option("--dir", search_dir, "Artifact directory")->required()->check(CLI::ExistingDirectory);
  search->add_option("--q", query, "Query text")->required();
  search->add_option("--limit", limit, "Maximum results")->capture_default_str()->check(CLI::PositiveNumber);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve an artifact and the search API over HTTP");
  atlas::ServerConfig config;
  std::string serve_dir;
  serve->add_option("--dir", serve_dir, "Artifact directory")->required()->check(CLI::ExistingDirectory);
  serve->add_option("--port", config.port, "Listen port (0 picks one)")->capture_default_str()->check(CLI::Range(0, 65535));
  serve->add_option("--host", config.host, "Bind address")->capture_default_str();
  serve->add_flag("--cors", config.cors, "Allow cross-origin requests");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      if (!levels_text.empty()) {
        for (double v : parse_number_list(levels_text)) {
          if (v < 0 || v != static_cast<int>(v)) throw std::invalid_argument("--levels takes non-negative integers");
          options.levels.push_back(static_cast<int>(v));
        }
      }
      if (mode_text != "auto") options.mode = atlas::parse_summary_mode(mode_text);
      if (stopwords_text == "builtin") options.stopwords = atlas::StopwordSet::builtin_english();
      else if (stopwords_text != "none") options.stopwords = atlas::StopwordSet::from_file(stopwords_text);
      if (!bandwidth_text.empty()) {
        const auto bw = parse_number_list(bandwidth_text);
        if (bw.size() != 2 || !(bw[0] > 0) || !(bw[1] > 0)) throw std::invalid_argument("--bandwidth takes hx,hy > 0");
        options.bandwidth = atlas::Bandwidth{bw[0], bw[1]};
      }
      if (!thresholds_text.empty()) {
        options.threshold_quantiles = parse_number_list(thresholds_text);
        for (double q : options.threshold_quantiles) {
          if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("--thresholds takes quantiles in (0,1]");
        }
        std::sort(options.threshold_quantiles.begin(), options.threshold_quantiles.end());
      }
      return run_build(input, out_dir, options, parse);
    }

    if (*search) {
      const auto artifact = atlas::read_artifact(search_dir);
      const auto index = atlas::SearchIndex::build(artifact.points);
      std::cout << atlas::search_artifact(index, query, limit) << '\n';
      return 0;
    }

    if (*serve) {
      config.artifact_dir = serve_dir;
      atlas::ArtifactServer server(config);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.start();
      std::cout << "serving " << serve_dir << " on http://" << config.host << ':' << server.port() << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      std::cout << "stopped after " << server.requests_served() << " requests" << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
