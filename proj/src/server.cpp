#include "atlas/server.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace atlas {

using nlohmann::json;

std::string search_response_json(std::string_view query, std::size_t limit,
                                 const std::vector<SearchResult>& results, bool truncated) {
  json items = json::array();
  for (const auto& r : results) {
    items.push_back({{"index", r.point_index}, {"score", r.score}, {"snippet", r.snippet}});
  }
  return json{{"query", std::string(query)}, {"limit", limit}, {"truncated", truncated}, {"results", items}}
      .dump();
}

std::string search_artifact(const SearchIndex& index, std::string_view query, std::size_t limit) {
  if (limit == 0) throw std::invalid_argument("limit must be >= 1");
  auto results = index.query(query, limit + 1);
  const bool truncated = results.size() > limit;
  if (truncated) results.resize(limit);
  return search_response_json(query, limit, results, truncated);
}

struct ArtifactServer::Impl {
  httplib::Server http;
  std::string grid_body;
  std::string summary_body;
  std::filesystem::path data_path;
  std::size_t data_size = 0;
};

namespace {

std::string error_body(std::string_view message) { return json{{"error", std::string(message)}}.dump(); }

}  // namespace

ArtifactServer::ArtifactServer(ServerConfig config) : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  const auto& dir = config_.artifact_dir;
  try {
    artifact_ = read_artifact(dir);
    impl_->grid_body = read_file(dir / kGridFile);
    impl_->summary_body = read_file(dir / kSummaryFile);
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot load artifact from " + dir.string() + ": " + e.what());
  }
  impl_->data_path = dir / kDataFile;
  impl_->data_size = static_cast<std::size_t>(std::filesystem::file_size(impl_->data_path));
  manifest_body_ = manifest_json(artifact_.grid.meta);
  if (artifact_.summary.mode == SummaryMode::text) {
    try {
      index_ = SearchIndex::build(artifact_.points);
    } catch (const std::invalid_argument&) {
      // Text mode with only empty documents; search stays unavailable.
    }
  }
  install_routes();
}

ArtifactServer::~ArtifactServer() { stop(); }

void ArtifactServer::install_routes() {
  auto& http = impl_->http;
  // The library default adds SO_REUSEPORT, which would let a second server
  // share an occupied port instead of failing.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  if (config_.cors) {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  }
  http.set_logger([this](const httplib::Request&, const httplib::Response&) { ++requests_; });

  http.Get("/api/manifest", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(manifest_body_, "application/json");
  });

  http.Get("/api/search", [this](const httplib::Request& req, httplib::Response& res) {
    if (!index_) {
      res.status = 400;
      res.set_content(error_body("search requires text"), "application/json");
      return;
    }
    std::size_t limit = kDefaultSearchLimit;
    if (req.has_param("limit")) {
      const auto value = req.get_param_value("limit");
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), limit);
      if (ec != std::errc() || ptr != value.data() + value.size() || limit == 0) {
        res.status = 400;
        res.set_content(error_body("limit must be a positive integer"), "application/json");
        return;
      }
    }
    res.set_content(search_artifact(*index_, req.get_param_value("q"), limit), "application/json");
  });

  http.Get("/files/grid.json", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(impl_->grid_body, "application/json");
  });
  http.Get("/files/summary.json", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(impl_->summary_body, "application/json");
  });

  http.Get("/files/data.ndjson", [this](const httplib::Request& req, httplib::Response& res) {
    auto file = std::make_shared<std::ifstream>(impl_->data_path, std::ios::binary);
    if (!*file) {
      res.status = 500;
      res.set_content(error_body("data file unavailable"), "application/json");
      return;
    }
    constexpr const char* kType = "application/x-ndjson";
    if (req.has_header("Range")) {
      // Sized provider: the library slices it per the requested ranges.
      res.set_content_provider(impl_->data_size, kType,
                               [file](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                                 std::vector<char> buf(std::min<std::size_t>(length, 1 << 16));
                                 file->clear();
                                 file->seekg(static_cast<std::streamoff>(offset));
                                 file->read(buf.data(), static_cast<std::streamsize>(buf.size()));
                                 const auto got = static_cast<std::size_t>(file->gcount());
                                 return got > 0 && sink.write(buf.data(), got);
                               });
      return;
    }
    res.set_chunked_content_provider(kType, [file](std::size_t, httplib::DataSink& sink) {
      char buf[1 << 16];
      file->read(buf, sizeof(buf));
      const auto got = static_cast<std::size_t>(file->gcount());
      if (got > 0 && !sink.write(buf, got)) return false;
      if (file->eof()) sink.done();
      return true;
    });
  });
}

void ArtifactServer::start() {
  auto& http = impl_->http;
  if (config_.port == 0) {
    port_ = http.bind_to_any_port(config_.host);
  } else {
    port_ = http.bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (port_ < 0) {
    throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port) +
                             " (port in use?)");
  }
  thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void ArtifactServer::stop() {
  if (impl_) impl_->http.stop();
  if (thread_.joinable()) thread_.join();
}

void ArtifactServer::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace atlas
