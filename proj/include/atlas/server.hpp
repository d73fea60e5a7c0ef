#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "atlas/artifact.hpp"
#include "atlas/search.hpp"

namespace atlas {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path artifact_dir;
  bool cors = false;
};

inline constexpr std::size_t kDefaultSearchLimit = 20;

/// Body served by /api/search and printed by the offline search command.
std::string search_response_json(std::string_view query, std::size_t limit,
                                 const std::vector<SearchResult>& results, bool truncated);

/// Offline search over a loaded artifact, formatted like the HTTP endpoint.
std::string search_artifact(const SearchIndex& index, std::string_view query, std::size_t limit);

/// HTTP front end for one artifact directory. The artifact is loaded and
/// validated on construction and treated as immutable afterwards.
class ArtifactServer {
 public:
  explicit ArtifactServer(ServerConfig config);
  ~ArtifactServer();
  ArtifactServer(const ArtifactServer&) = delete;
  ArtifactServer& operator=(const ArtifactServer&) = delete;

  /// Binds and starts serving on a background thread. Throws when the port
  /// cannot be bound.
  void start();
  /// Stops accepting connections and lets in-flight responses finish.
  void stop();
  /// Blocks until the service stops.
  void wait();

  int port() const { return port_; }
  std::uint64_t requests_served() const { return requests_.load(); }
  const Artifact& artifact() const { return artifact_; }

 private:
  struct Impl;

  void install_routes();

  ServerConfig config_;
  Artifact artifact_;
  std::optional<SearchIndex> index_;
  std::string manifest_body_;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = -1;
  std::atomic<std::uint64_t> requests_{0};
};

}  // namespace atlas
