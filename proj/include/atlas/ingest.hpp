#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atlas {

/// One projected embedding point. Its position in the point stream is its
/// implicit index; search results and exemplars refer to points by index.
struct PointRecord {
  double x = 0.0;
  double y = 0.0;
  std::optional<std::string> text;
  std::optional<std::string> time;
  std::optional<std::string> group;

  bool operator==(const PointRecord&) const = default;
};

inline constexpr double kDefaultPadFraction = 0.01;

/// Square root region of the quadtree. Tiles are half-open, so the covered
/// set is [xmin, xmax) x [ymin, ymax).
struct RootBounds {
  double cx = 0.0;
  double cy = 0.0;
  double side = 1.0;
  double pad_fraction = 0.0;

  double xmin() const { return cx - side / 2; }
  double xmax() const { return cx + side / 2; }
  double ymin() const { return cy - side / 2; }
  double ymax() const { return cy + side / 2; }

  bool contains(double x, double y) const {
    return x >= xmin() && x < xmax() && y >= ymin() && y < ymax();
  }

  bool operator==(const RootBounds&) const = default;
};

struct Diagnostic {
  std::size_t line = 0;         // 1-based
  std::size_t byte_offset = 0;  // from the start of the stream
  std::string message;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t byte_offset, const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t line_;
  std::size_t byte_offset_;
};

struct ParseOptions {
  bool strict = false;
  // Input keys that carry the slicing tags. An empty key disables the tag.
  std::string time_key = "time";
  std::string group_key = "g";
};

/// Single-pass ND-JSON reader. Records are produced one line at a time; the
/// stream is never buffered beyond the current line.
class PointReader {
 public:
  explicit PointReader(std::istream& in, ParseOptions options = {});

  /// Next valid record, or nullopt at end of stream. In strict mode any bad
  /// line throws ParseError; otherwise it is skipped and recorded.
  std::optional<PointRecord> next();

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  std::size_t lines_read() const { return line_; }

 private:
  void reject(std::size_t offset, std::string message);

  std::istream& in_;
  ParseOptions options_;
  std::size_t line_ = 0;
  std::size_t offset_ = 0;
  std::string buffer_;
  std::vector<Diagnostic> diagnostics_;
};

std::vector<PointRecord> parse_points(std::istream& in, const ParseOptions& options = {},
                                      std::vector<Diagnostic>* diagnostics = nullptr);

std::vector<PointRecord> load_points(const std::filesystem::path& path,
                                     const ParseOptions& options = {},
                                     std::vector<Diagnostic>* diagnostics = nullptr);

/// Smallest square, padded by pad_fraction, holding every point. Throws on
/// empty input.
RootBounds infer_bounds(std::span<const PointRecord> points,
                        double pad_fraction = kDefaultPadFraction);

/// Pull coordinates lying on (or past, after rounding) the max edges one ULP
/// inward so every point falls inside a half-open tile.
void clamp_into(std::span<PointRecord> points, const RootBounds& bounds);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// One ND-JSON line (no trailing newline) in the input schema.
std::string to_ndjson(const PointRecord& point);

}  // namespace atlas
