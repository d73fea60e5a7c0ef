#include "atlas/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>

#include <json.hpp>

namespace atlas {

using nlohmann::json;

ParseError::ParseError(std::size_t line, std::size_t byte_offset, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + " (byte " +
                         std::to_string(byte_offset) + "): " + message),
      line_(line),
      byte_offset_(byte_offset) {}

PointReader::PointReader(std::istream& in, ParseOptions options)
    : in_(in), options_(std::move(options)) {}

void PointReader::reject(std::size_t offset, std::string message) {
  if (options_.strict) throw ParseError(line_, offset, message);
  diagnostics_.push_back({line_, offset, std::move(message)});
}

namespace {

std::optional<std::string> optional_string(const json& obj, const std::string& key) {
  if (key.empty()) return std::nullopt;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw std::invalid_argument("field '" + key + "' must be a string");
  return it->get<std::string>();
}

double coordinate(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
  if (!it->is_number()) throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

std::optional<PointRecord> PointReader::next() {
  while (std::getline(in_, buffer_)) {
    ++line_;
    const std::size_t line_start = offset_;
    offset_ += buffer_.size() + 1;
    if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
    if (std::all_of(buffer_.begin(), buffer_.end(),
                    [](unsigned char c) { return c == ' ' || c == '\t'; })) {
      continue;
    }

    json obj;
    try {
      obj = json::parse(buffer_);
    } catch (const json::parse_error& e) {
      const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
      reject(line_start + at, "malformed JSON: " + std::string(e.what()));
      continue;
    } catch (const json::out_of_range&) {
      reject(line_start, "number out of range");
      continue;
    }
    if (!obj.is_object()) {
      reject(line_start, "expected a JSON object");
      continue;
    }

    PointRecord record;
    try {
      record.x = coordinate(obj, "x");
      record.y = coordinate(obj, "y");
      record.text = optional_string(obj, "t");
      record.time = optional_string(obj, options_.time_key);
      record.group = optional_string(obj, options_.group_key);
    } catch (const std::invalid_argument& e) {
      reject(line_start, e.what());
      continue;
    }
    if (!std::isfinite(record.x) || !std::isfinite(record.y)) {
      reject(line_start, "non-finite coordinate");
      continue;
    }
    return record;
  }
  return std::nullopt;
}

std::vector<PointRecord> parse_points(std::istream& in, const ParseOptions& options,
                                      std::vector<Diagnostic>* diagnostics) {
  PointReader reader(in, options);
  std::vector<PointRecord> out;
  while (auto record = reader.next()) out.push_back(std::move(*record));
  if (diagnostics) {
    diagnostics->insert(diagnostics->end(), reader.diagnostics().begin(),
                        reader.diagnostics().end());
  }
  return out;
}

std::vector<PointRecord> load_points(const std::filesystem::path& path, const ParseOptions& options,
                                     std::vector<Diagnostic>* diagnostics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_points(in, options, diagnostics);
}

RootBounds infer_bounds(std::span<const PointRecord> points, double pad_fraction) {
  if (points.empty()) throw std::invalid_argument("no points");
  if (!(pad_fraction >= 0.0)) throw std::invalid_argument("pad fraction must be >= 0");

  double xmin = points.front().x, xmax = xmin;
  double ymin = points.front().y, ymax = ymin;
  for (const auto& p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }

  RootBounds b;
  b.pad_fraction = pad_fraction;
  b.cx = xmin + (xmax - xmin) / 2;
  b.cy = ymin + (ymax - ymin) / 2;
  const double extent = std::max(xmax - xmin, ymax - ymin);
  // A single distinct location still needs a non-degenerate square.
  b.side = extent > 0 ? (1.0 + pad_fraction) * extent : 1.0;

  // Rounding in cx +- side/2 can shave the outermost points off; widen by
  // ULPs until the closed square covers them.
  constexpr double inf = std::numeric_limits<double>::infinity();
  while (b.xmin() > xmin || b.xmax() < xmax || b.ymin() > ymin || b.ymax() < ymax) {
    b.side = std::nextafter(b.side, inf);
  }
  return b;
}

void clamp_into(std::span<PointRecord> points, const RootBounds& bounds) {
  const double xmax = bounds.xmax();
  const double ymax = bounds.ymax();
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  for (auto& p : points) {
    if (p.x >= xmax) p.x = std::nextafter(xmax, ninf);
    if (p.y >= ymax) p.y = std::nextafter(ymax, ninf);
  }
}

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::string to_ndjson(const PointRecord& point) {
  std::string line;
  line.reserve(48 + (point.text ? point.text->size() : 0));
  line += "{\"x\":";
  line += format_double(point.x);
  line += ",\"y\":";
  line += format_double(point.y);
  if (point.text) {
    line += ",\"t\":";
    line += json(*point.text).dump();
  }
  if (point.time) {
    line += ",\"time\":";
    line += json(*point.time).dump();
  }
  if (point.group) {
    line += ",\"g\":";
    line += json(*point.group).dump();
  }
  line += '}';
  return line;
}

}  // namespace atlas
