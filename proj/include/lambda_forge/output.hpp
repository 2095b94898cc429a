#pragma once

// Result files: CSV tables written with 17 significant digits, static SVG
// plots with byte-stable output, and the JSON metadata sidecar.

#include <string>
#include <vector>

#include <json.hpp>

#include "lambda_forge/quantum.hpp"

namespace lf::cli {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const Table& t);
Table read_csv(const std::string& path);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct LinePlot {
  std::string title;
  std::string x_label;  // include units, e.g. "time (us)"
  std::string y_label;
  std::vector<Series> series;
};

/// z(i, j) sits at (x[j], y[i]).
struct Heatmap {
  std::string title;
  std::string x_label, y_label, z_label;
  std::vector<double> x, y;
  RealMatrix z;
};

inline constexpr std::size_t kMaxSvgBytes = 2u << 20;

std::string render_svg(const LinePlot& plot);
std::string render_svg(const Heatmap& map);

/// Writes `text` to `path`, throwing IoError naming the path on failure.
void write_text(const std::string& path, const std::string& text);

struct RunInfo {
  std::string command;
  nlohmann::json config;      // resolved
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;
  nlohmann::json results;     // command-specific summary
};

nlohmann::json metadata(const RunInfo& info);

}  // namespace lf::cli
