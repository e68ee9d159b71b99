#pragma once

// Result persistence: run directory with lock file and log, CSV with
// round-trip precision, deterministic JSON, static SVG line plots.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace fracpq::cli {

using Json = nlohmann::ordered_json;

/// Owns an output directory for one process: creates it, holds
/// `<dir>/.fracpq.lock` (O_EXCL) until destruction, appends to run.log.
class RunDirectory {
 public:
  RunDirectory(const std::string& dir, bool deterministic);
  ~RunDirectory();
  RunDirectory(const RunDirectory&) = delete;
  RunDirectory& operator=(const RunDirectory&) = delete;

  std::filesystem::path file(const std::string& name) const { return dir_ / name; }
  void log(const std::string& line);
  void write_text(const std::string& name, const std::string& text);

 private:
  std::filesystem::path dir_;
  std::filesystem::path lock_;
  std::ofstream log_;
  bool deterministic_;
};

/// %.17g
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Non-finite values become null.
Json number(double x);
Json to_json(const std::vector<double>& xs);

std::string dump_json(const Json& j);

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool markers = false;
  /// Per-point marker colors (markers only); empty: series color.
  std::vector<std::string> point_colors;
};

struct SvgPlot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<SvgSeries> series;
  /// Labelled vertical reference lines.
  std::vector<std::pair<double, std::string>> vlines;
  bool log_x = false;
  std::string render() const;
};

}  // namespace fracpq::cli
