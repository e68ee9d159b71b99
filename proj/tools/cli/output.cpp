#include "output.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>

namespace fracpq::cli {

RunDirectory::RunDirectory(const std::string& dir, bool deterministic)
    : dir_(dir), lock_(std::filesystem::path(dir) / ".fracpq.lock"), deterministic_(deterministic) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw ConfigError("output directory '" + dir + "' is locked by another run (" +
                      lock_.string() + ")");
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
  log_.open(dir_ / "run.log", std::ios::app);
}

RunDirectory::~RunDirectory() {
  std::error_code ec;
  std::filesystem::remove(lock_, ec);
}

void RunDirectory::log(const std::string& line) {
  if (!deterministic_) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S ", std::localtime(&now));
    log_ << stamp;
  }
  log_ << line << '\n';
  log_.flush();
}

void RunDirectory::write_text(const std::string& name, const std::string& text) {
  std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
  out << text;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw std::logic_error("csv row width mismatch");
  rows_.push_back(cells);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double kW = 720.0;
constexpr double kH = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

}  // namespace

std::string SvgPlot::render() const {
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  for (const auto& [x, label] : vlines) {
    if (std::isfinite(x)) {
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(kW / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << esc(title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    const double gx = kLeft + pw * i / 4.0;
    const double gy = kTop + ph * (1.0 - i / 4.0);
    o << "<line x1=\"" << fmt(gx) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(gx) << "\" y2=\""
      << kTop + ph << "\" stroke=\"#eee\"/>\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(gy) << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << fmt(gy) << "\" stroke=\"#eee\"/>\n";
    o << "<text x=\"" << fmt(gx) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
      << tick_label(log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(gy + 4) << "\" text-anchor=\"end\">"
      << tick_label(fy) << "</text>\n";
  }
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << kH - 15
    << "\" text-anchor=\"middle\">" << esc(xlabel) << "</text>\n";
  o << "<text x=\"18\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fmt(kTop + ph / 2) << ")\">" << esc(ylabel) << "</text>\n";

  for (const auto& [x, label] : vlines) {
    if (!std::isfinite(x)) continue;
    o << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(px(x)) << "\" y2=\""
      << kTop + ph << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    o << "<text x=\"" << fmt(px(x) + 3) << "\" y=\"" << kTop + 12 << "\" fill=\"#555\">"
      << esc(label) << "</text>\n";
  }

  double legend_y = kTop + 10;
  for (const auto& s : series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    }
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\""
      << pts.str() << "\"/>\n";
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        const std::string& c = i < s.point_colors.size() ? s.point_colors[i] : s.color;
        o << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
          << "\" r=\"4\" fill=\"" << c << "\"/>\n";
      }
    }
    o << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << fmt(legend_y) << "\" x2=\""
      << kW - kRight + 32 << "\" y2=\"" << fmt(legend_y) << "\" stroke=\"" << s.color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kW - kRight + 38 << "\" y=\"" << fmt(legend_y + 4) << "\">" << esc(s.name)
      << "</text>\n";
    legend_y += 18;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace fracpq::cli
