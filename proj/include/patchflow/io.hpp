#pragma once

// Contour CSV files (header "x,y", one marker per row, no repeated closing
// point), numeric CSV tables and SVG frames.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchflow/geometry.hpp"

namespace patchflow::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, C locale.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

/// Comma-separated table writer.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path), columns_(header.size()) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw IoError("CSV row has the wrong number of columns");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_real(values[i]);
    out_ << '\n';
  }

  /// Row with a leading text cell (e.g. a label or index).
  void row(const std::string& label, const std::vector<double>& values) {
    if (values.size() + 1 != columns_) throw IoError("CSV row has the wrong number of columns");
    out_ << label;
    for (double v : values) out_ << ',' << format_real(v);
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

inline void write_contour_csv(const std::filesystem::path& path, const Contour& c) {
  CsvWriter w(path, {"x", "y"});
  for (const auto& p : c) w.row({p.x, p.y});
}

inline Contour read_contour_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open contour file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty contour file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y") throw IoError(path.string() + ": expected header 'x,y'");
  std::vector<Point2> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      std::size_t used = 0;
      const std::string xs = line.substr(0, comma), ys = line.substr(comma + 1);
      const double x = std::stod(xs, &used);
      if (used != xs.size()) throw std::invalid_argument("x");
      const double y = std::stod(ys, &used);
      if (used != ys.size()) throw std::invalid_argument("y");
      pts.push_back({x, y});
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return Contour(std::move(pts));
}

/// World-space window mapped onto the SVG canvas.
struct ViewBox {
  double xmin{-1.0}, ymin{-1.0}, xmax{1.0}, ymax{1.0};

  /// Bounding box of c grown by a relative margin, made square.
  static ViewBox around(const Contour& c, double margin = 0.1) {
    ViewBox v{c[0].x, c[0].y, c[0].x, c[0].y};
    for (const auto& p : c) {
      v.xmin = std::min(v.xmin, p.x);
      v.xmax = std::max(v.xmax, p.x);
      v.ymin = std::min(v.ymin, p.y);
      v.ymax = std::max(v.ymax, p.y);
    }
    const double cx = 0.5 * (v.xmin + v.xmax), cy = 0.5 * (v.ymin + v.ymax);
    const double half = 0.5 * std::max(v.xmax - v.xmin, v.ymax - v.ymin) * (1.0 + margin);
    return {cx - half, cy - half, cx + half, cy + half};
  }
};

/// One closed path, y axis pointing up, in a fixed 800 x 800 viewBox.
inline void write_svg_frame(const std::filesystem::path& path, const Contour& c, const ViewBox& v,
                            double t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  constexpr double size = 800.0;
  const double sx = size / (v.xmax - v.xmin), sy = size / (v.ymax - v.ymin);
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return std::string(buf);
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" height=\"800\">\n";
  out << "<title>t = " << format_real(t) << "</title>\n";
  out << "<path fill=\"#cfd8e6\" stroke=\"#1b2a41\" stroke-width=\"1\" d=\"";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << (i ? " L" : "M") << num((c[i].x - v.xmin) * sx) << ',' << num((v.ymax - c[i].y) * sy);
  }
  out << " Z\"/>\n</svg>\n";
}

/// frame_0000.svg, frame_0001.svg, ...
inline std::string frame_name(std::size_t index, const char* ext = "svg") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "frame_%04zu.%s", index, ext);
  return buf;
}

}  // namespace patchflow::io
