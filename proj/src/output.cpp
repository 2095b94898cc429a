#include "lambda_forge/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Core>

#include "lambda_forge/errors.hpp"

namespace lf::cli {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo, hi;
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Range padded(double lo, double hi) {
  if (hi - lo <= 1e-300 * std::max(1.0, std::abs(lo))) {
    const double pad = lo == 0.0 ? 0.5 : 0.1 * std::abs(lo);
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

// Plot area inside a fixed canvas.
constexpr double kW = 720, kH = 480, kL = 80, kR = 150, kT = 40, kB = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr long kMaxCells = 20000;

void header(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text class=\"title\" x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
}

void axes(std::ostringstream& os, const Range& xr, const Range& yr, const std::string& xl, const std::string& yl) {
  const double x0 = kL, x1 = kW - kR, y0 = kH - kB, y1 = kT;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double px = xr.map(fx, x0, x1);
    os << "<line x1=\"" << fixed(px, 2) << "\" y1=\"" << y0 << "\" x2=\"" << fixed(px, 2) << "\" y2=\"" << y0 + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fixed(px, 2) << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">" << tick_label(fx)
       << "</text>\n";
    const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    const double py = yr.map(fy, y0, y1);
    os << "<line x1=\"" << x0 - 5 << "\" y1=\"" << fixed(py, 2) << "\" x2=\"" << x0 << "\" y2=\"" << fixed(py, 2)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x0 - 8 << "\" y=\"" << fixed(py + 4, 2) << "\" text-anchor=\"end\">" << tick_label(fy)
       << "</text>\n";
  }
  os << "<text class=\"xlabel\" x=\"" << (x0 + x1) / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">"
     << escape(xl) << "</text>\n";
  os << "<text class=\"ylabel\" transform=\"translate(18," << (y0 + y1) / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

void annotate(std::ostringstream& os, const char* kind, double v, double y) {
  os << "<text class=\"annotation\" data-kind=\"" << kind << "\" data-value=\"" << g17(v) << "\" x=\""
     << kW - kR + 10 << "\" y=\"" << y << "\">" << kind << " = " << tick_label(v) << "</text>\n";
}

std::string finish(std::ostringstream& os) {
  os << "</svg>\n";
  std::string s = os.str();
  if (s.size() > kMaxSvgBytes) throw ContractViolation("svg: rendered output exceeds 2 MB");
  return s;
}

// Monotone ramp: linear in RGB between a dark and a light endpoint, so
// luminance increases strictly with the value.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(13 + t * (240 - 13)));
  const int g = static_cast<int>(std::lround(8 + t * (249 - 8)));
  const int b = static_cast<int>(std::lround(135 + t * (33 - 135)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_csv(const std::string& path, const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
  s += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw ContractViolation("write_csv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + g17(row[i]);
    s += '\n';
  }
  write_text(path, s);
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) return t;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string render_svg(const LinePlot& plot) {
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  std::size_t points = 0;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw ContractViolation("render_svg: series x/y lengths differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
    points += s.x.size();
  }
  if (points == 0) throw ContractViolation("render_svg: no data");
  const Range xr = padded(xlo, xhi), yr = padded(ylo, yhi);

  std::ostringstream os;
  header(os, plot.title);
  axes(os, xr, yr, plot.x_label, plot.y_label);
  const double x0 = kL, x1 = kW - kR, y0 = kH - kB, y1 = kT;
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    if (s.x.empty()) continue;
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 4000);
    if (s.x.size() == 1) {
      os << "<circle cx=\"" << fixed(xr.map(s.x[0], x0, x1), 2) << "\" cy=\"" << fixed(yr.map(s.y[0], y0, y1), 2)
         << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); i += stride) {
        os << (i ? " " : "") << fixed(xr.map(s.x[i], x0, x1), 2) << ',' << fixed(yr.map(s.y[i], y0, y1), 2);
      }
      os << "\"/>\n";
    }
    os << "<text x=\"" << x1 + 10 << "\" y=\"" << y1 + 14 + 16 * k << "\" fill=\"" << colour << "\">"
       << escape(s.name) << "</text>\n";
  }
  annotate(os, "min", ylo, y0 - 16);
  annotate(os, "max", yhi, y0);
  return finish(os);
}

std::string render_svg(const Heatmap& m) {
  const auto ny = static_cast<Eigen::Index>(m.y.size());
  const auto nx = static_cast<Eigen::Index>(m.x.size());
  if (nx == 0 || ny == 0) throw ContractViolation("render_svg: empty heatmap");
  if (m.z.rows() != ny || m.z.cols() != nx) throw ContractViolation("render_svg: z shape differs from axes");
  const double zlo = m.z.minCoeff(), zhi = m.z.maxCoeff();
  const Range zr = padded(zlo, zhi);
  const Range xr = padded(*std::min_element(m.x.begin(), m.x.end()), *std::max_element(m.x.begin(), m.x.end()));
  const Range yr = padded(*std::min_element(m.y.begin(), m.y.end()), *std::max_element(m.y.begin(), m.y.end()));

  std::ostringstream os;
  header(os, m.title);
  const double x0 = kL, x1 = kW - kR, y0 = kH - kB, y1 = kT;
  const double cw = (x1 - x0) / static_cast<double>(nx), ch = (y0 - y1) / static_cast<double>(ny);
  // Cells are laid out by index so unevenly spaced grids still tile the plot.
  Eigen::Index sx = 1, sy = 1;
  while (((nx + sx - 1) / sx) * ((ny + sy - 1) / sy) > kMaxCells) {
    ((nx + sx - 1) / sx >= (ny + sy - 1) / sy ? sx : sy) += 1;
  }
  for (Eigen::Index i = 0; i < ny; i += sy) {
    for (Eigen::Index j = 0; j < nx; j += sx) {
      os << "<rect x=\"" << fixed(x0 + j * cw, 2) << "\" y=\"" << fixed(y0 - (i + sy) * ch, 2) << "\" width=\""
         << fixed(cw * sx + 0.05, 2) << "\" height=\"" << fixed(ch * sy + 0.05, 2) << "\" fill=\""
         << ramp((m.z(i, j) - zr.lo) / (zr.hi - zr.lo)) << "\"/>\n";
    }
  }
  axes(os, xr, yr, m.x_label, m.y_label);
  for (int k = 0; k < 32; ++k) {
    const double t = k / 31.0;
    os << "<rect x=\"" << x1 + 10 << "\" y=\"" << fixed(y0 - 80 - (k + 1) * 6.0, 2)
       << "\" width=\"14\" height=\"6.1\" fill=\"" << ramp(t) << "\"/>\n";
  }
  os << "<text x=\"" << x1 + 30 << "\" y=\"" << y0 - 80 << "\">" << tick_label(zr.lo) << "</text>\n";
  os << "<text x=\"" << x1 + 30 << "\" y=\"" << y0 - 80 - 32 * 6 + 10 << "\">" << tick_label(zr.hi) << "</text>\n";
  os << "<text class=\"zlabel\" x=\"" << x1 + 10 << "\" y=\"" << y0 - 80 - 32 * 6 - 8 << "\">" << escape(m.z_label)
     << "</text>\n";
  annotate(os, "min", zlo, y0 - 16);
  annotate(os, "max", zhi, y0);
  return finish(os);
}

nlohmann::json metadata(const RunInfo& info) {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(info.config_hash));
  nlohmann::json j;
  j["command"] = info.command;
  j["config"] = info.config;
  j["config_hash"] = std::string("fnv1a64:") + hash;
  j["versions"] = {{"lambda_forge", "0.1.0"},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__}};
  j["wall_seconds"] = info.wall_seconds;
  j["results"] = info.results;
  return j;
}

}  // namespace lf::cli
