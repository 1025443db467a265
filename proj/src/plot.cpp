#include "chslab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "chslab/errors.hpp"

namespace chslab {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Round the raw span to a 1-2-5 tick step giving ~5 intervals.
double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  double raw = span / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double frac = raw / mag;
  double step = frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0;
  return step * mag;
}

std::string num_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double map(double v, double p0, double p1) const {
    double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return p0 + t * (p1 - p0);
  }
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double d = std::ceil(lo - 1e-9); d <= hi + 1e-9; d += 1.0) t.push_back(d);
      if (t.size() < 2) t = {lo, hi};
    } else {
      double step = nice_step(hi - lo);
      for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 0.5 * step; v += step)
        t.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
    }
    return t;
  }
};

Axis fit_axis(const std::vector<const std::vector<double>*>& cols, bool log) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* col : cols)
    for (double v : *col) {
      if (!std::isfinite(v) || (log && !(v > 0.0))) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(lo <= hi)) throw DomainError("plot: no finite data to draw");
  Axis a;
  a.log = log;
  if (log) {
    a.lo = std::log10(lo);
    a.hi = std::log10(hi);
  } else {
    a.lo = lo;
    a.hi = hi;
  }
  if (a.hi - a.lo < 1e-12) {
    a.lo -= 0.5;
    a.hi += 0.5;
  } else if (!log) {
    double pad = 0.04 * (a.hi - a.lo);
    a.lo -= pad;
    a.hi += pad;
  }
  return a;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return int(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("csv: cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("csv: '" + path + "' is empty");
  CsvTable t;
  t.names = split_commas(line);
  t.columns.resize(t.names.size());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells = split_commas(line);
    if (cells.size() != t.names.size())
      throw IoError("csv: '" + path + "' line " + std::to_string(lineno) + ": expected " +
                    std::to_string(t.names.size()) + " cells, got " +
                    std::to_string(cells.size()));
    for (size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      double v = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || *end != '\0') v = std::numeric_limits<double>::quiet_NaN();
      t.columns[i].push_back(v);
    }
  }
  return t;
}

void write_svg_line_chart(const std::string& path, const std::vector<PlotSeries>& series,
                          const PlotOptions& opt) {
  if (series.empty()) throw DomainError("plot: no series given");
  const double W = opt.width, H = opt.height;
  const double ml = 78, mr = 24, mt = opt.title.empty() ? 24 : 46, mb = 56;

  std::vector<const std::vector<double>*> xs, ys;
  for (const PlotSeries& s : series) {
    if (s.x.size() != s.y.size()) throw DomainError("plot: series '" + s.name + "' is ragged");
    xs.push_back(&s.x);
    ys.push_back(&s.y);
  }
  Axis ax = fit_axis(xs, opt.logx);
  Axis ay = fit_axis(ys, opt.logy);

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    os << "<text x=\"" << W / 2 << "\" y=\"26\" font-family=\"sans-serif\" font-size=\"16\" "
          "text-anchor=\"middle\">"
       << opt.title << "</text>\n";

  auto px = [&](double v) { return ax.map(v, ml, W - mr); };
  auto py = [&](double v) { return ay.map(v, H - mb, mt); };

  // grid + ticks
  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
  for (double t : ax.ticks()) {
    double v = opt.logx ? std::pow(10.0, t) : t;
    double x = opt.logx ? ax.map(std::pow(10.0, t), ml, W - mr) : px(t);
    if (x < ml - 0.5 || x > W - mr + 0.5) continue;
    os << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << H - mb
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">"
       << num_label(v) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    double v = opt.logy ? std::pow(10.0, t) : t;
    double y = opt.logy ? ay.map(std::pow(10.0, t), H - mb, mt) : py(t);
    if (y < mt - 0.5 || y > H - mb + 0.5) continue;
    os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << W - mr << "\" y2=\"" << y
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << num_label(v)
       << "</text>\n";
  }
  os << "</g>\n";

  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n";
  if (!opt.xlabel.empty())
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 14
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << opt.xlabel
       << "</text>\n";
  if (!opt.ylabel.empty())
    os << "<text x=\"20\" y=\"" << (mt + H - mb) / 2
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\""
       << "rotate(-90 20 " << (mt + H - mb) / 2 << ")\">" << opt.ylabel << "</text>\n";

  // series
  for (size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    bool any = false;
    for (size_t i = 0; i < s.x.size(); ++i) {
      double vx = s.x[i], vy = s.y[i];
      if (!std::isfinite(vx) || !std::isfinite(vy)) continue;
      if ((opt.logx && !(vx > 0.0)) || (opt.logy && !(vy > 0.0))) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(vx), py(vy));
      os << buf;
      any = true;
    }
    os << "\"/>\n";
    if (!any)
      throw DomainError("plot: series '" + s.name + "' has no drawable points");
    // legend entry
    double lx0 = W - mr - 190, ly0 = mt + 10 + 18.0 * double(k);
    os << "<line x1=\"" << lx0 << "\" y1=\"" << ly0 << "\" x2=\"" << lx0 + 26 << "\" y2=\"" << ly0
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << lx0 + 32 << "\" y=\"" << ly0 + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw IoError("plot: cannot write '" + path + "'");
  out << os.str();
  if (!out) throw IoError("plot: write failed for '" + path + "'");
}

}  // namespace chslab
