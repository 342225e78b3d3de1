#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cvqelm/harness.hpp"

namespace cvqelm {

// Minimal deterministic SVG emission. Coordinates are formatted with fixed
// precision so identical results produce identical bytes.

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

struct Frame {
  double width = 640, height = 440;
  double left = 70, right = 610, top = 30, bottom = 380;

  double sx(double t) const { return left + t * (right - left); }   // t in [0,1]
  double sy(double t) const { return bottom - t * (bottom - top); }
};

void svg_header(std::ostringstream& out, const Frame& f, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
      << f.height << "\" viewBox=\"0 0 " << f.width << " " << f.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt((f.left + f.right) / 2) << "\" y=\"18\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  out << "<line x1=\"" << fmt(f.left) << "\" y1=\"" << fmt(f.bottom) << "\" x2=\"" << fmt(f.right)
      << "\" y2=\"" << fmt(f.bottom) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(f.left) << "\" y1=\"" << fmt(f.bottom) << "\" x2=\"" << fmt(f.left)
      << "\" y2=\"" << fmt(f.top) << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fmt((f.left + f.right) / 2) << "\" y=\"" << fmt(f.bottom + 40)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt((f.top + f.bottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 "
      << fmt((f.top + f.bottom) / 2) << ")\">" << y_label << "</text>\n";
}

struct AccRange {
  double lo = 0.45, hi = 1.0;
  void grow(double v) {
    lo = std::min(lo, v - 0.02);
    hi = std::max(hi, v + 0.02);
  }
  double t(double v) const { return (v - lo) / (hi - lo); }
};

void y_ticks(std::ostringstream& out, const Frame& f, const AccRange& r) {
  for (int k = 0; k <= 5; ++k) {
    const double v = r.lo + (r.hi - r.lo) * k / 5.0;
    const double y = f.sy(double(k) / 5.0);
    out << "<line x1=\"" << fmt(f.left - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(f.left)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(f.left - 8) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt3(v)
        << "</text>\n";
  }
}

}  // namespace

std::string accuracy_vs_size_svg(const SweepResult& result) {
  Frame f;
  std::ostringstream out;
  svg_header(out, f, "Test accuracy vs training size", "n_train", "test accuracy");

  std::vector<int> sizes;
  std::vector<std::string> models;
  for (const SweepCell& c : result.cells) {
    if (std::find(sizes.begin(), sizes.end(), c.n_train) == sizes.end()) sizes.push_back(c.n_train);
    if (std::find(models.begin(), models.end(), c.model) == models.end()) models.push_back(c.model);
  }
  std::sort(sizes.begin(), sizes.end());

  AccRange range;
  for (const SweepCell& c : result.cells) {
    if (c.n_ok == 0) continue;
    range.grow(c.mean_accuracy - (c.std_accuracy ? *c.std_accuracy : 0.0));
    range.grow(c.mean_accuracy + (c.std_accuracy ? *c.std_accuracy : 0.0));
  }
  y_ticks(out, f, range);

  auto x_of = [&](int size) {
    if (sizes.size() <= 1) return f.sx(0.5);
    const double lo = std::log10(double(sizes.front()));
    const double hi = std::log10(double(sizes.back()));
    return f.sx((std::log10(double(size)) - lo) / std::max(1e-12, hi - lo));
  };
  for (int s : sizes) {
    out << "<text x=\"" << fmt(x_of(s)) << "\" y=\"" << fmt(f.bottom + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << s
        << "</text>\n";
  }

  int color_idx = 0;
  for (const std::string& model : models) {
    const char* color = kPalette[color_idx % 6];
    std::ostringstream path;
    bool first = true;
    for (int s : sizes) {
      for (const SweepCell& c : result.cells) {
        if (c.model != model || c.n_train != s || c.n_ok == 0) continue;
        const double x = x_of(s);
        const double y = f.sy(range.t(c.mean_accuracy));
        path << (first ? "M" : " L") << fmt(x) << " " << fmt(y);
        first = false;
        if (c.std_accuracy) {
          const double y1 = f.sy(range.t(c.mean_accuracy - *c.std_accuracy));
          const double y2 = f.sy(range.t(c.mean_accuracy + *c.std_accuracy));
          out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x)
              << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << color << "\"/>\n";
          out << "<line x1=\"" << fmt(x - 4) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x + 4)
              << "\" y2=\"" << fmt(y1) << "\" stroke=\"" << color << "\"/>\n";
          out << "<line x1=\"" << fmt(x - 4) << "\" y1=\"" << fmt(y2) << "\" x2=\"" << fmt(x + 4)
              << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << color << "\"/>\n";
        }
        out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
    }
    if (!first) {
      out << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
    }
    out << "<rect x=\"" << fmt(f.right - 150) << "\" y=\"" << fmt(f.top + 16.0 * color_idx)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << fmt(f.right - 136) << "\" y=\"" << fmt(f.top + 16.0 * color_idx + 9)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << model << "</text>\n";
    ++color_idx;
  }
  out << "</svg>\n";
  return out.str();
}

std::string accuracy_distribution_svg(const SweepResult& result) {
  Frame f;
  std::ostringstream out;
  svg_header(out, f, "Per-run accuracy distributions", "(model, n_train)", "test accuracy");

  AccRange range;
  for (const SweepCell& c : result.cells) {
    for (const RunRecord& r : c.runs) {
      if (r.ok) range.grow(r.test_accuracy);
    }
  }
  y_ticks(out, f, range);

  const std::size_t n_cells = result.cells.size();
  std::map<std::string, int> model_color;
  for (std::size_t i = 0; i < n_cells; ++i) {
    const SweepCell& c = result.cells[i];
    if (model_color.find(c.model) == model_color.end()) {
      const int idx = static_cast<int>(model_color.size());
      model_color[c.model] = idx;
    }
    const char* color = kPalette[model_color[c.model] % 6];
    const double x = f.sx((double(i) + 0.5) / double(std::max<std::size_t>(1, n_cells)));

    int k = 0;
    for (const RunRecord& r : c.runs) {
      if (!r.ok) continue;
      const double jitter = 6.0 * ((double(k % 5) / 4.0) - 0.5);  // deterministic strip
      out << "<circle cx=\"" << fmt(x + jitter) << "\" cy=\"" << fmt(f.sy(range.t(r.test_accuracy)))
          << "\" r=\"2.5\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
      ++k;
    }
    if (c.n_ok > 0) {
      const double ym = f.sy(range.t(c.mean_accuracy));
      out << "<line x1=\"" << fmt(x - 10) << "\" y1=\"" << fmt(ym) << "\" x2=\"" << fmt(x + 10)
          << "\" y2=\"" << fmt(ym) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      if (c.std_accuracy) {
        const double y1 = f.sy(range.t(c.mean_accuracy - *c.std_accuracy));
        const double y2 = f.sy(range.t(c.mean_accuracy + *c.std_accuracy));
        out << "<rect x=\"" << fmt(x - 8) << "\" y=\"" << fmt(std::min(y1, y2)) << "\" width=\"16\" height=\""
            << fmt(std::abs(y1 - y2)) << "\" fill=\"" << color << "\" fill-opacity=\"0.15\"/>\n";
      }
    }
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(f.bottom + 14)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"8\">" << c.model
        << "</text>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(f.bottom + 24)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"8\">n=" << c.n_train
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cvqelm
