#include "acfb/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "acfb/errors.hpp"

namespace acfb {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::string loglog_svg(const std::string& title, const std::vector<double>& x,
                       const std::vector<double>& y, double slope, double intercept) {
  const int W = 640, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
  double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
    lx_min = std::min(lx_min, lx.back());
    lx_max = std::max(lx_max, lx.back());
    ly_min = std::min(ly_min, ly.back());
    ly_max = std::max(ly_max, ly.back());
  }
  if (lx.empty()) {
    lx_min = 0;
    lx_max = 1;
    ly_min = 0;
    ly_max = 1;
  }
  if (lx_max - lx_min < 1e-12) lx_max = lx_min + 1;
  if (ly_max - ly_min < 1e-12) ly_max = ly_min + 1;

  auto X = [&](double v) { return ML + (v - lx_min) / (lx_max - lx_min) * (W - ML - MR); };
  auto Y = [&](double v) { return H - MB - (v - ly_min) / (ly_max - ly_min) * (H - MT - MB); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
       std::to_string(W) + "\" height=\"" + std::to_string(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
       title + "</text>\n";
  // axes
  s += "<line x1=\"" + std::to_string(ML) + "\" y1=\"" + std::to_string(H - MB) + "\" x2=\"" +
       std::to_string(W - MR) + "\" y2=\"" + std::to_string(H - MB) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + std::to_string(ML) + "\" y1=\"" + std::to_string(MT) + "\" x2=\"" +
       std::to_string(ML) + "\" y2=\"" + std::to_string(H - MB) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + std::to_string(W / 2) + "\" y=\"" + std::to_string(H - 12) +
       "\" text-anchor=\"middle\" font-size=\"12\">log10 r</text>\n";

  // fitted line over the x range (slope/intercept are natural-log based)
  const double ln10 = std::log(10.0);
  auto fit_ly = [&](double lxv) { return (intercept + slope * lxv * ln10) / ln10; };
  s += "<line x1=\"" + std::to_string(X(lx_min)) + "\" y1=\"" + std::to_string(Y(fit_ly(lx_min))) +
       "\" x2=\"" + std::to_string(X(lx_max)) + "\" y2=\"" + std::to_string(Y(fit_ly(lx_max))) +
       "\" stroke=\"#c03030\" stroke-width=\"1.5\"/>\n";

  for (std::size_t i = 0; i < lx.size(); ++i)
    s += "<circle cx=\"" + std::to_string(X(lx[i])) + "\" cy=\"" + std::to_string(Y(ly[i])) +
         "\" r=\"3.5\" fill=\"#3050c0\"/>\n";

  char label[96];
  std::snprintf(label, sizeof label, "slope %.4f", slope);
  s += "<text x=\"" + std::to_string(W - MR - 8) + "\" y=\"" + std::to_string(MT + 16) +
       "\" text-anchor=\"end\" font-size=\"13\" fill=\"#c03030\">" + label + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace acfb
