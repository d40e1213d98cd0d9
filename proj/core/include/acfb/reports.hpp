#pragma once

#include <string>
#include <vector>

namespace acfb {

// 17 significant digits so CSV round-trips are exact.
std::string fmt17(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string to_string() const;
};

void write_text_file(const std::string& path, const std::string& content);

// Minimal SVG 1.1 log-log scatter with the fitted line.
std::string loglog_svg(const std::string& title, const std::vector<double>& x,
                       const std::vector<double>& y, double slope, double intercept);

}  // namespace acfb
