#pragma once

// Minimal static line plots written as SVG.

#include <string>
#include <vector>

namespace tfdw {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = true;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  /// Draw a horizontal reference line at y = 0 (linear y only).
  bool zero_line = false;
  std::vector<PlotSeries> series;
};

/// SVG document for spec.  Points that cannot be shown on a log axis are
/// skipped.
std::string render_svg(const PlotSpec& spec);
void save_svg(const std::string& path, const PlotSpec& spec);

}  // namespace tfdw
