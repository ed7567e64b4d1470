#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cusploc::harness {

enum class SeriesStyle { Line, Points, Steps };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  SeriesStyle style = SeriesStyle::Line;
  // Symmetric error bars, drawn when nonempty.
  std::vector<double> error;
  std::string color;  // empty picks from the palette
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range;
  std::vector<Series> series;
};

std::string xml_escape(const std::string& text);

// Self-contained SVG document with the plots laid out row by row.
std::string render_svg(const std::vector<Plot>& panels, int columns = 1);
inline std::string render_svg(const Plot& plot) { return render_svg(std::vector<Plot>{plot}, 1); }

}  // namespace cusploc::harness
