#pragma once

#include <string>
#include <vector>

#include "topovox/homology.hpp"

namespace topovox {

/// Birth/death scatter with the diagonal; H0 black, H1 red, H2 blue.
/// Every point carries data-dim/data-birth/data-death attributes; essential
/// classes are drawn on the top edge with data-death="inf".
std::string diagram_svg(const PersistenceDiagram& diagram, const std::string& title);

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string group;
};

/// 2D scatter coloured by group, with a legend.
std::string scatter_svg(const std::vector<ScatterPoint>& points, const std::string& title, const std::string& x_label,
                        const std::string& y_label);

}  // namespace topovox
