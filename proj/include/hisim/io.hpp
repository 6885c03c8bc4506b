#pragma once

#include <string>

#include "hisim/ergodic.hpp"
#include "hisim/geometry.hpp"
#include "hisim/potential.hpp"

namespace hisim {

/// Polygon and potentials read from a JSON configuration file.
struct Config {
    StarPolygon polygon;
    Potential V1 = Potential::quadratic(1.0);
    Potential V2 = Potential::quadratic(1.0);
    bool has_potentials = false;  ///< V1 or V2 given explicitly
};

/// Parses a configuration document. Throws DomainError on schema or validation errors.
Config parse_config(const std::string& text);
/// Reads and parses a file. Throws IoError when it cannot be read.
Config load_config(const std::string& path);

std::string read_text(const std::string& path);
/// Throws IoError when the file cannot be written.
void write_text(const std::string& path, const std::string& text);

/// Shortest round-trip decimal form of a double; keeps CSV output byte-stable.
std::string num(double v);

/// Self-contained SVG heat map of a cell field (cell (0, 0) at the lower left).
std::string heatmap_svg(const CellField& f, const std::string& title);

}  // namespace hisim
