#pragma once

#include <string>

#include "sfcplan/occupancy_grid.hpp"

namespace sfcplan {

enum class MapFormat { Binary, Text };

// Binary layout: magic "SFCM", u32 version, f64 origin xyz, f64 resolution,
// u32 dims xyz, then the cells bit-packed LSB-first in index order.
// Text layout: "sfcmap-text 1" header, origin/resolution/dims lines, then one
// "slice <z>" block per layer with '#' for occupied and '.' for free.
void exportMap(const OccupancyGrid& map, const std::string& path, MapFormat format);

// Dispatches on the file's leading bytes. Throws MapIoError on missing files,
// truncated payloads, or malformed headers.
OccupancyGrid importMap(const std::string& path);

}  // namespace sfcplan
