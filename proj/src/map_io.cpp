#include "sfcplan/map_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "sfcplan/errors.hpp"

namespace sfcplan {
namespace {

constexpr char kMagic[4] = {'S', 'F', 'C', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr const char* kTextHeader = "sfcmap-text 1";

template <typename T>
void writeRaw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T readRaw(std::istream& is, const std::string& path, const char* what) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw MapIoError("truncated map file reading " + std::string(what) + ": " + path);
  return v;
}

void exportBinary(const OccupancyGrid& map, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw MapIoError("cannot open map file for writing: " + path);
  os.write(kMagic, 4);
  writeRaw(os, kVersion);
  for (int i = 0; i < 3; ++i) writeRaw(os, map.origin()[i]);
  writeRaw(os, map.resolution());
  for (int i = 0; i < 3; ++i) writeRaw(os, static_cast<std::uint32_t>(map.dims()[i]));
  const auto& cells = map.cells();
  std::vector<std::uint8_t> packed((cells.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  os.write(reinterpret_cast<const char*>(packed.data()),
           static_cast<std::streamsize>(packed.size()));
  if (!os) throw MapIoError("failed writing map payload: " + path);
}

void exportText(const OccupancyGrid& map, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw MapIoError("cannot open map file for writing: " + path);
  os << kTextHeader << "\n";
  os << "origin " << map.origin().x() << " " << map.origin().y() << " "
     << map.origin().z() << "\n";
  os << "resolution " << map.resolution() << "\n";
  os << "dims " << map.dims().x() << " " << map.dims().y() << " " << map.dims().z() << "\n";
  for (int z = 0; z < map.dims().z(); ++z) {
    os << "slice " << z << "\n";
    for (int y = 0; y < map.dims().y(); ++y) {
      for (int x = 0; x < map.dims().x(); ++x)
        os << (map.isOccupied(Eigen::Vector3i(x, y, z)) ? '#' : '.');
      os << "\n";
    }
  }
  if (!os) throw MapIoError("failed writing map payload: " + path);
}

OccupancyGrid importBinary(std::ifstream& is, const std::string& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw MapIoError("bad magic in map file: " + path);
  const auto version = readRaw<std::uint32_t>(is, path, "version");
  if (version != kVersion)
    throw MapIoError("unsupported map file version in " + path);
  Eigen::Vector3d origin;
  for (int i = 0; i < 3; ++i) origin[i] = readRaw<double>(is, path, "origin");
  const double resolution = readRaw<double>(is, path, "resolution");
  Eigen::Vector3i dims;
  for (int i = 0; i < 3; ++i)
    dims[i] = static_cast<int>(readRaw<std::uint32_t>(is, path, "dims"));
  if (resolution <= 0.0) throw MapIoError("non-positive resolution in " + path);
  OccupancyGrid map(origin, resolution, dims);
  std::vector<std::uint8_t> packed((map.numCells() + 7) / 8);
  is.read(reinterpret_cast<char*>(packed.data()),
          static_cast<std::streamsize>(packed.size()));
  if (!is) throw MapIoError("truncated map payload in " + path);
  for (std::size_t i = 0; i < map.numCells(); ++i)
    map.cells()[i] = (packed[i / 8] >> (i % 8)) & 1u;
  return map;
}

OccupancyGrid importText(std::ifstream& is, const std::string& path) {
  std::string line;
  if (!std::getline(is, line) || line != kTextHeader)
    throw MapIoError("bad text map header in " + path);
  Eigen::Vector3d origin;
  double resolution = 0;
  Eigen::Vector3i dims;
  {
    std::string key;
    if (!std::getline(is, line)) throw MapIoError("missing origin line in " + path);
    std::istringstream ss(line);
    if (!(ss >> key >> origin.x() >> origin.y() >> origin.z()) || key != "origin")
      throw MapIoError("malformed origin line in " + path);
  }
  {
    std::string key;
    if (!std::getline(is, line)) throw MapIoError("missing resolution line in " + path);
    std::istringstream ss(line);
    if (!(ss >> key >> resolution) || key != "resolution" || resolution <= 0.0)
      throw MapIoError("malformed resolution line in " + path);
  }
  {
    std::string key;
    if (!std::getline(is, line)) throw MapIoError("missing dims line in " + path);
    std::istringstream ss(line);
    if (!(ss >> key >> dims.x() >> dims.y() >> dims.z()) || key != "dims")
      throw MapIoError("malformed dims line in " + path);
  }
  OccupancyGrid map(origin, resolution, dims);
  for (int z = 0; z < dims.z(); ++z) {
    if (!std::getline(is, line) || line.rfind("slice ", 0) != 0)
      throw MapIoError("missing slice header in " + path);
    for (int y = 0; y < dims.y(); ++y) {
      if (!std::getline(is, line) || static_cast<int>(line.size()) < dims.x())
        throw MapIoError("truncated slice row in " + path);
      for (int x = 0; x < dims.x(); ++x) {
        if (line[x] == '#')
          map.setOccupied({x, y, z}, true);
        else if (line[x] != '.')
          throw MapIoError("unexpected cell character in " + path);
      }
    }
  }
  return map;
}

}  // namespace

void exportMap(const OccupancyGrid& map, const std::string& path, MapFormat format) {
  if (format == MapFormat::Binary)
    exportBinary(map, path);
  else
    exportText(map, path);
}

OccupancyGrid importMap(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MapIoError("cannot open map file: " + path);
  char head[4] = {0, 0, 0, 0};
  is.read(head, 4);
  if (!is) throw MapIoError("map file too short: " + path);
  is.seekg(0);
  if (std::memcmp(head, kMagic, 4) == 0) return importBinary(is, path);
  return importText(is, path);
}

}  // namespace sfcplan
