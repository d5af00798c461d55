#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirac4cfd/error.hpp"
#include "dirac4cfd/grid.hpp"

namespace dirac4cfd::harness {

/// Decimal scientific notation with ten significant digits; "nan" for absent values.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "nan"; }

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

/// Minimal CSV writer: header once, then rows of preformatted cells.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : os_(open_out(path)) {
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

private:
  std::ofstream os_;
};

/// Raw float64 little-endian grid, row-major with rows indexed by x.
inline void write_raw_grid(const std::filesystem::path& path, const std::vector<double>& values) {
  std::ofstream os = open_out(path, std::ios::out | std::ios::binary);
  for (double v : values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) {
      std::uint64_t swapped = 0;
      for (int b = 0; b < 8; ++b) swapped |= ((bits >> (8 * b)) & 0xffu) << (8 * (7 - b));
      bits = swapped;
    }
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    os.write(bytes, 8);
  }
  if (!os) throw Error("failed writing " + path.string());
}

inline std::vector<double> read_raw_grid(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::vector<double> out;
  char bytes[8];
  while (is.read(bytes, 8)) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes, 8);
    if constexpr (std::endian::native == std::endian::big) {
      std::uint64_t swapped = 0;
      for (int b = 0; b < 8; ++b) swapped |= ((bits >> (8 * b)) & 0xffu) << (8 * (7 - b));
      bits = swapped;
    }
    out.push_back(std::bit_cast<double>(bits));
  }
  return out;
}

inline nlohmann::json grid_json(const Grid& g) {
  return {{"dim", g.dim()}, {"a", g.a()}, {"b", g.b()}, {"n", g.n()}, {"h", g.h()}};
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace dirac4cfd::harness
