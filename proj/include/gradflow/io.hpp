// io.hpp — field snapshots and small filesystem helpers.
//
// Snapshot format: 32-byte header followed by the row-major little-endian f64
// samples. Header layout (offsets in bytes):
//   0  : 8-byte magic "GFSNAP01"
//   8  : uint32 Nx
//   12 : uint32 Ny
//   16 : f64 Lx
//   24 : f64 Ly
// The CSV export writes one node per row as (i, j, x, y, value) with %.17g so
// values round-trip exactly through text.
#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "gradflow/grid.hpp"

namespace gradflow {

inline constexpr char kSnapshotMagic[8] = {'G', 'F', 'S', 'N', 'A', 'P', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "snapshot files are little-endian; big-endian hosts are unsupported");

inline void write_field_binary(const std::string& path, const ScalarField& u) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  char header[32] = {};
  std::memcpy(header, kSnapshotMagic, 8);
  const std::uint32_t nx = static_cast<std::uint32_t>(u.grid().nx());
  const std::uint32_t ny = static_cast<std::uint32_t>(u.grid().ny());
  const double lx = u.grid().lx(), ly = u.grid().ly();
  std::memcpy(header + 8, &nx, 4);
  std::memcpy(header + 12, &ny, 4);
  std::memcpy(header + 16, &lx, 8);
  std::memcpy(header + 24, &ly, 8);
  out.write(header, sizeof(header));
  out.write(reinterpret_cast<const char*>(u.values().data()),
            static_cast<std::streamsize>(u.size() * sizeof(double)));
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline ScalarField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  char header[32];
  in.read(header, sizeof(header));
  if (!in || std::memcmp(header, kSnapshotMagic, 8) != 0)
    throw IoError("'" + path + "' is not a field snapshot (bad magic)");
  std::uint32_t nx, ny;
  double lx, ly;
  std::memcpy(&nx, header + 8, 4);
  std::memcpy(&ny, header + 12, 4);
  std::memcpy(&lx, header + 16, 8);
  std::memcpy(&ly, header + 24, 8);
  if (nx < 4 || ny < 4 || nx % 2 || ny % 2 || !(lx > 0.0) || !(ly > 0.0))
    throw IoError("'" + path + "' has an invalid snapshot header");
  ScalarField u(Grid::make(lx, ly, static_cast<int>(nx), static_cast<int>(ny)));
  in.read(reinterpret_cast<char*>(u.values().data()),
          static_cast<std::streamsize>(u.size() * sizeof(double)));
  if (!in || in.gcount() != static_cast<std::streamsize>(u.size() * sizeof(double)))
    throw IoError("'" + path + "' is truncated");
  return u;
}

inline void write_field_csv(std::ostream& out, const ScalarField& u) {
  out << "i,j,x,y,value\n";
  const Grid& g = u.grid();
  char buf[160];
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", i, j, g.x(i), g.y(j),
                    u.at(i, j));
      out << buf;
    }
}

inline void write_field_csv_file(const std::string& path, const ScalarField& u) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_field_csv(out, u);
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return s;
}

// Creates a fresh run directory. Parents are created as needed; the leaf must
// not already exist so reruns never overwrite previous artifacts.
inline void create_run_directory(const std::string& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(path, ec))
    throw IoError("output directory '" + path + "' already exists; refusing to overwrite");
  if (!fs::create_directories(path, ec) || ec)
    throw IoError("cannot create output directory '" + path + "': " + ec.message());
}

}  // namespace gradflow
