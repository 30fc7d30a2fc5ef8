// Snapshot binary format, CSV export, and run-directory creation.
#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gradflow/errors.hpp"
#include "gradflow/io.hpp"
#include "helpers.hpp"

using namespace gradflow;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp root, removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gradflow_io_" + std::to_string(Catch::rngSeed()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("binary snapshot round-trips exactly") {
  const Grid g = Grid::make(2.0, 3.0, 8, 6);
  const ScalarField u = testutil::random_field(g, 77);
  TempDir tmp;
  const std::string path = tmp.file("snap.bin");
  write_field_binary(path, u);

  const ScalarField v = read_field_binary(path);
  REQUIRE(v.grid().nx() == 8);
  REQUIRE(v.grid().ny() == 6);
  REQUIRE(v.grid().lx() == 2.0);
  REQUIRE(v.grid().ly() == 3.0);
  for (size_t n = 0; n < u.size(); ++n) REQUIRE(v[n] == u[n]);
}

TEST_CASE("binary snapshot header layout is pinned") {
  const Grid g = Grid::make(2.0, 3.0, 8, 6);
  const ScalarField u = testutil::random_field(g, 78);
  TempDir tmp;
  const std::string path = tmp.file("snap.bin");
  write_field_binary(path, u);

  std::ifstream in(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == 32 + 8 * 6 * sizeof(double));
  REQUIRE(std::memcmp(bytes.data(), "GFSNAP01", 8) == 0);
  std::uint32_t nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  std::memcpy(&nx, bytes.data() + 8, 4);
  std::memcpy(&ny, bytes.data() + 12, 4);
  std::memcpy(&lx, bytes.data() + 16, 8);
  std::memcpy(&ly, bytes.data() + 24, 8);
  REQUIRE(nx == 8);
  REQUIRE(ny == 6);
  REQUIRE(lx == 2.0);
  REQUIRE(ly == 3.0);
  // row-major payload: (i, j) lives at 32 + 8*(j*nx + i)
  double v23 = 0.0;
  std::memcpy(&v23, bytes.data() + 32 + 8 * (3 * 8 + 2), 8);
  REQUIRE(v23 == u.at(2, 3));
}

TEST_CASE("binary snapshot rejects corrupt input") {
  const Grid g = Grid::make(1.0, 1.0, 4, 4);
  const ScalarField u = testutil::random_field(g, 79);
  TempDir tmp;

  SECTION("missing file") {
    REQUIRE_THROWS_AS(read_field_binary(tmp.file("absent.bin")), IoError);
  }
  SECTION("bad magic") {
    const std::string path = tmp.file("bad_magic.bin");
    write_field_binary(path, u);
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("NOTASNAP", 8);
    f.close();
    REQUIRE_THROWS_AS(read_field_binary(path), IoError);
  }
  SECTION("truncated payload") {
    const std::string path = tmp.file("short.bin");
    write_field_binary(path, u);
    fs::resize_file(path, fs::file_size(path) - 8);
    REQUIRE_THROWS_AS(read_field_binary(path), IoError);
  }
  SECTION("odd grid size in header") {
    const std::string path = tmp.file("odd.bin");
    write_field_binary(path, u);
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    const std::uint32_t nx = 5;
    f.seekp(8);
    f.write(reinterpret_cast<const char*>(&nx), 4);
    f.close();
    REQUIRE_THROWS_AS(read_field_binary(path), IoError);
  }
}

TEST_CASE("csv export is headered, complete, and full-precision") {
  const Grid g = Grid::make(1.0, 1.0, 4, 4);
  ScalarField u(g);
  for (size_t n = 0; n < u.size(); ++n) u[n] = 1.0 / 3.0 + static_cast<double>(n);
  std::ostringstream out;
  write_field_csv(out, u);

  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "i,j,x,y,value");
  size_t rows = 0;
  std::string first_row;
  while (std::getline(in, line)) {
    if (rows == 0) first_row = line;
    ++rows;
  }
  REQUIRE(rows == 16);
  // %.17g round-trips doubles exactly
  int i = -1, j = -1;
  double x = 0.0, y = 0.0, value = 0.0;
  REQUIRE(std::sscanf(first_row.c_str(), "%d,%d,%lf,%lf,%lf", &i, &j, &x, &y, &value) == 5);
  REQUIRE(i == 0);
  REQUIRE(j == 0);
  REQUIRE(x == g.x(0));
  REQUIRE(y == g.y(0));
  REQUIRE(value == u.at(0, 0));
}

TEST_CASE("text file round trip and failure modes") {
  TempDir tmp;
  const std::string path = tmp.file("note.txt");
  write_text_file(path, "alpha\nbeta\n");
  REQUIRE(read_text_file(path) == "alpha\nbeta\n");
  REQUIRE_THROWS_AS(read_text_file(tmp.file("nope.txt")), IoError);
}

TEST_CASE("run directories are created fresh and never reused") {
  TempDir tmp;
  const std::string dir = tmp.file("runs/a/b");
  create_run_directory(dir);
  REQUIRE(fs::is_directory(dir));
  REQUIRE_THROWS_AS(create_run_directory(dir), IoError);  // reruns never overwrite

  const std::string blocked = tmp.file("blocked");
  write_text_file(blocked, "x");
  REQUIRE_THROWS_AS(create_run_directory(blocked), IoError);
}
