#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "acfb/errors.hpp"
#include "acfb/field.hpp"
#include "acfb/minimize.hpp"
#include "acfb/snapshot.hpp"

using namespace acfb;

namespace {

Potential triangle_wells() {
  const double c = std::cos(2.0 * M_PI / 3.0), s = std::sin(2.0 * M_PI / 3.0);
  return Potential::make(2, {{1.0, 0.0}, {c, s}, {c, -s}}, 1.0);
}

GridSpec square_grid(int nodes, double half) {
  GridSpec g;
  g.n = 2;
  g.extents = {nodes, nodes, 1};
  g.h = 2.0 * half / (nodes - 1);
  g.origin = {-half, -half, 0};
  return g;
}

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("constant init fills the well and freezes the ring") {
  Potential p = triangle_wells();
  GridSpec g = square_grid(16, 1.0);
  InitOptions opt;
  opt.mode = InitMode::constant;
  opt.well = 0;
  VectorField f = init_field(g, 2, p, opt);
  for (Index i = 0; i < g.num_nodes(); ++i) {
    CHECK(f.values[i * 2] == 1.0);
    CHECK(f.values[i * 2 + 1] == 0.0);
  }
  int frozen = 0;
  for (auto b : f.frozen) frozen += b;
  CHECK(frozen == 16 * 16 - 14 * 14);
}

TEST_CASE("sector init assigns wells by angle") {
  Potential p = triangle_wells();
  GridSpec g = square_grid(33, 4.0);
  InitOptions opt;
  opt.mode = InitMode::sector_wells;
  VectorField f = init_field(g, 2, p, opt);

  // A node at 10 degrees belongs to the well at angle 0.
  auto value_at_angle = [&](double deg) {
    const double r = 2.0;
    const double x = r * std::cos(deg * M_PI / 180.0), y = r * std::sin(deg * M_PI / 180.0);
    const int i = static_cast<int>(std::lround((x - g.origin[0]) / g.h));
    const int j = static_cast<int>(std::lround((y - g.origin[1]) / g.h));
    return f.at(static_cast<Index>(i) * 33 + j);
  };
  auto near10 = value_at_angle(10.0);
  CHECK(near10[0] == doctest::Approx(1.0));
  auto near110 = value_at_angle(110.0);
  CHECK(near110[0] == doctest::Approx(std::cos(2.0 * M_PI / 3.0)));
  CHECK(near110[1] == doctest::Approx(std::sin(2.0 * M_PI / 3.0)));
}

TEST_CASE("random init is deterministic and stays in the well hull") {
  Potential p = triangle_wells();
  GridSpec g = square_grid(9, 1.0);
  InitOptions opt;
  opt.mode = InitMode::random;
  opt.seed = 7;
  VectorField a = init_field(g, 2, p, opt);
  VectorField b = init_field(g, 2, p, opt);
  CHECK(a.values == b.values);
  for (Index i = 0; i < g.num_nodes(); ++i)
    CHECK(norm2(a.at(i)) <= 1.0 + 1e-12);  // hull of the unit-circle triangle
  opt.seed = 8;
  VectorField c = init_field(g, 2, p, opt);
  CHECK(a.values != c.values);
}

TEST_CASE("radial_connection_bc ramps between the ends") {
  Potential p = Potential::make(1, {{-1.0}, {1.0}}, 1.0);
  GridSpec g;
  g.n = 1;
  g.extents = {11, 1, 1};
  g.h = 0.2;
  g.origin = {-1.0, 0, 0};
  InitOptions opt;
  opt.mode = InitMode::radial_connection_bc;
  VectorField f = init_field(g, 1, p, opt);
  CHECK(f.values.front() == -1.0);
  CHECK(f.values.back() == 1.0);
  CHECK(f.values[5] == doctest::Approx(0.0));
  CHECK(f.frozen[0] == 1);
  CHECK(f.frozen[10] == 1);
  CHECK(f.frozen[5] == 0);
}

TEST_CASE("symmetrize: idempotence and constant-field average") {
  Potential p = triangle_wells();
  GridSpec g = square_grid(33, 2.0);
  SymmetryGroup sym;
  sym.kind = SymmetryKind::triangle_c3v;

  InitOptions opt;
  opt.mode = InitMode::random;
  opt.seed = 3;
  VectorField f = init_field(g, 2, p, opt);

  VectorField once = symmetrize(f, sym, p);
  VectorField twice = symmetrize(once, sym, p);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < once.values.size(); ++i)
    max_diff = std::max(max_diff, std::fabs(once.values[i] - twice.values[i]));
  CHECK(max_diff <= 1e-13);

  // A constant field averages to the well centroid (the origin for this
  // triangle). Checked away from the mirror lines where nearest-node orbit
  // rounding smears over an O(h) band.
  InitOptions copt;
  copt.mode = InitMode::constant;
  copt.well = 0;
  VectorField cf = init_field(g, 2, p, copt);
  VectorField cs = symmetrize(cf, sym, p);
  const Index mid = static_cast<Index>(16) * 33 + 16;  // center: invariant value
  CHECK(std::fabs(cs.values[mid * 2]) <= 1e-12);
  CHECK(std::fabs(cs.values[mid * 2 + 1]) <= 1e-12);
  const Index generic = static_cast<Index>(24) * 33 + 20;  // angle ~27 degrees
  CHECK(std::fabs(cs.values[generic * 2]) <= 1e-12);
  CHECK(std::fabs(cs.values[generic * 2 + 1]) <= 1e-12);
}

TEST_CASE("symmetrize validates the well permutation") {
  Potential p = triangle_wells();
  GridSpec g = square_grid(17, 1.0);
  SymmetryGroup sym;
  sym.kind = SymmetryKind::triangle_c3v;
  InitOptions opt;
  opt.mode = InitMode::constant;
  VectorField f = init_field(g, 2, p, opt);

  const int good[3] = {1, 2, 0};  // images under the 120-degree rotation
  CHECK_NOTHROW(symmetrize(f, sym, p, {good, 3}));
  const int bad[3] = {2, 0, 1};
  CHECK_THROWS_AS(symmetrize(f, sym, p, {bad, 3}), SymmetryMismatch);

  Potential skew = Potential::make(2, {{1.0, 0.0}, {-0.5, 0.9}, {-0.5, -0.9}}, 1.0);
  CHECK_THROWS_AS(symmetrize(f, sym, skew), SymmetryMismatch);
}

TEST_CASE("symmetrize does not raise the energy of equivariant data") {
  Potential p = triangle_wells();
  GridSpec g = square_grid(65, 4.0);
  SymmetryGroup sym;
  sym.kind = SymmetryKind::triangle_c3v;
  InitOptions opt;
  opt.mode = InitMode::sector_wells;
  VectorField f = init_field(g, 2, p, opt);
  const double J0 = energy(f, p);
  VectorField fs = symmetrize(f, sym, p);
  const double J1 = energy(fs, p);
  CHECK(J1 <= J0 + 1e-10 * (1.0 + std::fabs(J0)));
}

TEST_CASE("snapshot round-trip is bit-exact") {
  Potential p = triangle_wells();
  GridSpec g = square_grid(9, 1.0);
  InitOptions opt;
  opt.mode = InitMode::random;
  opt.seed = 1;
  VectorField f = init_field(g, 2, p, opt);
  f.frozen[12] = 1;

  const std::string path = tmp_path("acfb_roundtrip.acfb");
  save_snapshot(f, path);
  VectorField f2 = load_snapshot(path);
  CHECK(f2.values == f.values);
  CHECK(f2.frozen == f.frozen);
  CHECK(f2.spec.h == f.spec.h);
  CHECK(f2.meta.wells == f.meta.wells);
  CHECK(f2.meta.alpha == f.meta.alpha);
  std::filesystem::remove(path);
}

TEST_CASE("snapshot format errors carry offsets") {
  Potential p = triangle_wells();
  GridSpec g = square_grid(5, 1.0);
  InitOptions opt;
  opt.mode = InitMode::constant;
  VectorField f = init_field(g, 2, p, opt);
  const std::string path = tmp_path("acfb_format.acfb");
  save_snapshot(f, path);

  // Truncate and expect the offset of the cut.
  const auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full / 2);
  try {
    load_snapshot(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset == full / 2);
  }

  // Corrupt the magic.
  save_snapshot(f, path);
  {
    std::fstream io(path, std::ios::binary | std::ios::in | std::ios::out);
    io.seekp(0);
    io.put('X');
  }
  CHECK_THROWS_WITH_AS(load_snapshot(path), doctest::Contains("bad magic"), FormatError);

  // Flip a payload byte: checksum must catch it.
  save_snapshot(f, path);
  {
    std::fstream io(path, std::ios::binary | std::ios::in | std::ios::out);
    io.seekp(32);
    io.put('\x7f');
  }
  CHECK_THROWS_WITH_AS(load_snapshot(path), doctest::Contains("checksum"), FormatError);
  std::filesystem::remove(path);
}
