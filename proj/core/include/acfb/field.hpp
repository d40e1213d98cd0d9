#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "acfb/potential.hpp"
#include "acfb/types.hpp"

namespace acfb {

// Uniform rectangular grid, same spacing h on every axis. Node (i0,..) sits
// at origin + h*(i0,..); values are stored row-major with the last axis
// fastest.
struct GridSpec {
  int n = 1;
  std::array<int, kMaxAxes> extents = {2, 1, 1};
  double h = 1.0;
  Point origin = {0.0, 0.0, 0.0};

  Index num_nodes() const {
    Index t = 1;
    for (int d = 0; d < n; ++d) t *= extents[d];
    return t;
  }
  Index index(std::span<const int> idx) const {
    Index lin = 0;
    for (int d = 0; d < n; ++d) lin = lin * extents[d] + idx[d];
    return lin;
  }
  void unindex(Index lin, std::span<int> idx) const {
    for (int d = n - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(lin % extents[d]);
      lin /= extents[d];
    }
  }
  Point position(std::span<const int> idx) const {
    Point x = {0, 0, 0};
    for (int d = 0; d < n; ++d) x[d] = origin[d] + h * idx[d];
    return x;
  }
  bool on_boundary(std::span<const int> idx) const {
    for (int d = 0; d < n; ++d)
      if (idx[d] == 0 || idx[d] == extents[d] - 1) return true;
    return false;
  }
  void validate() const;
};

struct FieldMeta {
  double alpha = 0.0;
  int m = 0;
  std::vector<double> wells;  // flat N x m
  double field_bound = 0.0;
};

struct VectorField {
  GridSpec spec;
  int m = 1;
  std::vector<double> values;         // num_nodes * m, node-major
  std::vector<std::uint8_t> frozen;   // dirichlet mask, one byte per node
  FieldMeta meta;

  std::span<double> at(Index node) {
    return {values.data() + node * m, static_cast<std::size_t>(m)};
  }
  std::span<const double> at(Index node) const {
    return {values.data() + node * m, static_cast<std::size_t>(m)};
  }
  void set(Index node, std::span<const double> v) {
    for (int c = 0; c < m; ++c) values[node * m + c] = v[c];
  }
  double max_abs_value() const;
};

enum class InitMode { constant, sector_wells, radial_connection_bc, random };

struct InitOptions {
  InitMode mode = InitMode::constant;
  int well = 0;                     // constant
  Point center = {0, 0, 0};         // sector_wells
  int well_i = 0, well_j = 1;       // radial_connection_bc
  std::vector<double> left_value;   // radial_connection_bc override (1D)
  std::vector<double> right_value;  // radial_connection_bc override (1D)
  std::uint64_t seed = 0;           // random
};

// Builds a field per the requested mode. sector_wells assigns each node the
// well of its angular sector about the center and freezes the outer ring;
// radial_connection_bc makes a 1D linear ramp with frozen ends; random fills
// the interior uniformly in the convex hull of the wells.
VectorField init_field(const GridSpec& spec, int m, const Potential& p, const InitOptions& opt);

enum class SymmetryKind { none, triangle_c3v };

struct SymmetryGroup {
  SymmetryKind kind = SymmetryKind::none;
  Point center = {0, 0, 0};
};

// Projects the field onto the dihedral equivariance class of the equilateral
// triangle (u(gx) = g u(x), 6 elements). Orbits are taken over nearest-node
// group images and each orbit class carries one canonical value transported
// by the representation, so the map is a projection: a second application
// changes nothing beyond roundoff. Rounding costs O(h) accuracy across sector
// boundaries. Frozen nodes and nodes whose orbit leaves the grid are left
// untouched; nodes within 3h of the center take the invariant value 0.
// well_permutation, when nonempty, is the expected image of each well index
// under the 120-degree rotation and is checked against the well geometry.
VectorField symmetrize(const VectorField& f, const SymmetryGroup& g, const Potential& p,
                       std::span<const int> well_permutation = {});

}  // namespace acfb
