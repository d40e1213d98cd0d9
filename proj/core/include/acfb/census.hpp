#pragma once

#include <vector>

#include "acfb/field.hpp"
#include "acfb/potential.hpp"

namespace acfb {

struct CensusConfig {
  double L = 1.0;       // cube side; snapped to a grid multiple
  int k = 4;            // domain is the square of side 2kL about the center
  double theta = 0.5;   // contact threshold (sigma counts |u-a_j| < theta/2)
  double epsilon = 0.05;
  Point center = {0, 0, 0};
};

enum class CubeClass : int { T1 = 1, T2 = 2, T3 = 3, T4 = 4, T5 = 5 };

struct CubeCensus {
  int n = 2;
  int k = 0;
  double L = 0.0;
  double theta = 0.0;
  double epsilon = 0.0;
  int num_wells = 0;
  // Per cube, row-major over the (2k)^n cube lattice.
  std::vector<std::vector<double>> sigma;  // [cube][well]
  std::vector<CubeClass> cls;
  std::vector<int> dominant;  // well of the sigma max when > (1-2eps)L^n, else -1
  std::array<Index, 6> totals = {0, 0, 0, 0, 0, 0};  // totals[1..5]
  Index violations = 0;  // T4/T5 cubes with max |u-a_j0| >= theta inside

  Index total(CubeClass c) const { return totals[static_cast<int>(c)]; }
};

// Sub-cube decomposition with the five-way contact classification:
// T1 boundary cubes, T2 two-phase, T3 far-from-wells, T4 interior contact,
// T5 contact edge. Throws GridTooSmall when the census square leaves the grid.
CubeCensus census(const VectorField& f, const Potential& p, const CensusConfig& cfg);

struct CensusScaling {
  std::vector<int> k_list;
  std::vector<CubeCensus> per_k;
  double slope = 0.0;   // fit of log(|T2|+|T3|+|T5|) vs log k
  double r2 = 0.0;
  bool vacuous = false; // all interface-class counts were zero
  bool pass = false;    // slope <= (n-1) + 0.3, or vacuous
};

CensusScaling census_scaling(const VectorField& f, const Potential& p, const CensusConfig& base,
                             std::span<const int> k_list);

// Smallest L with c (L/4)^{2/(2-alpha)} > 2 theta, rounded up to a multiple
// of 4h.
double select_cube_side(const Potential& p, double c_nondeg, double theta, double h);

}  // namespace acfb
