#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acfb/census.hpp"
#include "acfb/field.hpp"
#include "acfb/minimize.hpp"
#include "acfb/potential.hpp"

namespace acfb {

// One typed check evaluated in --check mode; thresholds live in the config
// document so CI runs are self-describing.
struct CheckSpec {
  std::string kind;
  double a = 0.0, b = 0.0, c = 0.0;
};

struct RunConfig {
  std::string raw;  // verbatim config text (hashed into the manifest)

  Potential potential;
  double field_bound = 0.0;

  GridSpec grid;
  int m = 1;
  InitOptions init;
  std::vector<double> bc_left, bc_right;  // optional 1D Dirichlet override

  bool use_symmetry = false;
  SymmetryGroup symmetry;
  std::vector<int> well_permutation;

  MinimizeConfig minimize;
  bool apply_symmetry_in_minimize = false;

  Point center = {0, 0, 0};
  std::vector<double> radii;
  std::vector<double> gammas;
  double c_floor = 0.15;

  std::vector<Point> weiss_probes;
  std::vector<double> weiss_radii;

  Point growth_near = {0, 0, 0};
  std::vector<double> growth_radii;

  CensusConfig census;
  std::vector<int> census_k_list;
  bool census_auto_theta = true;

  int conn_i = 0, conn_j = 1;
  double conn_half_length = 10.0;
  int conn_nodes = 1025;

  std::vector<double> sweep_alphas;

  std::string snapshot_in;  // analyze/weiss/growth/census input override
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  std::vector<CheckSpec> checks;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace acfb
