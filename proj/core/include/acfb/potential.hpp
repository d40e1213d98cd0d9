#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "acfb/types.hpp"

namespace acfb {

// Modulation factor g(u) with an analytic gradient. Only closed-form kinds
// are admitted; no numerical differentiation of g anywhere.
struct Modulation {
  enum class Kind { constant, quadratic_bump };

  Kind kind = Kind::constant;
  double base = 1.0;           // g value (constant) or bump floor
  double amp = 0.0;            // quadratic coefficient (quadratic_bump)
  std::vector<double> center;  // bump center in R^m; empty means origin

  double value(std::span<const double> u) const;
  void gradient(std::span<const double> u, std::span<double> out) const;
  static Modulation constant(double v) { return Modulation{Kind::constant, v, 0.0, {}}; }
};

enum class SingularityMode { subgradient_zero, epsilon_smoothing };

// How grad W is evaluated where the classical formula degenerates: at a well
// the subgradient_zero mode returns 0 (the forcing carries the dead-core
// indicator); epsilon_smoothing replaces |u-a_i| by sqrt(|u-a_i|^2+eps^2).
struct SingularityPolicy {
  SingularityMode mode = SingularityMode::subgradient_zero;
  double eps_reg = 1e-8;

  static SingularityPolicy subgradient() { return {SingularityMode::subgradient_zero, 0.0}; }
  static SingularityPolicy smoothed(double eps) { return {SingularityMode::epsilon_smoothing, eps}; }
};

// Multi-well potential W(u) = (prod_i |u-a_i|^alpha) g(u), alpha in (0,2].
struct Potential {
  int m = 1;                  // codomain dimension
  std::vector<double> wells;  // N x m, row-major
  double alpha = 1.0;
  Modulation g;
  double g_lower_bound = 1.0;

  int num_wells() const { return static_cast<int>(wells.size()) / m; }
  std::span<const double> well(int i) const {
    return {wells.data() + static_cast<std::size_t>(i) * m, static_cast<std::size_t>(m)};
  }

  // Half the minimal pairwise well distance; +inf for a single well.
  double r0_well() const;

  double value(std::span<const double> u) const;
  void grad(std::span<const double> u, const SingularityPolicy& policy,
            std::span<double> out) const;

  // (index of nearest well, distance); ties broken by lowest index.
  std::pair<int, double> well_distance(std::span<const double> u) const;

  static Potential make(int m, std::vector<std::vector<double>> well_list, double alpha,
                        Modulation g = Modulation::constant(1.0), double g_lower_bound = 1.0);
};

struct ValidationReport {
  bool ok = false;
  bool paper_faithful = false;  // N >= 2 and alpha < 2
  double min_g_sampled = std::numeric_limits<double>::infinity();
  std::vector<double> min_g_arg;
  std::vector<std::string> notes;
};

// Samples g on a deterministic lattice over the ball |u| <= field_bound and
// checks H1/H2-style hypotheses. Throws ValidationFailure listing every
// violated hypothesis.
ValidationReport validate(const Potential& p, double field_bound, int lattice_per_axis = 17);

}  // namespace acfb
