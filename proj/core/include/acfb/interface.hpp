#pragma once

#include <vector>

#include "acfb/field.hpp"
#include "acfb/potential.hpp"

namespace acfb {

struct DeltaGrid {
  GridSpec spec;
  std::vector<double> delta;      // dist(u(x), wells) per node
  std::vector<int> nearest_well;  // 0-based index per node
};

DeltaGrid delta_field(const VectorField& f, const Potential& p);

// 0 = interface, i+1 = exact contact with well i.
std::vector<int> contact_labels(const DeltaGrid& d);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;  // log of the prefactor
  double r2 = 0.0;
  int dropped = 0;         // non-positive values excluded from the fit
};

// Least squares on (log r, log v); throws DegenerateFit below 4 positive points.
ScalingFit scaling_fit(std::span<const double> radii, std::span<const double> values);

struct InterfaceReport {
  Point center = {0, 0, 0};
  std::vector<double> radii;
  std::vector<double> gammas;
  std::vector<double> measure_I0;                // nodes with delta > 0, x h^n
  std::vector<std::vector<double>> measure_Igamma;  // [gamma][radius]
  std::vector<std::vector<double>> contact_measure; // [well][radius]
  std::vector<double> boundary_length;           // discrete contour length per radius
  std::vector<double> energy_ball;               // localized energy J(B_r)
  ScalingFit fit_I0, fit_boundary, fit_energy;
  bool fits_valid = false;
};

// Node-counting measures inside balls about the center (membership by node
// center), plus the marching-squares boundary length and localized energy.
InterfaceReport interface_measures(const VectorField& f, const Potential& p,
                                   const DeltaGrid& d, const Point& center,
                                   std::span<const double> radii,
                                   std::span<const double> gammas);

// Marching-squares contour length of the 0/nonzero label transition clipped
// to each ball (a discrete surrogate for the reduced boundary). For n=1,
// counts label transitions inside the ball.
std::vector<double> boundary_length(const GridSpec& spec, std::span<const int> labels,
                                    const Point& center, std::span<const double> radii);

struct TwoPhaseCheck {
  std::vector<double> radii;
  std::vector<double> m1, m2;       // top-two per-well contact measures
  std::vector<int> top_well;        // well index of m1 per radius
  double c_floor = 0.0;
  double first_passing_radius = -1.0;
  bool pass = false;                // m2 >= c_floor r^n for all r past the first passing radius
};

TwoPhaseCheck two_phase_check(const GridSpec& spec, std::span<const int> labels, int num_wells,
                              const Point& center, std::span<const double> radii, double c_floor);

// Geometric radii ladder r_j = r_min * ratio^j, capped at r_max.
std::vector<double> radii_ladder(double r_min, double r_max, double ratio);

}  // namespace acfb
