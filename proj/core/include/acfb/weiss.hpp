#pragma once

#include <vector>

#include "acfb/field.hpp"
#include "acfb/interface.hpp"
#include "acfb/potential.hpp"

namespace acfb {

// Scaled boundary-adjusted energy
//   W(u,x0,r) = r^-(n+2k-2) int_{B_r} (|grad u|^2/2 + W(u))
//             - (k/2) r^-(n+2k-1) int_{dB_r} |u-a|^2,   k = 2/(2-alpha),
// with u measured relative to the well nearest u(x0). The 2D sphere integral
// uses 64 equal-angle bilinear samples (the one sanctioned off-node
// interpolation); 1D uses the two interval endpoints.
double weiss_energy(const VectorField& f, const Potential& p, const Point& x0, double r);

struct WeissTrace {
  Point x0 = {0, 0, 0};
  double alpha = 0.0;
  double kappa = 0.0;
  int base_well = 0;
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> dW_forward;     // values[i+1]-values[i], 0 in the last slot
  std::vector<double> error_budget;   // bound for the D_u g term per radius
  std::vector<double> quad_slack;     // declared quadrature allowance per radius
  bool monotone_pass = false;         // every step >= -(integrated budget + slack)
  double worst_margin = 0.0;          // min over steps of dW + allowance
};

WeissTrace weiss_trace(const VectorField& f, const Potential& p, const Point& x0,
                       std::span<const double> radii);

struct GrowthProbe {
  Index node = -1;
  Point x0 = {0, 0, 0};
  double kappa = 0.0;
  std::vector<double> radii;
  std::vector<double> sup_delta;
  std::vector<double> sup_grad;
  ScalingFit fit_delta, fit_grad;
  bool fit_delta_valid = false, fit_grad_valid = false;
  // Free-boundary smallness diagnostics (advisory): delta and |grad u| at x0
  // against 10 h^min(kappa,2) and 10 h^min(kappa-1,1).
  double delta_at_x0 = 0.0, grad_at_x0 = 0.0;
  bool gate_delta_ok = false, gate_grad_ok = false;
};

// Sup of delta and |grad_h u| over balls about a free-boundary node, with
// log-log exponent fits (targets kappa and kappa-1). Throws NotOnFreeBoundary
// unless the node touches both the contact set and the interface.
GrowthProbe growth_probe(const VectorField& f, const Potential& p, const DeltaGrid& d,
                         Index node, std::span<const double> radii, double snap_tol);

// Interface node nearest `near` with at least one contact neighbor.
Index find_free_boundary_node(const DeltaGrid& d, const Point& near, double snap_tol);

struct NondegConstants {
  double theta = 0.0;
  double c = 0.0;
  double dug_sup = 0.0;  // sampled sup of |D_u g| over the well balls
};

// 0.9x the admissible bounds: theta < min{alpha C_g / (4 |D_u g|_inf),
// r0_well} and c < min{alpha(2-alpha) C_g/(8n), (2-alpha)^2 C_g/16}.
NondegConstants select_nondegeneracy_constants(const Potential& p, int n,
                                               int lattice_per_axis = 9);

}  // namespace acfb
