#pragma once

#include <functional>
#include <string>
#include <vector>

#include "acfb/field.hpp"
#include "acfb/potential.hpp"

namespace acfb {

enum class Scheme { gradient_descent_bb, semi_implicit };

struct MinimizeConfig {
  Scheme scheme = Scheme::gradient_descent_bb;
  int max_iters = 20000;
  double grad_tol = 1e-10;     // stop on max-norm of the projected gradient
  double snap_tol = -1.0;      // < 0 means 1e-4 * min(r0_well, 1); 0 disables snapping
  int snap_every = 10;
  std::uint64_t seed = 0;
  SingularityPolicy policy = SingularityPolicy::subgradient();

  // Optional equivariance projection applied at snap sweeps (never raises J
  // beyond the acceptance guard).
  std::function<void(VectorField&)> projector;

  double resolved_snap_tol(const Potential& p) const;
};

struct MinimizeResult {
  VectorField field;
  std::vector<double> energy_trace;  // J after every accepted step
  double final_grad_norm = 0.0;
  double el_residual_interior = 0.0;
  std::vector<int> snap_count_trace;  // clamped-node count per snap sweep
  int iterations = 0;
  bool converged = false;
};

// Discrete energy: h^n * [ sum over axis-edges of w_e * |du|^2 / (2 h^2)
// + sum over nodes of w_x * W(u) ], trapezoid weights on the boundary.
double energy(const VectorField& f, const Potential& p);

// Exact gradient of the discrete energy; zero rows at frozen nodes. At a free
// interior node this is h^n * (-lap_h u + W_u(u)).
VectorField gradient(const VectorField& f, const Potential& p, const SingularityPolicy& policy);

MinimizeResult minimize(VectorField f, const Potential& p, const MinimizeConfig& cfg);

struct ElResidual {
  double interior_resid = 0.0;
  std::string forcing_form;  // "chi_dead_core" (alpha <= 1) or "classical"
};

// Max-norm Euler-Lagrange residual |lap_h u - W_u(u) chi| over free nodes.
// For alpha <= 1 the forcing carries the dead-core indicator, so nodes with
// delta <= snap_tol are outside the classical region and are not scanned.
ElResidual el_residual(const VectorField& f, const Potential& p, double snap_tol);

struct Connect1D {
  MinimizeResult stats;            // stats.field holds the profile
  double support_width = 0.0;      // h * #{delta > snap_tol}
  double equip_defect = 0.0;       // sup |0.5|U'|^2 - W(U)| away from the free boundary
  std::vector<double> free_boundary_positions;
};

// Minimizes the 1D energy with Dirichlet ends a_i, a_j on [-half_length,
// half_length]. Throws DomainTooSmall when the transition reaches the ring.
Connect1D connect_1d(const Potential& p, int well_i, int well_j, double half_length, int nodes,
                     const MinimizeConfig& cfg);

}  // namespace acfb
