#include "acfb/minimize.hpp"

#include <algorithm>
#include <cmath>

#include "acfb/errors.hpp"

namespace acfb {

double MinimizeConfig::resolved_snap_tol(const Potential& p) const {
  if (snap_tol >= 0.0) return snap_tol;
  return 1e-4 * std::min(p.r0_well(), 1.0);
}

namespace {

struct Strides {
  Index stride[kMaxAxes];
  int n;
  explicit Strides(const GridSpec& s) : n(s.n) {
    Index acc = 1;
    for (int d = s.n - 1; d >= 0; --d) {
      stride[d] = acc;
      acc *= s.extents[d];
    }
  }
};

// Odometer walk over all nodes, tracking the multi-index.
template <typename F>
void for_each_node(const GridSpec& s, F&& fn) {
  int idx[kMaxAxes] = {0, 0, 0};
  const Index nn = s.num_nodes();
  for (Index lin = 0; lin < nn; ++lin) {
    fn(lin, idx);
    for (int d = s.n - 1; d >= 0; --d) {
      if (++idx[d] < s.extents[d]) break;
      idx[d] = 0;
    }
  }
}

double node_weight(const GridSpec& s, const int* idx) {
  double w = 1.0;
  for (int d = 0; d < s.n; ++d)
    if (idx[d] == 0 || idx[d] == s.extents[d] - 1) w *= 0.5;
  return w;
}

double edge_weight(const GridSpec& s, const int* idx, int d) {
  double w = 1.0;
  for (int t = 0; t < s.n; ++t) {
    if (t == d) continue;
    if (idx[t] == 0 || idx[t] == s.extents[t] - 1) w *= 0.5;
  }
  return w;
}

double delta_at(const Potential& p, std::span<const double> u) {
  return p.well_distance(u).second;
}

}  // namespace

double energy(const VectorField& f, const Potential& p) {
  const GridSpec& s = f.spec;
  const Strides st(s);
  const int m = f.m;
  double grad_term = 0.0;
  double pot_term = 0.0;

  for_each_node(s, [&](Index lin, const int* idx) {
    pot_term += node_weight(s, idx) * p.value(f.at(lin));
    for (int d = 0; d < s.n; ++d) {
      if (idx[d] + 1 >= s.extents[d]) continue;
      const Index nb = lin + st.stride[d];
      double d2 = 0.0;
      for (int c = 0; c < m; ++c) {
        const double dv = f.values[nb * m + c] - f.values[lin * m + c];
        d2 += dv * dv;
      }
      grad_term += edge_weight(s, idx, d) * d2;
    }
  });

  const double hn = std::pow(s.h, s.n);
  return hn * (0.5 * grad_term / (s.h * s.h) + pot_term);
}

VectorField gradient(const VectorField& f, const Potential& p, const SingularityPolicy& policy) {
  const GridSpec& s = f.spec;
  const Strides st(s);
  const int m = f.m;
  VectorField g = f;
  std::fill(g.values.begin(), g.values.end(), 0.0);

  const double hn = std::pow(s.h, s.n);
  const double inv_h2 = 1.0 / (s.h * s.h);
  double wu[kMaxComponents];

  for_each_node(s, [&](Index lin, const int* idx) {
    if (f.frozen[lin]) return;
    double acc[kMaxComponents] = {0, 0, 0, 0};
    for (int d = 0; d < s.n; ++d) {
      if (idx[d] + 1 < s.extents[d]) {
        const Index nb = lin + st.stride[d];
        const double w = edge_weight(s, idx, d) * inv_h2;
        for (int c = 0; c < m; ++c)
          acc[c] += w * (f.values[lin * m + c] - f.values[nb * m + c]);
      }
      if (idx[d] > 0) {
        const Index nb = lin - st.stride[d];
        const double w = edge_weight(s, idx, d) * inv_h2;
        for (int c = 0; c < m; ++c)
          acc[c] += w * (f.values[lin * m + c] - f.values[nb * m + c]);
      }
    }
    p.grad(f.at(lin), policy, {wu, static_cast<std::size_t>(m)});
    const double nw = node_weight(s, idx);
    for (int c = 0; c < m; ++c) g.values[lin * m + c] = hn * (acc[c] + nw * wu[c]);
  });
  return g;
}

namespace {

// Local energy delta for moving one free node to v, everything else fixed.
// Unscaled (common positive factor h^n dropped); edge weights are 1 at free
// nodes.
double local_move_delta(const VectorField& f, const Potential& p, const Strides& st,
                        Index lin, const int* idx, std::span<const double> v) {
  const GridSpec& s = f.spec;
  const int m = f.m;
  const double inv_h2 = 1.0 / (s.h * s.h);
  double de = 0.0;
  for (int d = 0; d < s.n; ++d) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      if (sgn > 0 && idx[d] + 1 >= s.extents[d]) continue;
      if (sgn < 0 && idx[d] == 0) continue;
      const Index nb = lin + sgn * st.stride[d];
      for (int c = 0; c < m; ++c) {
        const double un = f.values[nb * m + c];
        const double dn = v[c] - un;
        const double do_ = f.values[lin * m + c] - un;
        de += 0.5 * inv_h2 * (dn * dn - do_ * do_);
      }
    }
  }
  de += p.value(v) - p.value(f.at(lin));
  return de;
}

struct ClampState {
  std::vector<std::uint8_t> clamped;
  int count = 0;
};

// Snap sweep: clamp near-well nodes to the exact well, release clamped nodes
// whose single-node relaxation strictly lowers the energy. Returns the number
// of currently clamped nodes; rolls the whole sweep back if it raised J.
int snap_sweep(VectorField& f, const Potential& p, double snap_tol, ClampState& cs,
               double& J_current) {
  if (snap_tol <= 0.0) return 0;
  const GridSpec& s = f.spec;
  const Strides st(s);
  const int m = f.m;
  std::vector<double> saved = f.values;

  double vtmp[kMaxComponents];
  double vavg[kMaxComponents];
  int count = 0;
  for_each_node(s, [&](Index lin, const int* idx) {
    if (f.frozen[lin]) return;
    const auto u = f.at(lin);
    const auto [wi, delta] = p.well_distance(u);
    const auto a = p.well(wi);

    if (delta > 0.0 && delta < snap_tol) {
      f.set(lin, a);
      cs.clamped[lin] = 1;
    } else if (delta == 0.0) {
      cs.clamped[lin] = 1;
    } else {
      cs.clamped[lin] = 0;
    }

    if (cs.clamped[lin]) {
      // Release test: neighbor average and its midpoint with the well.
      int deg = 0;
      for (int c = 0; c < m; ++c) vavg[c] = 0.0;
      for (int d = 0; d < s.n; ++d) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          if (sgn > 0 && idx[d] + 1 >= s.extents[d]) continue;
          if (sgn < 0 && idx[d] == 0) continue;
          const Index nb = lin + sgn * st.stride[d];
          for (int c = 0; c < m; ++c) vavg[c] += f.values[nb * m + c];
          ++deg;
        }
      }
      for (int c = 0; c < m; ++c) vavg[c] /= deg;
      bool release = false;
      std::span<const double> vs{vavg, static_cast<std::size_t>(m)};
      if (local_move_delta(f, p, st, lin, idx, vs) < 0.0) release = true;
      if (!release) {
        for (int c = 0; c < m; ++c) vtmp[c] = 0.5 * (vavg[c] + a[c]);
        std::span<const double> vh{vtmp, static_cast<std::size_t>(m)};
        if (local_move_delta(f, p, st, lin, idx, vh) < 0.0) release = true;
      }
      if (release) {
        cs.clamped[lin] = 0;
        // A released node keeps its pre-snap value.
        for (int c = 0; c < m; ++c) f.values[lin * m + c] = saved[lin * m + c];
      }
    }
    if (cs.clamped[lin]) ++count;
  });

  const double J_new = energy(f, p);
  if (J_new > J_current + 1e-12 * (1.0 + std::fabs(J_current))) {
    f.values = std::move(saved);
    // Clamp set still follows the (restored) field: exact-well nodes only.
    count = 0;
    for_each_node(s, [&](Index lin, const int*) {
      cs.clamped[lin] = !f.frozen[lin] && delta_at(p, f.at(lin)) == 0.0;
      if (cs.clamped[lin]) ++count;
    });
  } else {
    J_current = std::min(J_current, J_new);
  }
  cs.count = count;
  return count;
}

void project_out(VectorField& g, const std::vector<std::uint8_t>& clamped) {
  const Index nn = g.spec.num_nodes();
  for (Index i = 0; i < nn; ++i)
    if (clamped[i])
      for (int c = 0; c < g.m; ++c) g.values[i * g.m + c] = 0.0;
}

double max_abs(const VectorField& g) {
  double v = 0.0;
  for (double x : g.values) v = std::max(v, std::fabs(x));
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

MinimizeResult run_bb(VectorField f, const Potential& p, const MinimizeConfig& cfg) {
  const GridSpec& s = f.spec;
  const double snap_tol = cfg.resolved_snap_tol(p);

  // Direction gradients use the epsilon-smoothed surrogate when alpha < 1;
  // the line search and the stopping norm stay on the true energy.
  SingularityPolicy dir_policy = cfg.policy;
  if (p.alpha < 1.0 && cfg.policy.mode == SingularityMode::subgradient_zero)
    dir_policy = SingularityPolicy::smoothed(std::max(cfg.policy.eps_reg, 1e-8));

  MinimizeResult res;
  ClampState cs;
  cs.clamped.assign(static_cast<std::size_t>(s.num_nodes()), 0);

  double J = energy(f, p);
  if (!std::isfinite(J)) throw NonFiniteEnergy("non-finite energy at start");
  res.snap_count_trace.push_back(snap_sweep(f, p, snap_tol, cs, J));
  res.energy_trace.push_back(J);

  VectorField g = gradient(f, p, dir_policy);
  project_out(g, cs.clamped);
  double gmax = max_abs(g);

  const double tau0 = std::pow(s.h, 2 - s.n) / (4.0 * s.n + 1.0);
  double tau = tau0;
  std::vector<double> u_prev, g_prev;
  bool have_prev = false;

  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    if (gmax <= cfg.grad_tol) {
      res.converged = true;
      break;
    }

    // Backtracking from the BB step; accepted iterates never raise J.
    const double g2 = dot(g.values, g.values);
    double step = tau;
    VectorField trial = f;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < trial.values.size(); ++i)
        trial.values[i] = f.values[i] - step * g.values[i];
      const double Jt = energy(trial, p);
      if (!std::isfinite(Jt)) {
        step *= 0.5;
        continue;
      }
      if (Jt <= J - 1e-4 * step * g2) {
        u_prev = f.values;
        g_prev = g.values;
        have_prev = true;
        f.values = trial.values;
        J = Jt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stagnation at machine precision
    res.energy_trace.push_back(J);

    if (snap_tol > 0.0 && cfg.snap_every > 0 && (k + 1) % cfg.snap_every == 0) {
      if (cfg.projector) {
        VectorField proj = f;
        cfg.projector(proj);
        const double Jp = energy(proj, p);
        if (std::isfinite(Jp) && Jp <= J + 1e-12 * (1.0 + std::fabs(J))) {
          f = std::move(proj);
          J = std::min(J, Jp);
        }
      }
      res.snap_count_trace.push_back(snap_sweep(f, p, snap_tol, cs, J));
      res.energy_trace.back() = J;
    }

    g = gradient(f, p, dir_policy);
    project_out(g, cs.clamped);
    gmax = max_abs(g);

    // BB1 step from the last accepted move.
    if (have_prev) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double si = f.values[i] - u_prev[i];
        const double yi = g.values[i] - g_prev[i];
        ss += si * si;
        sy += si * yi;
      }
      if (sy > 1e-300 && ss > 0.0)
        tau = std::clamp(ss / sy, 1e-10 * tau0, 1e5 * tau0);
      else
        tau = std::min(step * 2.0, 1e5 * tau0);
    }
  }

  if (!res.converged && gmax <= cfg.grad_tol) res.converged = true;

  // Final consistency polish: one last snap so reported dead cores are exact.
  if (snap_tol > 0.0) {
    res.snap_count_trace.push_back(snap_sweep(f, p, snap_tol, cs, J));
    VectorField gf = gradient(f, p, cfg.policy);
    project_out(gf, cs.clamped);
    gmax = max_abs(gf);
    res.energy_trace.push_back(J);
  }

  res.iterations = k;
  res.final_grad_norm = gmax;
  res.el_residual_interior = el_residual(f, p, snap_tol).interior_resid;
  f.meta.field_bound = f.max_abs_value();
  res.field = std::move(f);
  return res;
}

// Linearly implicit scheme: (I - tau lap_h) u+ = u - tau W_u(u), CG solve per
// component with frozen and clamped rows pinned.
MinimizeResult run_semi_implicit(VectorField f, const Potential& p, const MinimizeConfig& cfg) {
  const GridSpec& s = f.spec;
  const Strides st(s);
  const int m = f.m;
  const double snap_tol = cfg.resolved_snap_tol(p);
  const double inv_h2 = 1.0 / (s.h * s.h);

  MinimizeResult res;
  ClampState cs;
  cs.clamped.assign(static_cast<std::size_t>(s.num_nodes()), 0);

  double J = energy(f, p);
  if (!std::isfinite(J)) throw NonFiniteEnergy("non-finite energy at start");
  res.snap_count_trace.push_back(snap_sweep(f, p, snap_tol, cs, J));
  res.energy_trace.push_back(J);

  const Index nn = s.num_nodes();
  auto pinned = [&](Index i) { return f.frozen[i] || cs.clamped[i]; };

  // y = (I - tau lap_h) x on unpinned rows, identity on pinned rows.
  auto apply_op = [&](double tau, const std::vector<double>& x, std::vector<double>& y) {
    for_each_node(s, [&](Index lin, const int* idx) {
      for (int c = 0; c < m; ++c) {
        const Index ic = lin * m + c;
        if (pinned(lin)) {
          y[ic] = x[ic];
          continue;
        }
        double lap = 0.0;
        for (int d = 0; d < s.n; ++d) {
          if (idx[d] + 1 < s.extents[d]) lap += x[(lin + st.stride[d]) * m + c] - x[ic];
          if (idx[d] > 0) lap += x[(lin - st.stride[d]) * m + c] - x[ic];
        }
        y[ic] = x[ic] - tau * inv_h2 * lap;
      }
    });
  };

  double tau = 0.25 * s.h * s.h * 8.0;  // a few explicit-stable steps worth
  std::vector<double> rhs(f.values.size()), x(f.values.size()), r(f.values.size()),
      pv(f.values.size()), ap(f.values.size());
  double wu[kMaxComponents];

  double gmax = 0.0;
  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    VectorField gproj = gradient(f, p, cfg.policy);
    project_out(gproj, cs.clamped);
    gmax = max_abs(gproj);
    if (gmax <= cfg.grad_tol) {
      res.converged = true;
      break;
    }

    // rhs = u - tau W_u(u) on unpinned rows, u on pinned rows.
    bool accepted = false;
    for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
      for (Index lin = 0; lin < nn; ++lin) {
        if (pinned(lin)) {
          for (int c = 0; c < m; ++c) rhs[lin * m + c] = f.values[lin * m + c];
          continue;
        }
        p.grad(f.at(lin), cfg.policy, {wu, static_cast<std::size_t>(m)});
        for (int c = 0; c < m; ++c) rhs[lin * m + c] = f.values[lin * m + c] - tau * wu[c];
      }

      // Plain CG, fixed order.
      x = f.values;
      apply_op(tau, x, ap);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - ap[i];
      pv = r;
      double rr = dot(r, r);
      const double rr0 = rr;
      for (int it = 0; it < 400 && rr > 1e-24 * (1.0 + rr0); ++it) {
        apply_op(tau, pv, ap);
        const double alpha_cg = rr / std::max(dot(pv, ap), 1e-300);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha_cg * pv[i];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha_cg * ap[i];
        const double rr_new = dot(r, r);
        for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = r[i] + (rr_new / rr) * pv[i];
        rr = rr_new;
      }

      VectorField trial = f;
      trial.values = x;
      const double Jt = energy(trial, p);
      if (std::isfinite(Jt) && Jt <= J + 1e-12 * (1.0 + std::fabs(J))) {
        f.values = std::move(trial.values);
        J = std::min(J, Jt);
        accepted = true;
        tau = std::min(tau * 1.2, 1e4);
      } else {
        tau *= 0.5;
      }
    }
    if (!accepted) break;
    res.energy_trace.push_back(J);

    if (snap_tol > 0.0 && cfg.snap_every > 0 && (k + 1) % cfg.snap_every == 0) {
      res.snap_count_trace.push_back(snap_sweep(f, p, snap_tol, cs, J));
      res.energy_trace.back() = J;
    }
  }

  if (snap_tol > 0.0) res.snap_count_trace.push_back(snap_sweep(f, p, snap_tol, cs, J));
  res.iterations = k;
  res.final_grad_norm = gmax;
  res.el_residual_interior = el_residual(f, p, snap_tol).interior_resid;
  f.meta.field_bound = f.max_abs_value();
  res.field = std::move(f);
  return res;
}

}  // namespace

MinimizeResult minimize(VectorField f, const Potential& p, const MinimizeConfig& cfg) {
  const double snap_tol = cfg.resolved_snap_tol(p);
  if (snap_tol > 0.0 && !(snap_tol < p.r0_well() / 10.0))
    throw ConfigError("snap_tol must be below r0_well/10");
  if (!(cfg.grad_tol > 0.0)) throw ConfigError("grad_tol must be positive");

  if (cfg.scheme == Scheme::semi_implicit) return run_semi_implicit(std::move(f), p, cfg);
  return run_bb(std::move(f), p, cfg);
}

ElResidual el_residual(const VectorField& f, const Potential& p, double snap_tol) {
  const GridSpec& s = f.spec;
  const Strides st(s);
  const int m = f.m;
  const double inv_h2 = 1.0 / (s.h * s.h);
  const bool classical = p.alpha > 1.0;

  ElResidual out;
  out.forcing_form = classical ? "classical" : "chi_dead_core";
  double wu[kMaxComponents];

  for_each_node(s, [&](Index lin, const int* idx) {
    if (f.frozen[lin]) return;
    const double delta = delta_at(p, f.at(lin));
    if (!classical && delta <= snap_tol) return;
    double r2 = 0.0;
    p.grad(f.at(lin), SingularityPolicy::subgradient(), {wu, static_cast<std::size_t>(m)});
    for (int c = 0; c < m; ++c) {
      double lap = 0.0;
      for (int d = 0; d < s.n; ++d) {
        if (idx[d] + 1 < s.extents[d]) lap += f.values[(lin + st.stride[d]) * m + c] - f.values[lin * m + c];
        if (idx[d] > 0) lap += f.values[(lin - st.stride[d]) * m + c] - f.values[lin * m + c];
      }
      const double rc = lap * inv_h2 - wu[c];
      r2 += rc * rc;
    }
    out.interior_resid = std::max(out.interior_resid, std::sqrt(r2));
  });
  return out;
}

Connect1D connect_1d(const Potential& p, int well_i, int well_j, double half_length, int nodes,
                     const MinimizeConfig& cfg) {
  if (p.num_wells() < 2) throw BadInit("connect_1d needs at least two wells");
  if (well_i == well_j) throw BadInit("connect_1d requires distinct wells");
  if (nodes < 8) throw BadInit("connect_1d needs at least 8 nodes");

  GridSpec spec;
  spec.n = 1;
  spec.extents = {nodes, 1, 1};
  spec.h = 2.0 * half_length / (nodes - 1);
  spec.origin = {-half_length, 0.0, 0.0};

  InitOptions opt;
  opt.mode = InitMode::radial_connection_bc;
  opt.well_i = well_i;
  opt.well_j = well_j;
  VectorField f = init_field(spec, p.m, p, opt);

  Connect1D out;
  out.stats = minimize(std::move(f), p, cfg);
  const VectorField& u = out.stats.field;
  const double snap_tol = cfg.resolved_snap_tol(p);

  std::vector<double> delta(nodes);
  for (int i = 0; i < nodes; ++i) delta[i] = delta_at(p, u.at(i));

  int support = 0;
  for (int i = 0; i < nodes; ++i)
    if (delta[i] > snap_tol) ++support;
  out.support_width = spec.h * support;

  if (delta[1] > snap_tol || delta[nodes - 2] > snap_tol)
    throw DomainTooSmall("transition reaches the boundary ring; increase half_length");

  std::vector<int> fb;
  for (int i = 0; i < nodes - 1; ++i) {
    const bool a = delta[i] > snap_tol, b = delta[i + 1] > snap_tol;
    if (a != b) fb.push_back(a ? i : i + 1);  // interface-side node of the crossing
  }
  for (int i : fb) out.free_boundary_positions.push_back(spec.origin[0] + spec.h * i);

  for (int i = 1; i < nodes - 1; ++i) {
    bool near_fb = false;
    for (int j : fb) near_fb = near_fb || std::abs(i - j) <= 1;
    if (near_fb) continue;
    double du2 = 0.0;
    for (int c = 0; c < p.m; ++c) {
      const double d = (u.values[(i + 1) * p.m + c] - u.values[(i - 1) * p.m + c]) / (2.0 * spec.h);
      du2 += d * d;
    }
    out.equip_defect = std::max(out.equip_defect, std::fabs(0.5 * du2 - p.value(u.at(i))));
  }
  return out;
}

}  // namespace acfb
