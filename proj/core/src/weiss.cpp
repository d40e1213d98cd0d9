#include "acfb/weiss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acfb/errors.hpp"

namespace acfb {

namespace {

constexpr int kSphereSamples = 64;

void check_ball(const GridSpec& s, const Point& x0, double r) {
  for (int d = 0; d < s.n; ++d) {
    const double lo = s.origin[d], hi = s.origin[d] + s.h * (s.extents[d] - 1);
    if (x0[d] - r < lo - 1e-12 || x0[d] + r > hi + 1e-12)
      throw BallOutOfGrid("ball of radius " + std::to_string(r) + " leaves the grid");
  }
}

double kappa_of(const Potential& p) {
  if (!(p.alpha < 2.0)) throw Error("weiss scaling requires alpha < 2");
  return 2.0 / (2.0 - p.alpha);
}

// Energy density at a node: centered differences interior, one-sided at the
// ring, measured with u shifted by the base well (shift drops out of grad).
struct DensityField {
  const VectorField& f;
  const Potential& p;
  Index strides[kMaxAxes];

  DensityField(const VectorField& field, const Potential& pot) : f(field), p(pot) {
    Index acc = 1;
    for (int d = field.spec.n - 1; d >= 0; --d) {
      strides[d] = acc;
      acc *= field.spec.extents[d];
    }
  }

  double grad2(Index lin, const int* idx) const {
    const GridSpec& s = f.spec;
    double g2 = 0.0;
    for (int d = 0; d < s.n; ++d) {
      const bool lo = idx[d] > 0, hi = idx[d] + 1 < s.extents[d];
      for (int c = 0; c < f.m; ++c) {
        const double va = lo ? f.values[(lin - strides[d]) * f.m + c] : f.values[lin * f.m + c];
        const double vb = hi ? f.values[(lin + strides[d]) * f.m + c] : f.values[lin * f.m + c];
        const double dv = (vb - va) / (((lo && hi) ? 2.0 : 1.0) * s.h);
        g2 += dv * dv;
      }
    }
    return g2;
  }

  double operator()(Index lin, const int* idx) const {
    return 0.5 * grad2(lin, idx) + p.value(f.at(lin));
  }
};

template <typename F>
void walk(const GridSpec& s, F&& fn) {
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

// ---- 1D quadrature helpers: per-cell quadratic reconstruction -------------

// Integral over [a,b] (inside the grid) of the piecewise-quadratic
// reconstruction of nodal samples vals.
double integrate_1d(const GridSpec& s, const std::vector<double>& vals, double a, double b) {
  if (b <= a) return 0.0;
  const double x0 = s.origin[0];
  const int last = s.extents[0] - 1;
  const int ka = std::clamp(static_cast<int>(std::floor((a - x0) / s.h)), 0, last - 1);
  const int kb = std::clamp(static_cast<int>(std::ceil((b - x0) / s.h)) - 1, 0, last - 1);
  double total = 0.0;
  for (int k = ka; k <= kb; ++k) {
    const double xa = std::max(a, x0 + s.h * k);
    const double xb = std::min(b, x0 + s.h * (k + 1));
    if (xb <= xa) continue;
    const int c = std::clamp(k, 1, last - 1);  // quadratic through c-1, c, c+1
    const double f0 = vals[c - 1], f1 = vals[c], f2 = vals[c + 1];
    const double lin = 0.5 * (f2 - f0);
    const double quad = 0.5 * (f2 - 2.0 * f1 + f0);
    auto antider = [&](double x) {
      const double t = (x - (x0 + s.h * c)) / s.h;
      return s.h * (f1 * t + 0.5 * lin * t * t + quad * t * t * t / 3.0);
    };
    total += antider(xb) - antider(xa);
  }
  return total;
}

// Quadratic interpolation of one component at physical x (1D).
double interp_quadratic_1d(const GridSpec& s, const VectorField& f, int comp, double x) {
  const int last = s.extents[0] - 1;
  const int c = std::clamp(static_cast<int>(std::lround((x - s.origin[0]) / s.h)), 1, last - 1);
  const double t = (x - (s.origin[0] + s.h * c)) / s.h;
  const double f0 = f.values[static_cast<Index>(c - 1) * f.m + comp];
  const double f1 = f.values[static_cast<Index>(c) * f.m + comp];
  const double f2 = f.values[static_cast<Index>(c + 1) * f.m + comp];
  return f1 + 0.5 * (f2 - f0) * t + 0.5 * (f2 - 2.0 * f1 + f0) * t * t;
}

double bilinear(const VectorField& f, double px, double py, int c) {
  const auto& s = f.spec;
  double gx = std::clamp((px - s.origin[0]) / s.h, 0.0, static_cast<double>(s.extents[0] - 1));
  double gy = std::clamp((py - s.origin[1]) / s.h, 0.0, static_cast<double>(s.extents[1] - 1));
  const int i0 = std::min(static_cast<int>(gx), s.extents[0] - 2);
  const int j0 = std::min(static_cast<int>(gy), s.extents[1] - 2);
  const double fx = gx - i0, fy = gy - j0;
  const Index e1 = s.extents[1];
  const Index b = (static_cast<Index>(i0) * e1 + j0) * f.m + c;
  const double v00 = f.values[b], v01 = f.values[b + f.m];
  const double v10 = f.values[b + e1 * f.m], v11 = f.values[b + (e1 + 1) * f.m];
  return (1 - fx) * ((1 - fy) * v00 + fy * v01) + fx * ((1 - fy) * v10 + fy * v11);
}

struct WeissParts {
  double volume = 0.0;    // scaled volume term
  double boundary = 0.0;  // scaled boundary term (subtracted)
  double shell = 0.0;     // scaled integral over the annulus r +- 2h
  double u2_ball = 0.0;   // int_{B_r} |u-a|^2 (unscaled)
  double u1a_ball = 0.0;  // int_{B_r} |u-a|^{1+alpha} (unscaled)
  double dug_sup = 0.0;   // sup |D_u g| over ball nodes
};

WeissParts weiss_parts(const VectorField& f, const Potential& p, const Point& x0, double r,
                       int base_well) {
  const GridSpec& s = f.spec;
  const double kappa = kappa_of(p);
  const auto a = p.well(base_well);
  const DensityField dens(f, p);
  WeissParts out;

  const double vol_scale = std::pow(r, -(s.n + 2.0 * kappa - 2.0));
  const double bd_scale = 0.5 * kappa * std::pow(r, -(s.n + 2.0 * kappa - 1.0));

  if (s.n == 1) {
    const Index nn = s.num_nodes();
    std::vector<double> dvals(nn), u2(nn), u1a(nn);
    int idx1[1];
    for (Index i = 0; i < nn; ++i) {
      idx1[0] = static_cast<int>(i);
      dvals[i] = dens(i, idx1);
      double d2 = 0.0;
      for (int c = 0; c < f.m; ++c) {
        const double dv = f.values[i * f.m + c] - a[c];
        d2 += dv * dv;
      }
      u2[i] = d2;
      u1a[i] = std::pow(d2, 0.5 * (1.0 + p.alpha));
      double dg[kMaxComponents] = {0, 0, 0, 0};
      p.g.gradient(f.at(i), {dg, static_cast<std::size_t>(f.m)});
      const double xi = s.origin[0] + s.h * i;
      if (std::fabs(xi - x0[0]) <= r + 2 * s.h)
        out.dug_sup = std::max(out.dug_sup, std::sqrt(norm2({dg, static_cast<std::size_t>(f.m)})));
    }
    out.volume = vol_scale * integrate_1d(s, dvals, x0[0] - r, x0[0] + r);
    out.shell = vol_scale * (integrate_1d(s, dvals, x0[0] - r - 2 * s.h, x0[0] - r + 2 * s.h) +
                             integrate_1d(s, dvals, x0[0] + r - 2 * s.h, x0[0] + r + 2 * s.h));
    double bsum = 0.0;
    for (double e : {x0[0] - r, x0[0] + r}) {
      double d2 = 0.0;
      for (int c = 0; c < f.m; ++c) {
        const double v = interp_quadratic_1d(s, f, c, e) - a[c];
        d2 += v * v;
      }
      bsum += d2;
    }
    out.boundary = bd_scale * bsum;
    out.u2_ball = integrate_1d(s, u2, x0[0] - r, x0[0] + r);
    out.u1a_ball = integrate_1d(s, u1a, x0[0] - r, x0[0] + r);
    return out;
  }

  if (s.n != 2) throw Error("weiss_energy supports n in {1,2}");

  const double hn = s.h * s.h;
  double vol = 0.0, shell = 0.0, u2i = 0.0, u1ai = 0.0, dug = 0.0;
  walk(s, [&](Index lin, const int* idx) {
    double r2 = 0.0;
    for (int d = 0; d < 2; ++d) {
      const double dx = s.origin[d] + s.h * idx[d] - x0[d];
      r2 += dx * dx;
    }
    const double rr = std::sqrt(r2);
    if (rr <= r + 2 * s.h && rr >= r - 2 * s.h) shell += dens(lin, idx) * hn;
    if (rr > r) return;
    vol += dens(lin, idx) * hn;
    double d2 = 0.0;
    for (int c = 0; c < f.m; ++c) {
      const double dv = f.values[lin * f.m + c] - a[c];
      d2 += dv * dv;
    }
    u2i += d2 * hn;
    u1ai += std::pow(d2, 0.5 * (1.0 + p.alpha)) * hn;
    double dg[kMaxComponents] = {0, 0, 0, 0};
    p.g.gradient(f.at(lin), {dg, static_cast<std::size_t>(f.m)});
    dug = std::max(dug, std::sqrt(norm2({dg, static_cast<std::size_t>(f.m)})));
  });

  double bsum = 0.0;
  for (int k = 0; k < kSphereSamples; ++k) {
    const double th = 2.0 * M_PI * k / kSphereSamples;
    const double px = x0[0] + r * std::cos(th), py = x0[1] + r * std::sin(th);
    double d2 = 0.0;
    for (int c = 0; c < f.m; ++c) {
      const double v = bilinear(f, px, py, c) - a[c];
      d2 += v * v;
    }
    bsum += d2;
  }
  bsum *= 2.0 * M_PI * r / kSphereSamples;  // trapezoid on the closed circle

  out.volume = vol_scale * vol;
  out.shell = vol_scale * shell;
  out.boundary = bd_scale * bsum;
  out.u2_ball = u2i;
  out.u1a_ball = u1ai;
  out.dug_sup = dug;
  return out;
}

int base_well_at(const VectorField& f, const Potential& p, const Point& x0) {
  const GridSpec& s = f.spec;
  int idx[kMaxAxes] = {0, 0, 0};
  for (int d = 0; d < s.n; ++d)
    idx[d] = std::clamp(static_cast<int>(std::lround((x0[d] - s.origin[d]) / s.h)), 0,
                        s.extents[d] - 1);
  Index lin = 0;
  for (int d = 0; d < s.n; ++d) lin = lin * s.extents[d] + idx[d];
  return p.well_distance(f.at(lin)).first;
}

}  // namespace

double weiss_energy(const VectorField& f, const Potential& p, const Point& x0, double r) {
  check_ball(f.spec, x0, r);
  const auto parts = weiss_parts(f, p, x0, r, base_well_at(f, p, x0));
  return parts.volume - parts.boundary;
}

WeissTrace weiss_trace(const VectorField& f, const Potential& p, const Point& x0,
                       std::span<const double> radii) {
  WeissTrace tr;
  tr.x0 = x0;
  tr.alpha = p.alpha;
  tr.kappa = kappa_of(p);
  tr.base_well = base_well_at(f, p, x0);
  tr.radii.assign(radii.begin(), radii.end());
  std::sort(tr.radii.begin(), tr.radii.end());

  const GridSpec& s = f.spec;
  const double kappa = tr.kappa;
  for (double r : tr.radii) {
    check_ball(s, x0, r);
    const auto parts = weiss_parts(f, p, x0, r, tr.base_well);
    tr.values.push_back(parts.volume - parts.boundary);
    // kappa r^{kappa-1} |D_u g| int_{B_1} |u_r|^{1+alpha}, pulled back to B_r.
    const double pull = std::pow(r, -(s.n + kappa * (1.0 + p.alpha)));
    tr.error_budget.push_back(kappa * std::pow(r, kappa - 1.0) * parts.dug_sup * pull *
                              parts.u1a_ball);
    // Declared quadrature allowance: shell-mass miscount plus relative noise.
    const double hr = s.h / r;
    tr.quad_slack.push_back(2.0 * hr * parts.shell +
                            8.0 * hr * hr * (std::fabs(parts.volume) + parts.boundary));
  }

  tr.monotone_pass = true;
  tr.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < tr.radii.size(); ++i) {
    const double dW = tr.values[i + 1] - tr.values[i];
    tr.dW_forward.push_back(dW);
    const double dr = tr.radii[i + 1] - tr.radii[i];
    const double budget = 0.5 * (tr.error_budget[i] + tr.error_budget[i + 1]) * dr;
    const double allow = budget + tr.quad_slack[i] + tr.quad_slack[i + 1];
    const double margin = dW + allow;
    tr.worst_margin = std::min(tr.worst_margin, margin);
    if (margin < 0.0) tr.monotone_pass = false;
  }
  tr.dW_forward.push_back(0.0);
  if (tr.radii.size() < 2) tr.worst_margin = 0.0;
  return tr;
}

Index find_free_boundary_node(const DeltaGrid& d, const Point& near, double snap_tol) {
  const GridSpec& s = d.spec;
  Index strides[kMaxAxes];
  {
    Index acc = 1;
    for (int dd = s.n - 1; dd >= 0; --dd) {
      strides[dd] = acc;
      acc *= s.extents[dd];
    }
  }
  Index best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  walk(s, [&](Index lin, const int* idx) {
    if (d.delta[lin] <= snap_tol) return;  // want an interface node
    bool touches_contact = false;
    for (int dd = 0; dd < s.n && !touches_contact; ++dd) {
      if (idx[dd] > 0 && d.delta[lin - strides[dd]] <= snap_tol) touches_contact = true;
      if (idx[dd] + 1 < s.extents[dd] && d.delta[lin + strides[dd]] <= snap_tol)
        touches_contact = true;
    }
    if (!touches_contact) return;
    double r2 = 0.0;
    for (int dd = 0; dd < s.n; ++dd) {
      const double dx = s.origin[dd] + s.h * idx[dd] - near[dd];
      r2 += dx * dx;
    }
    if (r2 < best_d2) {
      best_d2 = r2;
      best = lin;
    }
  });
  if (best < 0) throw NotOnFreeBoundary("no interface node adjacent to the contact set");
  return best;
}

GrowthProbe growth_probe(const VectorField& f, const Potential& p, const DeltaGrid& d,
                         Index node, std::span<const double> radii, double snap_tol) {
  const GridSpec& s = f.spec;
  Index strides[kMaxAxes];
  {
    Index acc = 1;
    for (int dd = s.n - 1; dd >= 0; --dd) {
      strides[dd] = acc;
      acc *= s.extents[dd];
    }
  }
  int idx[kMaxAxes] = {0, 0, 0};
  s.unindex(node, {idx, static_cast<std::size_t>(s.n)});

  bool touches_contact = d.delta[node] <= snap_tol;
  bool touches_interface = d.delta[node] > snap_tol;
  for (int dd = 0; dd < s.n; ++dd) {
    if (idx[dd] > 0) {
      touches_contact = touches_contact || d.delta[node - strides[dd]] <= snap_tol;
      touches_interface = touches_interface || d.delta[node - strides[dd]] > snap_tol;
    }
    if (idx[dd] + 1 < s.extents[dd]) {
      touches_contact = touches_contact || d.delta[node + strides[dd]] <= snap_tol;
      touches_interface = touches_interface || d.delta[node + strides[dd]] > snap_tol;
    }
  }
  if (!touches_contact || !touches_interface)
    throw NotOnFreeBoundary("probe node must touch both the contact set and the interface");

  GrowthProbe out;
  out.node = node;
  out.x0 = s.position({idx, static_cast<std::size_t>(s.n)});
  out.kappa = kappa_of(p);
  out.radii.assign(radii.begin(), radii.end());
  std::sort(out.radii.begin(), out.radii.end());
  for (double r : out.radii) check_ball(s, out.x0, r);

  const DensityField dens(f, p);
  out.delta_at_x0 = d.delta[node];
  out.grad_at_x0 = std::sqrt(dens.grad2(node, idx));
  out.gate_delta_ok = out.delta_at_x0 <= 10.0 * std::pow(s.h, std::min(out.kappa, 2.0));
  out.gate_grad_ok = out.grad_at_x0 <= 10.0 * std::pow(s.h, std::min(out.kappa - 1.0, 1.0));

  out.sup_delta.assign(out.radii.size(), 0.0);
  out.sup_grad.assign(out.radii.size(), 0.0);
  walk(s, [&](Index lin, const int* id2) {
    double r2 = 0.0;
    for (int dd = 0; dd < s.n; ++dd) {
      const double dx = s.origin[dd] + s.h * id2[dd] - out.x0[dd];
      r2 += dx * dx;
    }
    const double rr = std::sqrt(r2);
    if (rr > out.radii.back()) return;
    const double g = std::sqrt(dens.grad2(lin, id2));
    for (std::size_t k = 0; k < out.radii.size(); ++k) {
      if (rr > out.radii[k]) continue;
      out.sup_delta[k] = std::max(out.sup_delta[k], d.delta[lin]);
      out.sup_grad[k] = std::max(out.sup_grad[k], g);
    }
  });

  try {
    out.fit_delta = scaling_fit(out.radii, out.sup_delta);
    out.fit_delta_valid = true;
  } catch (const DegenerateFit&) {
  }
  try {
    out.fit_grad = scaling_fit(out.radii, out.sup_grad);
    out.fit_grad_valid = true;
  } catch (const DegenerateFit&) {
  }
  return out;
}

NondegConstants select_nondegeneracy_constants(const Potential& p, int n, int lattice_per_axis) {
  if (p.num_wells() < 2) throw Error("nondegeneracy constants need at least two wells");
  const double r0 = p.r0_well();
  const double cg = p.g_lower_bound;

  // Sample |D_u g| over a lattice inside each well ball B_{r0}(a_i).
  const int K = std::max(1, lattice_per_axis / 2);
  double dug = 0.0;
  std::vector<double> u(p.m), dg(p.m);
  for (int i = 0; i < p.num_wells(); ++i) {
    const auto a = p.well(i);
    std::vector<int> k(p.m, -K);
    while (true) {
      double r2 = 0.0;
      for (int c = 0; c < p.m; ++c) {
        u[c] = a[c] + r0 * static_cast<double>(k[c]) / K;
        r2 += (u[c] - a[c]) * (u[c] - a[c]);
      }
      if (r2 <= r0 * r0 * (1 + 1e-12)) {
        p.g.gradient(u, dg);
        dug = std::max(dug, std::sqrt(norm2(dg)));
      }
      int c = 0;
      for (; c < p.m; ++c) {
        if (++k[c] <= K) break;
        k[c] = -K;
      }
      if (c == p.m) break;
    }
  }

  NondegConstants out;
  out.dug_sup = dug;
  const double theta_bound =
      dug > 0.0 ? std::min(p.alpha * cg / (4.0 * dug), r0) : r0;
  out.theta = 0.9 * theta_bound;
  const double c_bound = std::min(p.alpha * (2.0 - p.alpha) * cg / (8.0 * n),
                                  (2.0 - p.alpha) * (2.0 - p.alpha) * cg / 16.0);
  out.c = 0.9 * c_bound;
  return out;
}

}  // namespace acfb
