#include "acfb/interface.hpp"

#include <algorithm>
#include <cmath>

#include "acfb/errors.hpp"

namespace acfb {

DeltaGrid delta_field(const VectorField& f, const Potential& p) {
  DeltaGrid d;
  d.spec = f.spec;
  const Index nn = f.spec.num_nodes();
  d.delta.resize(nn);
  d.nearest_well.resize(nn);
  for (Index i = 0; i < nn; ++i) {
    const auto [w, dist] = p.well_distance(f.at(i));
    d.delta[i] = dist;
    d.nearest_well[i] = w;
  }
  return d;
}

std::vector<int> contact_labels(const DeltaGrid& d) {
  std::vector<int> labels(d.delta.size());
  for (std::size_t i = 0; i < d.delta.size(); ++i)
    labels[i] = d.delta[i] == 0.0 ? d.nearest_well[i] + 1 : 0;
  return labels;
}

ScalingFit scaling_fit(std::span<const double> radii, std::span<const double> values) {
  ScalingFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (values[i] > 0.0 && radii[i] > 0.0) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(values[i]));
    } else {
      ++fit.dropped;
    }
  }
  const std::size_t n = lx.size();
  if (n < 4) throw DegenerateFit("scaling_fit needs at least 4 positive points, got " +
                                 std::to_string(n));
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw DegenerateFit("scaling_fit: radii are not distinct");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::vector<double> radii_ladder(double r_min, double r_max, double ratio) {
  std::vector<double> r;
  for (double v = r_min; v <= r_max * (1.0 + 1e-12); v *= ratio) r.push_back(v);
  return r;
}

namespace {

void check_radii(const GridSpec& s, const Point& center, std::span<const double> radii) {
  for (double r : radii) {
    if (!(r > 0.0)) throw RadiusOutOfGrid("radius must be positive");
    for (int d = 0; d < s.n; ++d) {
      const double lo = s.origin[d], hi = s.origin[d] + s.h * (s.extents[d] - 1);
      if (center[d] - r < lo - 1e-12 || center[d] + r > hi + 1e-12)
        throw RadiusOutOfGrid("ball of radius " + std::to_string(r) + " leaves the grid");
    }
  }
}

double node_r2(const GridSpec& s, const int* idx, const Point& center) {
  double r2 = 0.0;
  for (int d = 0; d < s.n; ++d) {
    const double dx = s.origin[d] + s.h * idx[d] - center[d];
    r2 += dx * dx;
  }
  return r2;
}

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

// Length of the part of segment [a,b] inside the disk of radius r about c.
double clipped_length(double ax, double ay, double bx, double by, double cx, double cy,
                      double r) {
  const double dx = bx - ax, dy = by - ay;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return 0.0;
  const double fx = ax - cx, fy = ay - cy;
  // |f + t d|^2 = r^2
  const double A = dx * dx + dy * dy;
  const double B = 2.0 * (fx * dx + fy * dy);
  const double C = fx * fx + fy * fy - r * r;
  const double disc = B * B - 4 * A * C;
  if (disc <= 0.0) return C <= 0.0 ? len : 0.0;
  const double sq = std::sqrt(disc);
  double t0 = (-B - sq) / (2 * A), t1 = (-B + sq) / (2 * A);
  t0 = std::max(t0, 0.0);
  t1 = std::min(t1, 1.0);
  return t1 > t0 ? (t1 - t0) * len : 0.0;
}

}  // namespace

std::vector<double> boundary_length(const GridSpec& spec, std::span<const int> labels,
                                    const Point& center, std::span<const double> radii) {
  check_radii(spec, center, radii);
  std::vector<double> out(radii.size(), 0.0);

  if (spec.n == 1) {
    // Count of free-boundary crossings (edge midpoints) inside each interval.
    for (int i = 0; i + 1 < spec.extents[0]; ++i) {
      const bool a = labels[i] != 0, b = labels[i + 1] != 0;
      if (a == b) continue;
      const double mid = spec.origin[0] + spec.h * (i + 0.5);
      for (std::size_t k = 0; k < radii.size(); ++k)
        if (std::fabs(mid - center[0]) <= radii[k]) out[k] += 1.0;
    }
    return out;
  }
  if (spec.n != 2) throw Error("boundary_length supports n in {1,2}");

  const int ex = spec.extents[0], ey = spec.extents[1];
  const double h = spec.h;
  // Marching squares on the interface indicator, crossings at edge midpoints.
  // Segment endpoints per cell config, in cell-local units.
  for (int i = 0; i + 1 < ex; ++i) {
    for (int j = 0; j + 1 < ey; ++j) {
      const bool c00 = labels[static_cast<Index>(i) * ey + j] != 0;
      const bool c01 = labels[static_cast<Index>(i) * ey + j + 1] != 0;
      const bool c10 = labels[static_cast<Index>(i + 1) * ey + j] != 0;
      const bool c11 = labels[static_cast<Index>(i + 1) * ey + j + 1] != 0;
      const int config = (c00 ? 1 : 0) | (c10 ? 2 : 0) | (c11 ? 4 : 0) | (c01 ? 8 : 0);
      if (config == 0 || config == 15) continue;

      const double x0 = spec.origin[0] + h * i, y0 = spec.origin[1] + h * j;
      // Edge midpoints: bottom (y side at j), right, top, left in (x,y).
      const double bx = x0 + 0.5 * h, by = y0;        // between c00 and c10
      const double rx = x0 + h, ry = y0 + 0.5 * h;    // between c10 and c11
      const double tx = x0 + 0.5 * h, ty = y0 + h;    // between c01 and c11
      const double lx = x0, ly = y0 + 0.5 * h;        // between c00 and c01

      double seg[2][4];
      int nseg = 0;
      auto add = [&](double axp, double ayp, double bxp, double byp) {
        seg[nseg][0] = axp;
        seg[nseg][1] = ayp;
        seg[nseg][2] = bxp;
        seg[nseg][3] = byp;
        ++nseg;
      };
      switch (config) {
        case 1: case 14: add(lx, ly, bx, by); break;
        case 2: case 13: add(bx, by, rx, ry); break;
        case 4: case 11: add(rx, ry, tx, ty); break;
        case 8: case 7:  add(tx, ty, lx, ly); break;
        case 3: case 12: add(lx, ly, rx, ry); break;
        case 6: case 9:  add(bx, by, tx, ty); break;
        case 5:  add(lx, ly, bx, by); add(rx, ry, tx, ty); break;  // saddle
        case 10: add(bx, by, rx, ry); add(tx, ty, lx, ly); break;  // saddle
        default: break;
      }
      for (int sgi = 0; sgi < nseg; ++sgi)
        for (std::size_t k = 0; k < radii.size(); ++k)
          out[k] += clipped_length(seg[sgi][0], seg[sgi][1], seg[sgi][2], seg[sgi][3],
                                   center[0], center[1], radii[k]);
    }
  }
  return out;
}

InterfaceReport interface_measures(const VectorField& f, const Potential& p,
                                   const DeltaGrid& d, const Point& center,
                                   std::span<const double> radii,
                                   std::span<const double> gammas) {
  const GridSpec& s = f.spec;
  check_radii(s, center, radii);

  InterfaceReport rep;
  rep.center = center;
  rep.radii.assign(radii.begin(), radii.end());
  rep.gammas.assign(gammas.begin(), gammas.end());
  const std::size_t nr = radii.size();
  const int nw = p.num_wells();
  rep.measure_I0.assign(nr, 0.0);
  rep.measure_Igamma.assign(gammas.size(), std::vector<double>(nr, 0.0));
  rep.contact_measure.assign(nw, std::vector<double>(nr, 0.0));
  rep.energy_ball.assign(nr, 0.0);

  const double hn = std::pow(s.h, s.n);
  const int m = f.m;
  Index strides[kMaxAxes];
  {
    Index acc = 1;
    for (int dd = s.n - 1; dd >= 0; --dd) {
      strides[dd] = acc;
      acc *= s.extents[dd];
    }
  }

  walk(s, [&](Index lin, const int* idx) {
    const double r2 = node_r2(s, idx, center);

    // Energy density: centered differences interior, one-sided at the ring.
    double grad2 = 0.0;
    for (int dd = 0; dd < s.n; ++dd) {
      const bool lo_ok = idx[dd] > 0, hi_ok = idx[dd] + 1 < s.extents[dd];
      for (int c = 0; c < m; ++c) {
        const double va = lo_ok ? f.values[(lin - strides[dd]) * m + c] : f.values[lin * m + c];
        const double vb = hi_ok ? f.values[(lin + strides[dd]) * m + c] : f.values[lin * m + c];
        const double span = (lo_ok && hi_ok) ? 2.0 : 1.0;
        const double dv = (vb - va) / (span * s.h);
        grad2 += dv * dv;
      }
    }
    const double dens = 0.5 * grad2 + p.value(f.at(lin));

    const double delta = d.delta[lin];
    for (std::size_t k = 0; k < nr; ++k) {
      if (r2 > radii[k] * radii[k]) continue;
      rep.energy_ball[k] += dens * hn;
      if (delta > 0.0) rep.measure_I0[k] += hn;
      for (std::size_t gi = 0; gi < gammas.size(); ++gi)
        if (delta >= gammas[gi]) rep.measure_Igamma[gi][k] += hn;
      if (delta == 0.0) rep.contact_measure[d.nearest_well[lin]][k] += hn;
    }
  });

  const auto labels = contact_labels(d);
  rep.boundary_length = boundary_length(s, labels, center, radii);

  if (nr >= 4) {
    try {
      rep.fit_I0 = scaling_fit(rep.radii, rep.measure_I0);
      rep.fit_boundary = scaling_fit(rep.radii, rep.boundary_length);
      rep.fit_energy = scaling_fit(rep.radii, rep.energy_ball);
      rep.fits_valid = true;
    } catch (const DegenerateFit&) {
      rep.fits_valid = false;
    }
  }
  return rep;
}

TwoPhaseCheck two_phase_check(const GridSpec& spec, std::span<const int> labels, int num_wells,
                              const Point& center, std::span<const double> radii,
                              double c_floor) {
  if (spec.n != 2) throw Error("two_phase_check requires n=2");
  check_radii(spec, center, radii);

  TwoPhaseCheck out;
  out.radii.assign(radii.begin(), radii.end());
  out.c_floor = c_floor;
  const double hn = spec.h * spec.h;

  std::vector<std::vector<double>> contact(num_wells, std::vector<double>(radii.size(), 0.0));
  walk(spec, [&](Index lin, const int* idx) {
    if (labels[lin] == 0) return;
    const double r2 = node_r2(spec, idx, center);
    for (std::size_t k = 0; k < radii.size(); ++k)
      if (r2 <= radii[k] * radii[k]) contact[labels[lin] - 1][k] += hn;
  });

  for (std::size_t k = 0; k < radii.size(); ++k) {
    double m1 = 0.0, m2 = 0.0;
    int top = -1;
    for (int w = 0; w < num_wells; ++w) {
      const double v = contact[w][k];
      if (v > m1) {
        m2 = m1;
        m1 = v;
        top = w;
      } else if (v > m2) {
        m2 = v;
      }
    }
    out.m1.push_back(m1);
    out.m2.push_back(m2);
    out.top_well.push_back(top);
  }

  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (out.m2[k] >= c_floor * std::pow(radii[k], spec.n)) {
      out.first_passing_radius = radii[k];
      out.pass = true;
      for (std::size_t j = k; j < radii.size(); ++j)
        if (out.m2[j] < c_floor * std::pow(radii[j], spec.n)) out.pass = false;
      break;
    }
  }
  return out;
}

}  // namespace acfb
