#include "acfb/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acfb/errors.hpp"
#include "acfb/interface.hpp"

namespace acfb {

namespace {

struct CubeLattice {
  int n;
  int k;
  int q;                      // nodes per cube side (L = q h)
  int corner_idx[kMaxAxes];   // node index of the lattice corner
  int cubes_per_axis;

  Index num_cubes() const {
    Index t = 1;
    for (int d = 0; d < n; ++d) t *= cubes_per_axis;
    return t;
  }
};

CubeLattice make_lattice(const GridSpec& s, const CensusConfig& cfg) {
  CubeLattice lat;
  lat.n = s.n;
  lat.k = cfg.k;
  lat.q = static_cast<int>(std::lround(cfg.L / s.h));
  if (lat.q < 1 || std::fabs(lat.q * s.h - cfg.L) > 1e-9 * s.h)
    throw GridTooSmall("cube side must be a positive multiple of h");
  lat.cubes_per_axis = 2 * cfg.k;
  for (int d = 0; d < s.n; ++d) {
    const double corner = cfg.center[d] - cfg.k * cfg.L;
    const double off = (corner - s.origin[d]) / s.h;
    const int ci = static_cast<int>(std::lround(off));
    if (std::fabs(off - ci) > 1e-6)
      throw GridTooSmall("census center must sit on a node");
    if (ci < 0 || ci + 2 * cfg.k * lat.q > s.extents[d] - 1)
      throw GridTooSmall("census square of side 2kL leaves the grid");
    lat.corner_idx[d] = ci;
  }
  return lat;
}

}  // namespace

CubeCensus census(const VectorField& f, const Potential& p, const CensusConfig& cfg) {
  const GridSpec& s = f.spec;
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.5)) throw Error("census epsilon must be in (0, 1/2)");
  const CubeLattice lat = make_lattice(s, cfg);
  const int nw = p.num_wells();
  const int per_axis = lat.cubes_per_axis;
  const Index ncubes = lat.num_cubes();

  CubeCensus out;
  out.n = s.n;
  out.k = cfg.k;
  out.L = lat.q * s.h;
  out.theta = cfg.theta;
  out.epsilon = cfg.epsilon;
  out.num_wells = nw;
  out.sigma.assign(ncubes, std::vector<double>(nw, 0.0));
  out.cls.assign(ncubes, CubeClass::T3);
  out.dominant.assign(ncubes, -1);

  // sigma pass: nodes in [corner, corner + 2kL), lower-closed cubes.
  const double hn = std::pow(s.h, s.n);
  const double half_theta2 = 0.25 * cfg.theta * cfg.theta;
  std::vector<std::vector<double>> cube_max2(ncubes, std::vector<double>(nw, 0.0));

  int idx[kMaxAxes] = {0, 0, 0};
  const Index nn = s.num_nodes();
  for (Index lin = 0; lin < nn; ++lin) {
    bool in = true;
    Index cube = 0;
    for (int d = 0; d < s.n; ++d) {
      const int rel = idx[d] - lat.corner_idx[d];
      if (rel < 0 || rel >= per_axis * lat.q) {
        in = false;
        break;
      }
      cube = cube * per_axis + rel / lat.q;
    }
    if (in) {
      for (int w = 0; w < nw; ++w) {
        const double d2 = dist2(f.at(lin), p.well(w));
        if (d2 < half_theta2) out.sigma[cube][w] += hn;
        cube_max2[cube][w] = std::max(cube_max2[cube][w], d2);
      }
    }
    for (int d = s.n - 1; d >= 0; --d) {
      if (++idx[d] < s.extents[d]) break;
      idx[d] = 0;
    }
  }

  const double Ln = std::pow(out.L, s.n);
  const double big = (1.0 - 2.0 * cfg.epsilon) * Ln;
  const double second = nw > 1 ? cfg.epsilon * Ln / (nw - 1)
                               : std::numeric_limits<double>::infinity();

  // argmax sigma per cube, lowest index on ties.
  std::vector<int> argmax(ncubes, 0);
  for (Index c = 0; c < ncubes; ++c) {
    int j0 = 0;
    for (int w = 1; w < nw; ++w)
      if (out.sigma[c][w] > out.sigma[c][j0]) j0 = w;
    argmax[c] = j0;
  }

  auto cube_coord = [&](Index c, int* cc) {
    for (int d = s.n - 1; d >= 0; --d) {
      cc[d] = static_cast<int>(c % per_axis);
      c /= per_axis;
    }
  };
  auto is_boundary_cube = [&](const int* cc) {
    for (int d = 0; d < s.n; ++d)
      if (cc[d] == 0 || cc[d] == per_axis - 1) return true;
    return false;
  };

  // Classification needs the full sigma table first.
  int cc[kMaxAxes], nc[kMaxAxes];
  for (Index c = 0; c < ncubes; ++c) {
    cube_coord(c, cc);
    if (is_boundary_cube(cc)) {
      out.cls[c] = CubeClass::T1;
      continue;
    }
    const int j0 = argmax[c];
    const double smax = out.sigma[c][j0];
    if (smax <= big) {
      double other = 0.0;
      for (int w = 0; w < nw; ++w)
        if (w != j0) other = std::max(other, out.sigma[c][w]);
      out.cls[c] = other >= second ? CubeClass::T2 : CubeClass::T3;
      continue;
    }
    out.dominant[c] = j0;
    // T4 iff every adjacent cube (diagonals included) is dominated by the
    // same well at the (1-2eps) level.
    bool all_big = true;
    std::array<int, kMaxAxes> lo{}, hi{};
    for (int d = 0; d < s.n; ++d) {
      lo[d] = cc[d] - 1;
      hi[d] = cc[d] + 1;
    }
    for (int d = 0; d < s.n; ++d) nc[d] = lo[d];
    while (all_big) {
      bool self = true;
      for (int d = 0; d < s.n; ++d) self = self && nc[d] == cc[d];
      if (!self) {
        Index nb = 0;
        for (int d = 0; d < s.n; ++d) nb = nb * per_axis + nc[d];
        if (out.sigma[nb][j0] <= big) all_big = false;
      }
      int d = s.n - 1;
      for (; d >= 0; --d) {
        if (++nc[d] <= hi[d]) break;
        nc[d] = lo[d];
      }
      if (d < 0) break;
    }
    out.cls[c] = all_big ? CubeClass::T4 : CubeClass::T5;
    if (cube_max2[c][j0] >= cfg.theta * cfg.theta) ++out.violations;
  }

  for (Index c = 0; c < ncubes; ++c) ++out.totals[static_cast<int>(out.cls[c])];
  return out;
}

CensusScaling census_scaling(const VectorField& f, const Potential& p, const CensusConfig& base,
                             std::span<const int> k_list) {
  CensusScaling out;
  std::vector<double> ks, counts;
  for (int k : k_list) {
    CensusConfig cfg = base;
    cfg.k = k;
    out.k_list.push_back(k);
    out.per_k.push_back(census(f, p, cfg));
    const auto& c = out.per_k.back();
    ks.push_back(static_cast<double>(k));
    counts.push_back(static_cast<double>(c.total(CubeClass::T2) + c.total(CubeClass::T3) +
                                         c.total(CubeClass::T5)));
  }
  bool all_zero = true;
  for (double v : counts) all_zero = all_zero && v == 0.0;
  if (all_zero) {
    out.vacuous = true;
    out.pass = true;
    return out;
  }
  const auto fit = scaling_fit(ks, counts);
  out.slope = fit.slope;
  out.r2 = fit.r2;
  out.pass = fit.slope <= (f.spec.n - 1) + 0.3;
  return out;
}

double select_cube_side(const Potential& p, double c_nondeg, double theta, double h) {
  if (!(c_nondeg > 0.0) || !(theta > 0.0)) throw Error("select_cube_side needs positive constants");
  const double L = 4.0 * std::pow(2.0 * theta / c_nondeg, 0.5 * (2.0 - p.alpha));
  const double unit = 4.0 * h;
  return unit * std::ceil(L / unit - 1e-12);
}

}  // namespace acfb
