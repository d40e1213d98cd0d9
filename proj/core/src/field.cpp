#include "acfb/field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "acfb/errors.hpp"
#include "acfb/rng.hpp"

namespace acfb {

void GridSpec::validate() const {
  if (n < 1 || n > kMaxAxes) throw BadInit("grid dimension must be in [1," + std::to_string(kMaxAxes) + "]");
  for (int d = 0; d < n; ++d)
    if (extents[d] < 2) throw BadInit("grid extents must be >= 2 per axis");
  if (!(h > 0.0)) throw BadInit("grid spacing must be positive");
}

double VectorField::max_abs_value() const {
  double b = 0.0;
  const Index nn = spec.num_nodes();
  for (Index i = 0; i < nn; ++i) b = std::max(b, std::sqrt(norm2(at(i))));
  return b;
}

namespace {

VectorField make_empty(const GridSpec& spec, int m, const Potential& p) {
  spec.validate();
  VectorField f;
  f.spec = spec;
  f.m = m;
  f.values.assign(static_cast<std::size_t>(spec.num_nodes()) * m, 0.0);
  f.frozen.assign(static_cast<std::size_t>(spec.num_nodes()), 0);
  f.meta.alpha = p.alpha;
  f.meta.m = m;
  f.meta.wells = p.wells;
  return f;
}

int sector_well(const Potential& p, double px, double py, const Point& center) {
  // Nearest well by angular distance about the center; lowest index on ties.
  const double phi = std::atan2(py - center[1], px - center[0]);
  int best = -1;
  double best_d = 1e300;
  for (int i = 0; i < p.num_wells(); ++i) {
    const auto a = p.well(i);
    const double wa = std::atan2(a[1], a[0]);
    double d = std::fabs(std::remainder(phi - wa, 2.0 * M_PI));
    if (d < best_d - 1e-15) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

VectorField init_field(const GridSpec& spec, int m, const Potential& p, const InitOptions& opt) {
  if (p.m != m) throw BadInit("potential codomain dimension does not match field");
  VectorField f = make_empty(spec, m, p);
  const Index nn = spec.num_nodes();
  int idx[kMaxAxes] = {0, 0, 0};

  switch (opt.mode) {
    case InitMode::constant: {
      if (opt.well < 0 || opt.well >= p.num_wells()) throw BadInit("constant init: well index out of range");
      const auto a = p.well(opt.well);
      for (Index i = 0; i < nn; ++i) {
        f.set(i, a);
        spec.unindex(i, {idx, static_cast<std::size_t>(spec.n)});
        if (spec.on_boundary({idx, static_cast<std::size_t>(spec.n)})) f.frozen[i] = 1;
      }
      break;
    }
    case InitMode::sector_wells: {
      if (spec.n != 2 || m != 2) throw BadInit("sector_wells requires n=2, m=2");
      if (p.num_wells() < 2) throw BadInit("sector_wells requires at least two wells");
      for (Index i = 0; i < nn; ++i) {
        spec.unindex(i, {idx, 2});
        const Point x = spec.position({idx, 2});
        const int w = sector_well(p, x[0], x[1], opt.center);
        f.set(i, p.well(w));
        if (spec.on_boundary({idx, 2})) f.frozen[i] = 1;
      }
      break;
    }
    case InitMode::radial_connection_bc: {
      if (spec.n != 1) throw BadInit("radial_connection_bc requires n=1");
      std::vector<double> left(opt.left_value), right(opt.right_value);
      if (left.empty()) {
        if (opt.well_i < 0 || opt.well_i >= p.num_wells()) throw BadInit("connection init: well_i out of range");
        left.assign(p.well(opt.well_i).begin(), p.well(opt.well_i).end());
      }
      if (right.empty()) {
        if (opt.well_j < 0 || opt.well_j >= p.num_wells()) throw BadInit("connection init: well_j out of range");
        right.assign(p.well(opt.well_j).begin(), p.well(opt.well_j).end());
      }
      if (static_cast<int>(left.size()) != m || static_cast<int>(right.size()) != m)
        throw BadInit("connection init: end value dimension mismatch");
      const Index last = nn - 1;
      for (Index i = 0; i < nn; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(last);
        for (int c = 0; c < m; ++c) f.values[i * m + c] = (1.0 - t) * left[c] + t * right[c];
      }
      f.frozen[0] = 1;
      f.frozen[last] = 1;
      break;
    }
    case InitMode::random: {
      if (p.num_wells() < 1) throw BadInit("random init requires wells");
      Rng rng(opt.seed);
      const int N = p.num_wells();
      std::vector<double> w(N);
      for (Index i = 0; i < nn; ++i) {
        // Uniform barycentric weights over the well hull.
        double tot = 0.0;
        for (int k = 0; k < N; ++k) {
          w[k] = -std::log(1.0 - rng.uniform01());
          tot += w[k];
        }
        for (int c = 0; c < m; ++c) {
          double v = 0.0;
          for (int k = 0; k < N; ++k) v += w[k] / tot * p.well(k)[c];
          f.values[i * m + c] = v;
        }
        spec.unindex(i, {idx, static_cast<std::size_t>(spec.n)});
        if (spec.on_boundary({idx, static_cast<std::size_t>(spec.n)})) f.frozen[i] = 1;
      }
      break;
    }
  }
  f.meta.field_bound = f.max_abs_value();
  return f;
}

namespace {

struct Mat2 {
  double a, b, c, d;  // row-major 2x2
  void apply(double x, double y, double& ox, double& oy) const {
    ox = a * x + b * y;
    oy = c * x + d * y;
  }
  Mat2 transpose() const { return {a, c, b, d}; }
};

std::array<Mat2, 6> dihedral3() {
  std::array<Mat2, 6> g;
  for (int k = 0; k < 3; ++k) {
    const double t = 2.0 * M_PI * k / 3.0;
    const double co = std::cos(t), si = std::sin(t);
    g[k] = {co, -si, si, co};                       // rotations
    g[3 + k] = {co, si, si, -co};                   // rotation * mirror(x-axis)
  }
  return g;
}

}  // namespace

VectorField symmetrize(const VectorField& f, const SymmetryGroup& g, const Potential& p,
                       std::span<const int> well_permutation) {
  if (g.kind == SymmetryKind::none) return f;
  if (f.spec.n != 2 || f.m != 2) throw SymmetryMismatch("triangle_c3v requires n=2, m=2");
  for (int d = 0; d < 2; ++d)
    if (f.spec.extents[d] % 2 == 0)
      throw SymmetryMismatch("triangle_c3v requires odd extents so the center is a node");

  const auto group = dihedral3();

  // Every group element must map the well set onto itself.
  for (const auto& gm : group) {
    for (int i = 0; i < p.num_wells(); ++i) {
      const auto a = p.well(i);
      double rx, ry;
      gm.apply(a[0], a[1], rx, ry);
      bool hit = false;
      for (int j = 0; j < p.num_wells() && !hit; ++j) {
        const auto b = p.well(j);
        hit = std::hypot(rx - b[0], ry - b[1]) <= 1e-12;
      }
      if (!hit) throw SymmetryMismatch("wells are not equivariant under the triangle group");
    }
  }
  if (!well_permutation.empty()) {
    if (static_cast<int>(well_permutation.size()) != p.num_wells())
      throw SymmetryMismatch("well_permutation size mismatch");
    const Mat2& rot = group[1];
    for (int i = 0; i < p.num_wells(); ++i) {
      const auto a = p.well(i);
      double rx, ry;
      rot.apply(a[0], a[1], rx, ry);
      const auto b = p.well(well_permutation[i]);
      if (std::hypot(rx - b[0], ry - b[1]) > 1e-12)
        throw SymmetryMismatch("well_permutation does not match the 120-degree rotation");
    }
  }

  // Orbit averaging on nearest-node group images. Every node in an orbit
  // class takes the class value transported by the representation, so a
  // second application reproduces the construction exactly (projection).
  // Rounding to nodes costs O(h) accuracy near sector boundaries.
  const auto& s = f.spec;
  const Index nn = s.num_nodes();
  const int ex = s.extents[0], ey = s.extents[1];

  auto node_of = [&](double px, double py, Index& out_node) {
    const int i = static_cast<int>(std::lround((px - s.origin[0]) / s.h));
    const int j = static_cast<int>(std::lround((py - s.origin[1]) / s.h));
    if (i < 0 || i >= ex || j < 0 || j >= ey) return false;
    out_node = static_cast<Index>(i) * ey + j;
    return true;
  };

  // Degenerate zone: orbit images of nodes this close to the center can
  // collide after rounding; the only equivariant value there is 0.
  const double r_degenerate = 3.0 * s.h;

  std::vector<Index> parent(nn);
  for (Index i = 0; i < nn; ++i) parent[i] = i;
  std::function<Index(Index)> find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;  // keep the lowest index as representative
    else parent[a] = b;
  };

  std::vector<std::uint8_t> active(nn, 0);
  for (int i = 0; i < ex; ++i) {
    for (int j = 0; j < ey; ++j) {
      const Index node = static_cast<Index>(i) * ey + j;
      if (f.frozen[node]) continue;
      const double px = s.origin[0] + s.h * i - g.center[0];
      const double py = s.origin[1] + s.h * j - g.center[1];
      if (std::hypot(px, py) < r_degenerate) continue;
      bool ok = true;
      Index partners[6];
      for (int k = 0; k < 6 && ok; ++k) {
        double qx, qy;
        group[k].apply(px, py, qx, qy);
        ok = node_of(qx + g.center[0], qy + g.center[1], partners[k]) &&
             !f.frozen[partners[k]];
      }
      if (!ok) continue;
      active[node] = 1;
      for (int k = 0; k < 6; ++k) unite(node, partners[k]);
    }
  }

  // A class is usable only if every member is active.
  std::vector<std::uint8_t> class_ok(nn, 1);
  for (Index i = 0; i < nn; ++i)
    if (parent[i] != i || !active[i]) {
      const Index r = find(i);
      if (!active[i]) class_ok[r] = 0;
    }

  // Element assignment: the group element whose image of the representative
  // lies nearest the node; ties resolve by element order. Members are pulled
  // back by their assigned element, which makes a second application
  // reproduce the class value exactly.
  auto assigned_element = [&](double rx, double ry, double px, double py) {
    int best = 0;
    double best_d = 1e300;
    for (int k = 0; k < 6; ++k) {
      double qx, qy;
      group[k].apply(rx, ry, qx, qy);
      const double d = std::hypot(qx - px, qy - py);
      if (d < best_d - 1e-12) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };

  VectorField out = f;
  std::vector<double> vx(nn, 0.0), vy(nn, 0.0);
  std::vector<std::uint8_t> has_value(nn, 0);
  for (Index rep = 0; rep < nn; ++rep) {
    if (find(rep) != rep || !active[rep] || !class_ok[rep]) continue;
    const int i = static_cast<int>(rep / ey), j = static_cast<int>(rep % ey);
    const double px = s.origin[0] + s.h * i - g.center[0];
    const double py = s.origin[1] + s.h * j - g.center[1];
    double acc0 = 0.0, acc1 = 0.0;
    for (int k = 0; k < 6; ++k) {
      double qx, qy;
      group[k].apply(px, py, qx, qy);
      Index w = 0;
      node_of(qx + g.center[0], qy + g.center[1], w);
      const int wi = static_cast<int>(w / ey), wj = static_cast<int>(w % ey);
      const double wx = s.origin[0] + s.h * wi - g.center[0];
      const double wy = s.origin[1] + s.h * wj - g.center[1];
      const int e = assigned_element(px, py, wx, wy);
      double t0, t1;
      group[e].transpose().apply(f.values[w * 2], f.values[w * 2 + 1], t0, t1);
      acc0 += t0;
      acc1 += t1;
    }
    vx[rep] = acc0 / 6.0;
    vy[rep] = acc1 / 6.0;
    has_value[rep] = 1;
  }

  for (int i = 0; i < ex; ++i) {
    for (int j = 0; j < ey; ++j) {
      const Index node = static_cast<Index>(i) * ey + j;
      const double px = s.origin[0] + s.h * i - g.center[0];
      const double py = s.origin[1] + s.h * j - g.center[1];
      if (!f.frozen[node] && std::hypot(px, py) < r_degenerate) {
        out.values[node * 2] = 0.0;
        out.values[node * 2 + 1] = 0.0;
        continue;
      }
      if (!active[node]) continue;
      const Index rep = find(node);
      if (!class_ok[rep] || !has_value[rep]) continue;
      const int ri = static_cast<int>(rep / ey), rj = static_cast<int>(rep % ey);
      const double rx = s.origin[0] + s.h * ri - g.center[0];
      const double ry = s.origin[1] + s.h * rj - g.center[1];
      const int e = assigned_element(rx, ry, px, py);
      double o0, o1;
      group[e].apply(vx[rep], vy[rep], o0, o1);
      out.values[node * 2] = o0;
      out.values[node * 2 + 1] = o1;
    }
  }
  out.meta.field_bound = out.max_abs_value();
  return out;
}

}  // namespace acfb
