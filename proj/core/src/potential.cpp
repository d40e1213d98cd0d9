#include "acfb/potential.hpp"

#include <cmath>
#include <cstdio>

#include "acfb/errors.hpp"

namespace acfb {

double Modulation::value(std::span<const double> u) const {
  switch (kind) {
    case Kind::constant:
      return base;
    case Kind::quadratic_bump: {
      double s = 0.0;
      for (std::size_t c = 0; c < u.size(); ++c) {
        const double d = u[c] - (c < center.size() ? center[c] : 0.0);
        s += d * d;
      }
      return base + amp * s;
    }
  }
  return base;
}

void Modulation::gradient(std::span<const double> u, std::span<double> out) const {
  switch (kind) {
    case Kind::constant:
      for (auto& v : out) v = 0.0;
      return;
    case Kind::quadratic_bump:
      for (std::size_t c = 0; c < u.size(); ++c)
        out[c] = 2.0 * amp * (u[c] - (c < center.size() ? center[c] : 0.0));
      return;
  }
}

double Potential::r0_well() const {
  const int n = num_wells();
  if (n < 2) return std::numeric_limits<double>::infinity();
  double min2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) min2 = std::min(min2, dist2(well(i), well(j)));
  return 0.5 * std::sqrt(min2);
}

double Potential::value(std::span<const double> u) const {
  const int n = num_wells();
  double prod = 1.0;
  for (int i = 0; i < n; ++i) {
    const double d2 = dist2(u, well(i));
    if (d2 == 0.0) return 0.0;
    prod *= std::pow(d2, 0.5 * alpha);
  }
  return prod * g.value(u);
}

void Potential::grad(std::span<const double> u, const SingularityPolicy& policy,
                     std::span<double> out) const {
  const int n = num_wells();
  const double eps2 = policy.mode == SingularityMode::epsilon_smoothing
                          ? policy.eps_reg * policy.eps_reg
                          : 0.0;

  double d2[16];
  double pw[16];  // (d2 + eps2)^(alpha/2) per well
  double prod = 1.0;
  for (int i = 0; i < n; ++i) {
    d2[i] = dist2(u, well(i)) + eps2;
    if (policy.mode == SingularityMode::subgradient_zero && d2[i] == 0.0) {
      for (auto& v : out) v = 0.0;
      return;
    }
    pw[i] = std::pow(d2[i], 0.5 * alpha);
    prod *= pw[i];
  }

  const double gv = g.value(u);
  double dg[kMaxComponents] = {0, 0, 0, 0};
  g.gradient(u, {dg, static_cast<std::size_t>(m)});

  for (int c = 0; c < m; ++c) out[c] = prod * dg[c];
  for (int i = 0; i < n; ++i) {
    // alpha * (u - a_i) * (d2_i)^(alpha/2 - 1) * prod_{k != i} pw[k] * g
    double rest = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != i) rest *= pw[k];
    const double f = alpha * std::pow(d2[i], 0.5 * alpha - 1.0) * rest * gv;
    const auto a = well(i);
    for (int c = 0; c < m; ++c) out[c] += f * (u[c] - a[c]);
  }
}

std::pair<int, double> Potential::well_distance(std::span<const double> u) const {
  const int n = num_wells();
  int best = 0;
  double best2 = dist2(u, well(0));
  for (int i = 1; i < n; ++i) {
    const double d2 = dist2(u, well(i));
    if (d2 < best2) {
      best2 = d2;
      best = i;
    }
  }
  return {best, std::sqrt(best2)};
}

Potential Potential::make(int m, std::vector<std::vector<double>> well_list, double alpha,
                          Modulation g, double g_lower_bound) {
  Potential p;
  p.m = m;
  p.alpha = alpha;
  p.g = std::move(g);
  p.g_lower_bound = g_lower_bound;
  for (const auto& w : well_list) {
    if (static_cast<int>(w.size()) != m) throw Error("well dimension mismatch");
    p.wells.insert(p.wells.end(), w.begin(), w.end());
  }
  return p;
}

namespace {

// Recursively walks the lattice {-K..K}^m scaled to the bound, keeping only
// points inside the ball.
void walk_lattice(const Potential& p, double bound, int K, int axis, std::vector<double>& u,
                  ValidationReport& rep) {
  if (axis == p.m) {
    if (norm2(u) > bound * bound * (1.0 + 1e-12)) return;
    const double gv = p.g.value(u);
    if (gv < rep.min_g_sampled) {
      rep.min_g_sampled = gv;
      rep.min_g_arg = u;
    }
    return;
  }
  for (int k = -K; k <= K; ++k) {
    u[axis] = bound * static_cast<double>(k) / static_cast<double>(K);
    walk_lattice(p, bound, K, axis + 1, u, rep);
  }
}

}  // namespace

ValidationReport validate(const Potential& p, double field_bound, int lattice_per_axis) {
  ValidationReport rep;
  std::vector<std::string> bad;

  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) bad.push_back("alpha out of range (0,2]");
  if (p.num_wells() < 1) bad.push_back("no wells");
  if (p.m < 1 || p.m > kMaxComponents) bad.push_back("codomain dimension unsupported");

  const int n = p.num_wells();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist2(p.well(i), p.well(j)) == 0.0)
        bad.push_back("wells " + std::to_string(i) + "," + std::to_string(j) + " coincide");

  double max_well = 0.0;
  for (int i = 0; i < n; ++i) max_well = std::max(max_well, std::sqrt(norm2(p.well(i))));
  if (field_bound < max_well) bad.push_back("field_bound below max |a_i|");

  if (!(p.g_lower_bound > 0.0)) bad.push_back("g_lower_bound not positive");

  if (bad.empty()) {
    const int K = std::max(1, lattice_per_axis / 2);
    std::vector<double> u(p.m, 0.0);
    walk_lattice(p, field_bound, K, 0, u, rep);
    if (rep.min_g_sampled < p.g_lower_bound)
      bad.push_back("sampled g below g_lower_bound (min " +
                    std::to_string(rep.min_g_sampled) + ")");
  }

  if (!bad.empty()) throw ValidationFailure(bad);

  rep.ok = true;
  rep.paper_faithful = (n >= 2) && (p.alpha < 2.0);
  if (n < 2) rep.notes.push_back("single-well fixture: not paper-faithful");
  if (p.alpha == 2.0) rep.notes.push_back("alpha = 2 contrast regime: not paper-faithful");
  return rep;
}

}  // namespace acfb
