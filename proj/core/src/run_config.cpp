#include "acfb/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "acfb/errors.hpp"
#include "acfb/interface.hpp"

namespace acfb {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config key '" + path + "': " + what);
}

const json* find(const json& root, const std::string& path) {
  const json* j = &root;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (!j->is_object() || !j->contains(key)) return nullptr;
    j = &(*j)[key];
    pos = dot == std::string::npos ? path.size() : dot + 1;
  }
  return j;
}

double num(const json& root, const std::string& path) {
  const json* j = find(root, path);
  if (!j) fail(path, "missing");
  if (!j->is_number()) fail(path, "expected a number");
  return j->get<double>();
}

double num_or(const json& root, const std::string& path, double dflt) {
  const json* j = find(root, path);
  if (!j) return dflt;
  if (!j->is_number()) fail(path, "expected a number");
  return j->get<double>();
}

int integer_or(const json& root, const std::string& path, int dflt) {
  const json* j = find(root, path);
  if (!j) return dflt;
  if (!j->is_number_integer()) fail(path, "expected an integer");
  return j->get<int>();
}

std::string str_or(const json& root, const std::string& path, const std::string& dflt) {
  const json* j = find(root, path);
  if (!j) return dflt;
  if (!j->is_string()) fail(path, "expected a string");
  return j->get<std::string>();
}

std::vector<double> num_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) fail(path, "expected an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

std::vector<double> radii_from(const json& root, const std::string& path,
                               std::vector<double> dflt) {
  const json* j = find(root, path);
  if (!j) return dflt;
  if (j->is_array()) return num_list(*j, path);
  if (j->is_object()) {
    const double rmin = num(root, path + ".r_min");
    const double rmax = num(root, path + ".r_max");
    const double ratio = num_or(root, path + ".ratio", std::pow(2.0, 0.25));
    if (!(rmin > 0.0 && rmax >= rmin && ratio > 1.0)) fail(path, "bad radii ladder");
    return radii_ladder(rmin, rmax, ratio);
  }
  fail(path, "expected an array or a ladder object");
}

Point point_from(const json& root, const std::string& path, Point dflt) {
  const json* j = find(root, path);
  if (!j) return dflt;
  const auto v = num_list(*j, path);
  Point out = {0, 0, 0};
  for (std::size_t d = 0; d < v.size() && d < kMaxAxes; ++d) out[d] = v[d];
  return out;
}

Potential potential_from(const json& root) {
  const json* wells = find(root, "potential.wells");
  if (!wells || !wells->is_array() || wells->empty())
    fail("potential.wells", "expected a nonempty array of points");
  std::vector<std::vector<double>> wl;
  for (const auto& w : *wells) wl.push_back(num_list(w, "potential.wells"));
  const int m = static_cast<int>(wl[0].size());
  for (const auto& w : wl)
    if (static_cast<int>(w.size()) != m) fail("potential.wells", "inconsistent well dimensions");

  const double alpha = num(root, "potential.alpha");

  Modulation g = Modulation::constant(1.0);
  const std::string kind = str_or(root, "potential.modulation.kind", "constant");
  if (kind == "constant") {
    g = Modulation::constant(num_or(root, "potential.modulation.base", 1.0));
  } else if (kind == "quadratic_bump") {
    g.kind = Modulation::Kind::quadratic_bump;
    g.base = num_or(root, "potential.modulation.base", 1.0);
    g.amp = num_or(root, "potential.modulation.amp", 0.0);
    if (const json* c = find(root, "potential.modulation.center"))
      g.center = num_list(*c, "potential.modulation.center");
  } else {
    fail("potential.modulation.kind", "unknown modulation '" + kind + "'");
  }
  double glb = num_or(root, "potential.g_lower_bound", std::min(g.base, 1.0));

  try {
    return Potential::make(m, wl, alpha, g, glb);
  } catch (const Error& e) {
    fail("potential", e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig c;
  c.raw = json_text;
  c.potential = potential_from(root);
  c.m = c.potential.m;

  double maxw = 0.0;
  for (int i = 0; i < c.potential.num_wells(); ++i)
    maxw = std::max(maxw, std::sqrt(norm2(c.potential.well(i))));
  c.field_bound = num_or(root, "potential.field_bound", 2.0 * maxw + 1.0);

  // grid
  c.grid.n = integer_or(root, "grid.n", 1);
  if (c.grid.n < 1 || c.grid.n > 2) fail("grid.n", "supported dimensions are 1 and 2");
  if (const json* e = find(root, "grid.extents")) {
    const auto v = num_list(*e, "grid.extents");
    if (static_cast<int>(v.size()) != c.grid.n) fail("grid.extents", "one entry per axis");
    for (int d = 0; d < c.grid.n; ++d) {
      c.grid.extents[d] = static_cast<int>(v[d]);
      if (c.grid.extents[d] < 2) fail("grid.extents", "extents must be >= 2");
    }
  } else {
    fail("grid.extents", "missing");
  }
  c.grid.h = num(root, "grid.h");
  if (!(c.grid.h > 0.0)) fail("grid.h", "must be positive");
  c.grid.origin = point_from(root, "grid.origin", {0, 0, 0});

  // init
  const std::string mode = str_or(root, "init.mode", "constant");
  if (mode == "constant") {
    c.init.mode = InitMode::constant;
    c.init.well = integer_or(root, "init.well", 0);
  } else if (mode == "sector_wells") {
    c.init.mode = InitMode::sector_wells;
    c.init.center = point_from(root, "init.center", {0, 0, 0});
  } else if (mode == "radial_connection_bc") {
    c.init.mode = InitMode::radial_connection_bc;
    c.init.well_i = integer_or(root, "init.well_i", 0);
    c.init.well_j = integer_or(root, "init.well_j", 1);
    if (const json* l = find(root, "init.left_value")) c.init.left_value = num_list(*l, "init.left_value");
    if (const json* r = find(root, "init.right_value")) c.init.right_value = num_list(*r, "init.right_value");
  } else if (mode == "random") {
    c.init.mode = InitMode::random;
    c.init.seed = static_cast<std::uint64_t>(num_or(root, "init.seed", 0));
  } else {
    fail("init.mode", "unknown mode '" + mode + "'");
  }
  if (const json* l = find(root, "bc.left")) c.bc_left = num_list(*l, "bc.left");
  if (const json* r = find(root, "bc.right")) c.bc_right = num_list(*r, "bc.right");

  // symmetry
  if (const json* s = find(root, "symmetrize")) {
    (void)s;
    const std::string kind = str_or(root, "symmetrize.kind", "triangle_c3v");
    if (kind != "triangle_c3v") fail("symmetrize.kind", "unknown symmetry kind");
    c.use_symmetry = true;
    c.symmetry.kind = SymmetryKind::triangle_c3v;
    c.symmetry.center = point_from(root, "symmetrize.center", {0, 0, 0});
    if (const json* p = find(root, "symmetrize.well_permutation")) {
      for (const auto& v : *p) c.well_permutation.push_back(v.get<int>());
    }
    c.apply_symmetry_in_minimize = integer_or(root, "symmetrize.apply_in_minimize", 0) != 0;
  }

  // minimize
  const std::string scheme = str_or(root, "minimize.scheme", "gradient_descent_bb");
  if (scheme == "gradient_descent_bb") c.minimize.scheme = Scheme::gradient_descent_bb;
  else if (scheme == "semi_implicit") c.minimize.scheme = Scheme::semi_implicit;
  else fail("minimize.scheme", "unknown scheme '" + scheme + "'");
  c.minimize.max_iters = integer_or(root, "minimize.max_iters", 20000);
  c.minimize.grad_tol = num_or(root, "minimize.grad_tol", 1e-10);
  c.minimize.snap_tol = num_or(root, "minimize.snap_tol", -1.0);
  c.minimize.snap_every = integer_or(root, "minimize.snap_every", 10);
  c.minimize.seed = static_cast<std::uint64_t>(num_or(root, "minimize.seed", 0));
  const std::string pol = str_or(root, "minimize.policy.mode", "subgradient_zero");
  if (pol == "subgradient_zero") c.minimize.policy.mode = SingularityMode::subgradient_zero;
  else if (pol == "epsilon_smoothing") c.minimize.policy.mode = SingularityMode::epsilon_smoothing;
  else fail("minimize.policy.mode", "unknown policy mode");
  c.minimize.policy.eps_reg = num_or(root, "minimize.policy.eps_reg", 1e-8);
  if (c.minimize.policy.mode == SingularityMode::epsilon_smoothing && !(c.minimize.policy.eps_reg > 0.0))
    fail("minimize.policy.eps_reg", "must be positive for epsilon_smoothing");

  // analysis
  c.center = point_from(root, "analysis.center", {0, 0, 0});
  c.radii = radii_from(root, "analysis.radii", {});
  const double r0w = c.potential.r0_well();
  std::vector<double> default_gammas;
  if (std::isfinite(r0w))
    default_gammas = {0.4 * r0w, 0.2 * r0w, 0.1 * r0w, 0.05 * r0w};
  if (const json* g = find(root, "analysis.gammas"))
    c.gammas = num_list(*g, "analysis.gammas");
  else
    c.gammas = default_gammas;
  c.c_floor = num_or(root, "analysis.c_floor", 0.15);

  // weiss
  if (const json* probes = find(root, "weiss.probes")) {
    if (!probes->is_array()) fail("weiss.probes", "expected an array of points");
    for (const auto& pt : *probes) {
      const auto v = num_list(pt, "weiss.probes");
      Point q = {0, 0, 0};
      for (std::size_t d = 0; d < v.size() && d < kMaxAxes; ++d) q[d] = v[d];
      c.weiss_probes.push_back(q);
    }
  }
  c.weiss_radii = radii_from(root, "weiss.radii", {});

  // growth
  c.growth_near = point_from(root, "growth.near", {0, 0, 0});
  c.growth_radii = radii_from(root, "growth.radii", {});

  // census
  c.census.L = num_or(root, "census.L", 1.0);
  c.census.k = integer_or(root, "census.k", 4);
  c.census.epsilon = num_or(root, "census.epsilon", 0.05);
  c.census.center = point_from(root, "census.center", {0, 0, 0});
  if (const json* t = find(root, "census.theta")) {
    if (!t->is_number()) fail("census.theta", "expected a number");
    c.census.theta = t->get<double>();
    c.census_auto_theta = false;
  }
  if (const json* kl = find(root, "census.k_list")) {
    for (const auto& v : *kl) c.census_k_list.push_back(v.get<int>());
  }

  // connect1d
  c.conn_i = integer_or(root, "connect1d.well_i", 0);
  c.conn_j = integer_or(root, "connect1d.well_j", 1);
  c.conn_half_length = num_or(root, "connect1d.half_length", 10.0);
  c.conn_nodes = integer_or(root, "connect1d.nodes", 1025);

  if (const json* sa = find(root, "sweep.alphas"))
    c.sweep_alphas = num_list(*sa, "sweep.alphas");

  c.snapshot_in = str_or(root, "snapshot_in", "");
  c.output_dir = str_or(root, "output_dir", "out");
  c.seed = static_cast<std::uint64_t>(num_or(root, "seed", 0));

  if (const json* checks = find(root, "checks")) {
    if (!checks->is_array()) fail("checks", "expected an array");
    for (const auto& ch : *checks) {
      CheckSpec spec;
      if (!ch.contains("kind") || !ch["kind"].is_string()) fail("checks.kind", "missing");
      spec.kind = ch["kind"].get<std::string>();
      spec.a = ch.value("a", 0.0);
      spec.b = ch.value("b", 0.0);
      spec.c = ch.value("c", 0.0);
      c.checks.push_back(spec);
    }
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace acfb
