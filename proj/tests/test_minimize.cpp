#include <doctest.h>

#include <cmath>

#include "acfb/errors.hpp"
#include "acfb/interface.hpp"
#include "acfb/minimize.hpp"
#include "acfb/rng.hpp"

using namespace acfb;

namespace {

Potential obstacle_potential() {  // W(u) = |u|, one well at the origin
  return Potential::make(1, {{0.0}}, 1.0);
}

Potential double_well(double alpha) {
  return Potential::make(1, {{-1.0}, {1.0}}, alpha);
}

GridSpec line_grid(int nodes, double x0, double x1) {
  GridSpec g;
  g.n = 1;
  g.extents = {nodes, 1, 1};
  g.h = (x1 - x0) / (nodes - 1);
  g.origin = {x0, 0, 0};
  return g;
}

// 1D field on [0,1] with Dirichlet ends (0, 1/8); values from fn(x).
template <typename Fn>
VectorField obstacle_field(int nodes, Fn&& fn) {
  const Potential p = obstacle_potential();
  GridSpec g = line_grid(nodes, 0.0, 1.0);
  InitOptions opt;
  opt.mode = InitMode::radial_connection_bc;
  opt.left_value = {0.0};
  opt.right_value = {0.125};
  VectorField f = init_field(g, 1, p, opt);
  for (Index i = 0; i < g.num_nodes(); ++i) f.values[i] = fn(g.origin[0] + g.h * i);
  f.values[0] = 0.0;
  f.values[nodes - 1] = 0.125;
  return f;
}

double obstacle_exact(double x) { return x > 0.5 ? 0.5 * (x - 0.5) * (x - 0.5) : 0.0; }

MinimizeConfig quiet_config() {
  MinimizeConfig cfg;
  cfg.grad_tol = 1e-10;
  cfg.max_iters = 50000;
  cfg.snap_every = 10;
  return cfg;
}

}  // namespace

TEST_CASE("energy: constant well field has zero energy") {
  Potential p = double_well(1.0);
  GridSpec g = line_grid(65, -1.0, 1.0);
  InitOptions opt;
  opt.mode = InitMode::constant;
  opt.well = 1;
  VectorField f = init_field(g, 1, p, opt);
  CHECK(energy(f, p) == 0.0);
}

TEST_CASE("energy: linear ramp reproduces the hand integral 7/3") {
  // u(x) = x on [-1,1]: J = int 1/2 + (1 - x^2) = 1 + 4/3.
  Potential p = double_well(1.0);
  auto ramp_energy = [&](int nodes) {
    GridSpec g = line_grid(nodes, -1.0, 1.0);
    InitOptions opt;
    opt.mode = InitMode::radial_connection_bc;
    VectorField f = init_field(g, 1, p, opt);
    return energy(f, p);
  };
  const double exact = 7.0 / 3.0;
  const double j512 = ramp_energy(1025);  // h = 1/512
  CHECK(std::fabs(j512 - exact) <= 1e-3);

  // Richardson: halving h quarters the quadrature error.
  const double e_h = std::fabs(ramp_energy(513) - exact);
  const double e_h2 = std::fabs(ramp_energy(1025) - exact);
  CHECK(e_h / e_h2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("gradient: zero at a constant well field, exact on the 3-node fixture") {
  Potential p = double_well(1.0);
  GridSpec g3 = line_grid(3, 0.0, 1.0);
  InitOptions opt;
  opt.mode = InitMode::constant;
  opt.well = 0;
  VectorField f = init_field(g3, 1, p, opt);
  VectorField gr = gradient(f, p, SingularityPolicy::subgradient());
  for (double v : gr.values) CHECK(v == 0.0);

  // u = (0, t, 0): middle gradient entry is h*(2t/h^2) + h*W_u(t).
  const double t = 0.3;
  f.values = {0.0, t, 0.0};
  f.frozen = {1, 0, 1};
  gr = gradient(f, p, SingularityPolicy::subgradient());
  const double h = g3.h;
  double wu = 0.0;
  p.grad({&t, 1}, SingularityPolicy::subgradient(), {&wu, 1});
  CHECK(gr.values[1] == doctest::Approx(h * (2.0 * t / (h * h)) + h * wu).epsilon(1e-14));
  CHECK(gr.values[0] == 0.0);
  CHECK(gr.values[2] == 0.0);
}

TEST_CASE("gradient matches central differences of the energy (property)") {
  const double co = std::cos(2.0 * M_PI / 3.0), si = std::sin(2.0 * M_PI / 3.0);
  Potential p = Potential::make(2, {{1.0, 0.0}, {co, si}, {co, -si}}, 1.0);
  GridSpec g;
  g.n = 2;
  g.extents = {9, 9, 1};
  g.h = 0.25;
  g.origin = {-1, -1, 0};

  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    InitOptions opt;
    opt.mode = InitMode::random;
    opt.seed = 1000 + trial;
    VectorField f = init_field(g, 2, p, opt);
    for (Index i = 0; i < g.num_nodes(); ++i) {
      while (p.well_distance(f.at(i)).second < 0.05) {
        f.values[i * 2] = rng.uniform(-1.2, 1.2);
        f.values[i * 2 + 1] = rng.uniform(-1.2, 1.2);
      }
    }
    VectorField gr = gradient(f, p, SingularityPolicy::subgradient());
    // Spot-check a deterministic subset of free coordinates.
    for (Index node = 10; node < g.num_nodes(); node += 13) {
      if (f.frozen[node]) continue;
      for (int c = 0; c < 2; ++c) {
        const double save = f.values[node * 2 + c];
        const double step = 1e-6;
        f.values[node * 2 + c] = save + step;
        const double jp = energy(f, p);
        f.values[node * 2 + c] = save - step;
        const double jm = energy(f, p);
        f.values[node * 2 + c] = save;
        const double fd = (jp - jm) / (2.0 * step);
        CHECK(std::fabs(gr.values[node * 2 + c] - fd) <=
              1e-6 * std::max(1.0, std::fabs(fd)));
      }
    }
  }
}

TEST_CASE("minimize: exact obstacle start stays put and converges fast") {
  VectorField f = obstacle_field(257, obstacle_exact);
  const std::vector<double> before = f.values;
  MinimizeConfig cfg = quiet_config();
  cfg.snap_tol = 1e-4;
  MinimizeResult res = minimize(std::move(f), obstacle_potential(), cfg);
  CHECK(res.converged);
  CHECK(res.iterations <= 5);
  double moved = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i)
    moved = std::max(moved, std::fabs(res.field.values[i] - before[i]));
  CHECK(moved <= 1e-6);
}

TEST_CASE("minimize: obstacle problem from a ramp start hits the closed form") {
  VectorField f = obstacle_field(257, [](double x) { return 0.125 * x; });
  MinimizeConfig cfg = quiet_config();
  MinimizeResult res = minimize(std::move(f), obstacle_potential(), cfg);
  CHECK(res.converged);

  double sup = 0.0;
  const GridSpec& g = res.field.spec;
  for (Index i = 0; i < g.num_nodes(); ++i)
    sup = std::max(sup, std::fabs(res.field.values[i] - obstacle_exact(g.origin[0] + g.h * i)));
  CHECK(sup <= 1e-3);

  // Contact set is an exact prefix ending within 2h of x = 1/2.
  Index last_zero = -1;
  for (Index i = 0; i < g.num_nodes(); ++i)
    if (res.field.values[i] == 0.0) last_zero = i;
    else if (last_zero >= 0) break;
  const double endpoint = g.origin[0] + g.h * last_zero;
  CHECK(std::fabs(endpoint - 0.5) <= 2.0 * g.h);

  // Monotone energy trace.
  for (std::size_t i = 0; i + 1 < res.energy_trace.size(); ++i)
    CHECK(res.energy_trace[i + 1] <= res.energy_trace[i] + 1e-12);

  // EL residual at free nodes tracks the stopping tolerance.
  const auto el = el_residual(res.field, obstacle_potential(), cfg.resolved_snap_tol(obstacle_potential()));
  CHECK(el.forcing_form == "chi_dead_core");
  CHECK(el.interior_resid <= 10.0 * cfg.grad_tol / g.h);
}

TEST_CASE("minimize: constant well field does nothing") {
  Potential p = double_well(1.0);
  GridSpec g = line_grid(33, -1.0, 1.0);
  InitOptions opt;
  opt.mode = InitMode::constant;
  opt.well = 0;
  VectorField f = init_field(g, 1, p, opt);
  MinimizeResult res = minimize(std::move(f), p, quiet_config());
  CHECK(res.converged);
  CHECK(res.energy_trace.back() == 0.0);
  CHECK(res.iterations == 0);
}

TEST_CASE("minimize: random starts agree on the convex one-well fixture") {
  auto run_from_seed = [&](std::uint64_t seed) {
    Rng rng(seed);
    VectorField f = obstacle_field(129, [&](double) { return rng.uniform(0.0, 0.2); });
    MinimizeConfig cfg = quiet_config();
    return minimize(std::move(f), obstacle_potential(), cfg);
  };
  MinimizeResult a = run_from_seed(11);
  MinimizeResult b = run_from_seed(12);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::fabs(a.energy_trace.back() - b.energy_trace.back()) <= 1e-8);
  const Potential p = obstacle_potential();
  const auto la = contact_labels(delta_field(a.field, p));
  const auto lb = contact_labels(delta_field(b.field, p));
  CHECK(la == lb);
}

TEST_CASE("minimize: rerun from the result leaves the contact labels fixed") {
  VectorField f = obstacle_field(257, [](double x) { return 0.125 * x * x; });
  MinimizeConfig cfg = quiet_config();
  const Potential p = obstacle_potential();
  MinimizeResult first = minimize(std::move(f), p, cfg);
  const auto labels1 = contact_labels(delta_field(first.field, p));
  MinimizeResult second = minimize(first.field, p, cfg);
  const auto labels2 = contact_labels(delta_field(second.field, p));
  Index diff = 0;
  for (std::size_t i = 0; i < labels1.size(); ++i)
    if (labels1[i] != labels2[i]) ++diff;
  CHECK(static_cast<double>(diff) <= 0.001 * static_cast<double>(labels1.size()));
}

TEST_CASE("minimize: competitor perturbations never drop below the minimum") {
  VectorField f = obstacle_field(129, [](double x) { return 0.125 * x; });
  const Potential p = obstacle_potential();
  MinimizeConfig cfg = quiet_config();
  MinimizeResult res = minimize(std::move(f), p, cfg);
  const double J = energy(res.field, p);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    VectorField pert = res.field;
    for (Index i = 0; i < pert.spec.num_nodes(); ++i) {
      if (pert.frozen[i]) continue;
      pert.values[i] += rng.uniform(-0.1, 0.1);
    }
    CHECK(energy(pert, p) >= J - 1e-9);
  }
}

TEST_CASE("minimize: max_iters exhaustion reports converged=false") {
  VectorField f = obstacle_field(257, [](double x) { return 0.125 * x; });
  MinimizeConfig cfg = quiet_config();
  cfg.max_iters = 2;
  MinimizeResult res = minimize(std::move(f), obstacle_potential(), cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 2);
}

TEST_CASE("minimize: non-finite input throws NonFiniteEnergy") {
  VectorField f = obstacle_field(33, [](double) { return 1.0; });
  f.values[5] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(minimize(std::move(f), obstacle_potential(), quiet_config()), NonFiniteEnergy);
}

TEST_CASE("minimize: snap_tol must respect r0_well") {
  Potential p = double_well(1.0);
  GridSpec g = line_grid(17, -1.0, 1.0);
  InitOptions opt;
  opt.mode = InitMode::constant;
  VectorField f = init_field(g, 1, p, opt);
  MinimizeConfig cfg;
  cfg.snap_tol = 0.2;  // r0_well = 1, bound is 0.1
  CHECK_THROWS_AS(minimize(std::move(f), p, cfg), ConfigError);
}

TEST_CASE("semi-implicit scheme agrees with BB on the obstacle fixture") {
  MinimizeConfig bb = quiet_config();
  VectorField f1 = obstacle_field(65, [](double x) { return 0.125 * x; });
  MinimizeResult r1 = minimize(std::move(f1), obstacle_potential(), bb);

  MinimizeConfig si = quiet_config();
  si.scheme = Scheme::semi_implicit;
  si.grad_tol = 1e-9;
  VectorField f2 = obstacle_field(65, [](double x) { return 0.125 * x; });
  MinimizeResult r2 = minimize(std::move(f2), obstacle_potential(), si);
  CHECK(r2.converged);

  double sup = 0.0;
  for (std::size_t i = 0; i < r1.field.values.size(); ++i)
    sup = std::max(sup, std::fabs(r1.field.values[i] - r2.field.values[i]));
  CHECK(sup <= 1e-5);
}

TEST_CASE("connect_1d: interior transition with wide plateaus (alpha=1)") {
  Potential p = double_well(1.0);
  MinimizeConfig cfg = quiet_config();
  cfg.max_iters = 200000;
  Connect1D conn = connect_1d(p, 0, 1, 10.0, 2561, cfg);
  CHECK(conn.stats.converged);

  const VectorField& u = conn.stats.field;
  const double snap_tol = cfg.resolved_snap_tol(p);
  Index left = 0, right = 0;
  const Index nn = u.spec.num_nodes();
  for (Index i = 0; i < nn; ++i) {
    const auto [w, d] = p.well_distance(u.at(i));
    if (d <= snap_tol && w == 0) ++left;
    if (d <= snap_tol && w == 1) ++right;
  }
  CHECK(left >= nn / 5);
  CHECK(right >= nn / 5);

  // The transition supports the closed-form width pi/sqrt(2) for this W.
  CHECK(conn.support_width == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(0.05));
  CHECK(conn.free_boundary_positions.size() == 2);
}

TEST_CASE("connect_1d rejects i == j") {
  Potential p = double_well(1.0);
  CHECK_THROWS_AS(connect_1d(p, 1, 1, 10.0, 257, quiet_config()), BadInit);
}

TEST_CASE("connect_1d: equipartition defect away from the free boundary") {
  Potential p = double_well(1.0);
  MinimizeConfig cfg = quiet_config();
  cfg.max_iters = 400000;
  // h = 1/256 on [-10, 10]
  Connect1D conn = connect_1d(p, 0, 1, 10.0, 5121, cfg);
  CHECK(conn.stats.converged);
  CHECK(conn.equip_defect <= 5e-3);
}

TEST_CASE("connect_1d: domain too small throws") {
  Potential p = double_well(1.0);
  CHECK_THROWS_AS(connect_1d(p, 0, 1, 0.9, 129, quiet_config()), DomainTooSmall);
}
