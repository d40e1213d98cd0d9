#include "acfb/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include "acfb/errors.hpp"
#include "acfb/interface.hpp"
#include "acfb/minimize.hpp"
#include "acfb/reports.hpp"
#include "acfb/snapshot.hpp"
#include "acfb/weiss.hpp"

namespace acfb {

namespace {

namespace fs = std::filesystem;

struct Session {
  const RunConfig& cfg;
  std::string out;
  RunOutcome outcome;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  Session(const RunConfig& c, const std::string& override_dir) : cfg(c) {
    out = override_dir.empty() ? c.output_dir : override_dir;
    fs::create_directories(out);
  }

  std::string path(const std::string& name) const { return out + "/" + name; }

  void emit(const std::string& name, const std::string& content) {
    write_text_file(path(name), content);
    outcome.artifacts.push_back(name);
  }

  void check(const std::string& name, bool pass, const std::string& detail) {
    outcome.checks.push_back({name, pass, detail});
  }

  void finish(const std::string& subcommand, bool check_mode) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string m = "{\n";
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg.raw)));
    m += "  \"config_hash\": \"" + std::string(hex) + "\",\n";
    m += "  \"subcommand\": \"" + subcommand + "\",\n";
    m += "  \"version\": \"0.1.0\",\n";
    m += "  \"seed\": " + std::to_string(cfg.seed) + ",\n";
    m += "  \"wall_time_s\": " + fmt17(wall) + ",\n";
    m += "  \"artifacts\": [";
    for (std::size_t i = 0; i < outcome.artifacts.size(); ++i) {
      if (i) m += ", ";
      m += "\"" + outcome.artifacts[i] + "\"";
    }
    m += "]\n}\n";
    write_text_file(path("manifest.json"), m);
    if (check_mode && !outcome.all_checks_pass()) outcome.exit_code = 4;
  }
};

VectorField build_field(const RunConfig& cfg) {
  VectorField f = init_field(cfg.grid, cfg.m, cfg.potential, cfg.init);
  if (!cfg.bc_left.empty() || !cfg.bc_right.empty()) {
    if (cfg.grid.n != 1) throw ConfigError("bc.left/bc.right apply to 1D grids only");
    const Index last = cfg.grid.num_nodes() - 1;
    if (!cfg.bc_left.empty()) {
      if (static_cast<int>(cfg.bc_left.size()) != cfg.m) throw ConfigError("bc.left dimension mismatch");
      f.set(0, cfg.bc_left);
      f.frozen[0] = 1;
    }
    if (!cfg.bc_right.empty()) {
      if (static_cast<int>(cfg.bc_right.size()) != cfg.m) throw ConfigError("bc.right dimension mismatch");
      f.set(last, cfg.bc_right);
      f.frozen[last] = 1;
    }
  }
  if (cfg.use_symmetry)
    f = symmetrize(f, cfg.symmetry, cfg.potential, cfg.well_permutation);
  return f;
}

VectorField load_input_field(const Session& s) {
  const std::string p = s.cfg.snapshot_in.empty() ? s.path("snapshot.acfb") : s.cfg.snapshot_in;
  return load_snapshot(p);
}

std::string join_doubles(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt17(v[i]);
  }
  return s;
}

// ---- subcommands -----------------------------------------------------------

void do_minimize(Session& s) {
  const RunConfig& cfg = s.cfg;
  validate(cfg.potential, cfg.field_bound);
  VectorField f = build_field(cfg);

  MinimizeConfig mc = cfg.minimize;
  if (cfg.use_symmetry && cfg.apply_symmetry_in_minimize) {
    const SymmetryGroup group = cfg.symmetry;
    const Potential pot = cfg.potential;
    const std::vector<int> perm = cfg.well_permutation;
    mc.projector = [group, pot, perm](VectorField& field) {
      field = symmetrize(field, group, pot, perm);
    };
  }

  MinimizeResult res = minimize(std::move(f), cfg.potential, mc);

  save_snapshot(res.field, s.path("snapshot.acfb"));
  s.outcome.artifacts.push_back("snapshot.acfb");

  CsvTable trace;
  trace.header = {"iter", "J"};
  for (std::size_t i = 0; i < res.energy_trace.size(); ++i)
    trace.add_row({std::to_string(i), fmt17(res.energy_trace[i])});
  s.emit("energy_trace.csv", trace.to_string());

  CsvTable snap;
  snap.header = {"sweep", "clamped_nodes"};
  for (std::size_t i = 0; i < res.snap_count_trace.size(); ++i)
    snap.add_row({std::to_string(i), std::to_string(res.snap_count_trace[i])});
  s.emit("snap_trace.csv", snap.to_string());

  CsvTable summary;
  summary.header = {"converged", "iterations", "final_grad_norm", "el_residual", "energy"};
  summary.add_row({res.converged ? "1" : "0", std::to_string(res.iterations),
                   fmt17(res.final_grad_norm), fmt17(res.el_residual_interior),
                   fmt17(res.energy_trace.back())});
  s.emit("minimize_summary.csv", summary.to_string());

  for (const auto& ck : cfg.checks) {
    if (ck.kind == "converged") {
      s.check("converged", res.converged,
              "final projected gradient " + fmt17(res.final_grad_norm));
    } else if (ck.kind == "energy_monotone") {
      bool mono = true;
      for (std::size_t i = 0; i + 1 < res.energy_trace.size(); ++i)
        mono = mono && res.energy_trace[i + 1] <= res.energy_trace[i] + 1e-12;
      s.check("energy_monotone", mono, "");
    } else if (ck.kind == "obstacle_closed_form") {
      // 1D fixture u(x) = max(x-b, 0)^2 / 2; a = sup tolerance, c = contact
      // tolerance in nodes.
      const auto& u = res.field;
      const GridSpec& g = u.spec;
      double sup = 0.0;
      for (Index i = 0; i < g.num_nodes(); ++i) {
        const double x = g.origin[0] + g.h * i;
        const double exact = x > ck.b ? 0.5 * (x - ck.b) * (x - ck.b) : 0.0;
        sup = std::max(sup, std::fabs(u.values[i] - exact));
      }
      Index last_zero = -1;
      for (Index i = 0; i < g.num_nodes(); ++i)
        if (u.values[i] == 0.0) last_zero = i;
        else if (last_zero >= 0) break;
      const double endpoint = g.origin[0] + g.h * last_zero;
      const bool pass = sup <= ck.a && std::fabs(endpoint - ck.b) <= ck.c * g.h;
      s.check("obstacle_closed_form", pass,
              "sup err " + fmt17(sup) + ", contact endpoint " + fmt17(endpoint));
    }
  }
}

void do_analyze(Session& s) {
  const RunConfig& cfg = s.cfg;
  VectorField f = load_input_field(s);
  const Potential& p = cfg.potential;
  const DeltaGrid d = delta_field(f, p);
  if (cfg.radii.empty()) throw ConfigError("analysis.radii is required for analyze");

  const InterfaceReport rep =
      interface_measures(f, p, d, cfg.center, cfg.radii, cfg.gammas);

  CsvTable t;
  t.header = {"r", "measure_I0"};
  for (double g : rep.gammas) t.header.push_back("measure_Igamma_" + fmt17(g));
  for (int w = 0; w < p.num_wells(); ++w) t.header.push_back("contact_" + std::to_string(w));
  t.header.push_back("boundary_len");
  t.header.push_back("energy_ball");
  for (std::size_t k = 0; k < rep.radii.size(); ++k) {
    std::vector<std::string> row = {fmt17(rep.radii[k]), fmt17(rep.measure_I0[k])};
    for (std::size_t gi = 0; gi < rep.gammas.size(); ++gi)
      row.push_back(fmt17(rep.measure_Igamma[gi][k]));
    for (int w = 0; w < p.num_wells(); ++w) row.push_back(fmt17(rep.contact_measure[w][k]));
    row.push_back(fmt17(rep.boundary_length[k]));
    row.push_back(fmt17(rep.energy_ball[k]));
    t.add_row(row);
  }
  s.emit("interface_report.csv", t.to_string());

  const auto labels = contact_labels(d);
  TwoPhaseCheck tp;
  if (f.spec.n == 2) {
    tp = two_phase_check(f.spec, labels, p.num_wells(), cfg.center, cfg.radii, cfg.c_floor);
    CsvTable tt;
    tt.header = {"r", "m1", "m2", "top_well", "floor"};
    for (std::size_t k = 0; k < tp.radii.size(); ++k)
      tt.add_row({fmt17(tp.radii[k]), fmt17(tp.m1[k]), fmt17(tp.m2[k]),
                  std::to_string(tp.top_well[k]),
                  fmt17(tp.c_floor * std::pow(tp.radii[k], f.spec.n))});
    s.emit("two_phase.csv", tt.to_string());
  }

  if (rep.fits_valid) {
    s.emit("fit_I0.svg", loglog_svg("measure I0 vs r", rep.radii, rep.measure_I0,
                                    rep.fit_I0.slope, rep.fit_I0.intercept));
    s.emit("fit_boundary.svg", loglog_svg("boundary length vs r", rep.radii,
                                          rep.boundary_length, rep.fit_boundary.slope,
                                          rep.fit_boundary.intercept));
    s.emit("fit_energy.svg", loglog_svg("J(B_r) vs r", rep.radii, rep.energy_ball,
                                        rep.fit_energy.slope, rep.fit_energy.intercept));
    CsvTable fits;
    fits.header = {"quantity", "slope", "intercept", "r2"};
    fits.add_row({"measure_I0", fmt17(rep.fit_I0.slope), fmt17(rep.fit_I0.intercept),
                  fmt17(rep.fit_I0.r2)});
    fits.add_row({"boundary_len", fmt17(rep.fit_boundary.slope),
                  fmt17(rep.fit_boundary.intercept), fmt17(rep.fit_boundary.r2)});
    fits.add_row({"energy_ball", fmt17(rep.fit_energy.slope), fmt17(rep.fit_energy.intercept),
                  fmt17(rep.fit_energy.r2)});
    s.emit("fits.csv", fits.to_string());
  }

  for (const auto& ck : cfg.checks) {
    if (ck.kind == "slope_I0") {
      const bool ok = rep.fits_valid && rep.fit_I0.slope >= ck.a && rep.fit_I0.slope <= ck.b;
      s.check("slope_I0", ok, "slope " + fmt17(rep.fit_I0.slope));
    } else if (ck.kind == "slope_boundary") {
      const bool ok =
          rep.fits_valid && rep.fit_boundary.slope >= ck.a && rep.fit_boundary.slope <= ck.b;
      s.check("slope_boundary", ok, "slope " + fmt17(rep.fit_boundary.slope));
    } else if (ck.kind == "slope_energy") {
      const bool ok =
          rep.fits_valid && rep.fit_energy.slope >= ck.a && rep.fit_energy.slope <= ck.b;
      s.check("slope_energy", ok, "slope " + fmt17(rep.fit_energy.slope));
    } else if (ck.kind == "boundary_positivity") {
      bool ok = rep.fits_valid;
      const double c0 = std::exp(rep.fit_boundary.intercept);
      for (std::size_t k = 0; ok && k < rep.radii.size(); ++k)
        ok = rep.boundary_length[k] >= ck.a * c0 * rep.radii[k];
      s.check("boundary_positivity", ok, "prefactor " + fmt17(c0));
    } else if (ck.kind == "two_phase") {
      s.check("two_phase", tp.pass,
              "first passing radius " + fmt17(tp.first_passing_radius));
    } else if (ck.kind == "dead_core_fraction") {
      // a = ball radius, b = min fraction, c = max fraction (0 => exact bound)
      double in_ball = 0.0, clamped = 0.0;
      int idx[kMaxAxes] = {0, 0, 0};
      const GridSpec& g = f.spec;
      for (Index lin = 0; lin < g.num_nodes(); ++lin) {
        double r2 = 0.0;
        for (int dd = 0; dd < g.n; ++dd) {
          const double dx = g.origin[dd] + g.h * idx[dd] - cfg.center[dd];
          r2 += dx * dx;
        }
        if (r2 <= ck.a * ck.a) {
          in_ball += 1.0;
          if (d.delta[lin] == 0.0) clamped += 1.0;
        }
        for (int dd = g.n - 1; dd >= 0; --dd) {
          if (++idx[dd] < g.extents[dd]) break;
          idx[dd] = 0;
        }
      }
      const double frac = in_ball > 0 ? clamped / in_ball : 0.0;
      const bool ok = frac >= ck.b && frac <= (ck.c > 0.0 ? ck.c : 1.0);
      s.check("dead_core_fraction", ok, "fraction " + fmt17(frac));
    } else if (ck.kind == "igamma_monotone") {
      bool ok = true;
      for (std::size_t gi = 0; gi + 1 < rep.gammas.size(); ++gi)
        for (std::size_t k = 0; k < rep.radii.size(); ++k)
          if (rep.gammas[gi] < rep.gammas[gi + 1])
            ok = ok && rep.measure_Igamma[gi][k] >= rep.measure_Igamma[gi + 1][k];
      s.check("igamma_monotone", ok, "");
    }
  }
}

void do_weiss(Session& s) {
  const RunConfig& cfg = s.cfg;
  VectorField f = load_input_field(s);
  const Potential& p = cfg.potential;
  if (cfg.weiss_radii.empty()) throw ConfigError("weiss.radii is required");
  if (cfg.weiss_probes.empty()) throw ConfigError("weiss.probes is required");
  const DeltaGrid d = delta_field(f, p);
  const double snap_tol = cfg.minimize.resolved_snap_tol(p);

  bool all_monotone = true;
  double worst_constancy = 0.0;
  std::vector<double> all_values;
  for (std::size_t pi = 0; pi < cfg.weiss_probes.size(); ++pi) {
    const Index node = find_free_boundary_node(d, cfg.weiss_probes[pi], snap_tol);
    int idx[kMaxAxes] = {0, 0, 0};
    f.spec.unindex(node, {idx, static_cast<std::size_t>(f.spec.n)});
    const Point x0 = f.spec.position({idx, static_cast<std::size_t>(f.spec.n)});
    const WeissTrace tr = weiss_trace(f, p, x0, cfg.weiss_radii);
    all_monotone = all_monotone && tr.monotone_pass;
    for (double v : tr.values) all_values.push_back(v);

    CsvTable t;
    t.header = {"r", "W", "dW_forward", "error_budget", "quad_slack"};
    for (std::size_t k = 0; k < tr.radii.size(); ++k)
      t.add_row({fmt17(tr.radii[k]), fmt17(tr.values[k]), fmt17(tr.dW_forward[k]),
                 fmt17(tr.error_budget[k]), fmt17(tr.quad_slack[k])});
    s.emit("weiss_" + std::to_string(pi) + ".csv", t.to_string());

    CsvTable meta;
    meta.header = {"x0", "kappa", "base_well", "monotone_pass", "worst_margin"};
    meta.add_row({join_doubles({tr.x0.data(), static_cast<std::size_t>(f.spec.n)}),
                  fmt17(tr.kappa), std::to_string(tr.base_well),
                  tr.monotone_pass ? "1" : "0", fmt17(tr.worst_margin)});
    s.emit("weiss_" + std::to_string(pi) + "_meta.csv", meta.to_string());
  }

  for (const auto& ck : cfg.checks) {
    if (ck.kind == "weiss_monotone") {
      s.check("weiss_monotone", all_monotone, "");
    } else if (ck.kind == "weiss_constancy") {
      for (double v : all_values) worst_constancy = std::max(worst_constancy, std::fabs(v - ck.a));
      s.check("weiss_constancy", worst_constancy <= ck.b,
              "max |W - " + fmt17(ck.a) + "| = " + fmt17(worst_constancy));
    }
  }
}

void do_growth(Session& s) {
  const RunConfig& cfg = s.cfg;
  VectorField f = load_input_field(s);
  const Potential& p = cfg.potential;
  if (cfg.growth_radii.empty()) throw ConfigError("growth.radii is required");
  const DeltaGrid d = delta_field(f, p);
  const double snap_tol = cfg.minimize.resolved_snap_tol(p);
  const Index node = find_free_boundary_node(d, cfg.growth_near, snap_tol);
  const GrowthProbe probe = growth_probe(f, p, d, node, cfg.growth_radii, snap_tol);

  CsvTable t;
  t.header = {"r", "sup_delta", "sup_grad"};
  for (std::size_t k = 0; k < probe.radii.size(); ++k)
    t.add_row({fmt17(probe.radii[k]), fmt17(probe.sup_delta[k]), fmt17(probe.sup_grad[k])});
  s.emit("growth.csv", t.to_string());

  CsvTable meta;
  meta.header = {"x0", "kappa", "exp_delta", "r2_delta", "exp_grad", "r2_grad",
                 "delta_at_x0", "grad_at_x0", "gate_delta_ok", "gate_grad_ok"};
  meta.add_row({join_doubles({probe.x0.data(), static_cast<std::size_t>(f.spec.n)}),
                fmt17(probe.kappa),
                probe.fit_delta_valid ? fmt17(probe.fit_delta.slope) : "nan",
                probe.fit_delta_valid ? fmt17(probe.fit_delta.r2) : "nan",
                probe.fit_grad_valid ? fmt17(probe.fit_grad.slope) : "nan",
                probe.fit_grad_valid ? fmt17(probe.fit_grad.r2) : "nan",
                fmt17(probe.delta_at_x0), fmt17(probe.grad_at_x0),
                probe.gate_delta_ok ? "1" : "0", probe.gate_grad_ok ? "1" : "0"});
  s.emit("growth_meta.csv", meta.to_string());

  if (probe.fit_delta_valid)
    s.emit("growth_fit.svg", loglog_svg("sup delta vs r", probe.radii, probe.sup_delta,
                                        probe.fit_delta.slope, probe.fit_delta.intercept));

  for (const auto& ck : cfg.checks) {
    if (ck.kind == "growth_exponent") {
      const bool ok = probe.fit_delta_valid && std::fabs(probe.fit_delta.slope - ck.a) <= ck.b;
      s.check("growth_exponent", ok,
              "exponent " + (probe.fit_delta_valid ? fmt17(probe.fit_delta.slope) : "n/a") +
                  " target " + fmt17(ck.a));
    } else if (ck.kind == "growth_grad_exponent") {
      const bool ok = probe.fit_grad_valid && std::fabs(probe.fit_grad.slope - ck.a) <= ck.b;
      s.check("growth_grad_exponent", ok,
              "exponent " + (probe.fit_grad_valid ? fmt17(probe.fit_grad.slope) : "n/a"));
    }
  }
}

void write_census_csvs(Session& s, const std::vector<CubeCensus>& list) {
  CsvTable totals;
  totals.header = {"k", "T1", "T2", "T3", "T4", "T5", "total", "violations"};
  for (const auto& c : list) {
    Index tot = 0;
    for (int t = 1; t <= 5; ++t) tot += c.totals[t];
    totals.add_row({std::to_string(c.k), std::to_string(c.totals[1]), std::to_string(c.totals[2]),
                    std::to_string(c.totals[3]), std::to_string(c.totals[4]),
                    std::to_string(c.totals[5]), std::to_string(tot),
                    std::to_string(c.violations)});
  }
  s.emit("census_totals.csv", totals.to_string());

  for (const auto& c : list) {
    CsvTable t;
    t.header = {"index", "i", "j"};
    for (int w = 0; w < c.num_wells; ++w) t.header.push_back("sigma_" + std::to_string(w));
    t.header.push_back("class");
    t.header.push_back("dominant_well");
    const int per = 2 * c.k;
    for (Index cu = 0; cu < static_cast<Index>(c.cls.size()); ++cu) {
      std::vector<std::string> row = {std::to_string(cu), std::to_string(cu / per),
                                      std::to_string(cu % per)};
      for (int w = 0; w < c.num_wells; ++w) row.push_back(fmt17(c.sigma[cu][w]));
      row.push_back("T" + std::to_string(static_cast<int>(c.cls[cu])));
      row.push_back(std::to_string(c.dominant[cu]));
      t.add_row(row);
    }
    s.emit("census_cubes_k" + std::to_string(c.k) + ".csv", t.to_string());
  }
}

void do_census(Session& s) {
  const RunConfig& cfg = s.cfg;
  VectorField f = load_input_field(s);
  const Potential& p = cfg.potential;

  CensusConfig base = cfg.census;
  if (cfg.census_auto_theta)
    base.theta = select_nondegeneracy_constants(p, f.spec.n).theta;

  std::vector<int> ks = cfg.census_k_list;
  if (ks.empty()) ks = {base.k};

  CensusScaling scaling = census_scaling(f, p, base, ks);
  write_census_csvs(s, scaling.per_k);

  CsvTable sc;
  sc.header = {"slope", "r2", "vacuous", "pass"};
  sc.add_row({fmt17(scaling.slope), fmt17(scaling.r2), scaling.vacuous ? "1" : "0",
              scaling.pass ? "1" : "0"});
  s.emit("census_scaling.csv", sc.to_string());

  for (const auto& ck : cfg.checks) {
    if (ck.kind == "census_partition") {
      bool ok = true;
      std::string detail;
      for (const auto& c : scaling.per_k) {
        Index tot = 0;
        for (int t = 1; t <= 5; ++t) tot += c.totals[t];
        const Index expect = static_cast<Index>(std::pow(2 * c.k, c.n));
        const Index t1_expect =
            expect - static_cast<Index>(std::pow(2 * c.k - 2, c.n));
        if (tot != expect || c.totals[1] != t1_expect) {
          ok = false;
          detail = "k=" + std::to_string(c.k);
        }
      }
      s.check("census_partition", ok, detail);
    } else if (ck.kind == "census_scaling") {
      const bool ok = scaling.vacuous || scaling.slope <= ck.a;
      s.check("census_scaling", ok, "slope " + fmt17(scaling.slope));
    }
  }
}

void do_connect1d(Session& s, const Potential* alt = nullptr, const std::string& tag = "") {
  const RunConfig& cfg = s.cfg;
  const Potential& p = alt ? *alt : cfg.potential;
  validate(p, cfg.field_bound);

  Connect1D conn = connect_1d(p, cfg.conn_i, cfg.conn_j, cfg.conn_half_length, cfg.conn_nodes,
                              cfg.minimize);
  const VectorField& u = conn.stats.field;
  const double snap_tol = cfg.minimize.resolved_snap_tol(p);

  CsvTable t;
  t.header = {"x"};
  for (int c = 0; c < u.m; ++c) t.header.push_back("u_" + std::to_string(c));
  t.header.push_back("delta");
  for (Index i = 0; i < u.spec.num_nodes(); ++i) {
    std::vector<std::string> row = {fmt17(u.spec.origin[0] + u.spec.h * i)};
    for (int c = 0; c < u.m; ++c) row.push_back(fmt17(u.values[i * u.m + c]));
    row.push_back(fmt17(p.well_distance(u.at(i)).second));
    t.add_row(row);
  }
  s.emit("profile" + tag + ".csv", t.to_string());

  CsvTable sum;
  sum.header = {"alpha", "support_width", "equip_defect", "converged", "iterations", "energy"};
  sum.add_row({fmt17(p.alpha), fmt17(conn.support_width), fmt17(conn.equip_defect),
               conn.stats.converged ? "1" : "0", std::to_string(conn.stats.iterations),
               fmt17(conn.stats.energy_trace.back())});
  s.emit("connect_summary" + tag + ".csv", sum.to_string());

  GrowthProbe probe;
  bool have_probe = false;
  if (!cfg.growth_radii.empty()) {
    const DeltaGrid d = delta_field(u, p);
    Point near = {conn.free_boundary_positions.empty() ? 0.0 : conn.free_boundary_positions.front(),
                  0, 0};
    const Index node = find_free_boundary_node(d, near, snap_tol);
    probe = growth_probe(u, p, d, node, cfg.growth_radii, snap_tol);
    have_probe = true;
    CsvTable gt;
    gt.header = {"r", "sup_delta", "sup_grad"};
    for (std::size_t k = 0; k < probe.radii.size(); ++k)
      gt.add_row({fmt17(probe.radii[k]), fmt17(probe.sup_delta[k]), fmt17(probe.sup_grad[k])});
    s.emit("growth" + tag + ".csv", gt.to_string());
  }

  for (const auto& ck : cfg.checks) {
    if (ck.kind == "connect_plateaus") {
      Index left = 0, right = 0;
      const Index nn = u.spec.num_nodes();
      for (Index i = 0; i < nn; ++i) {
        const auto [w, dd] = p.well_distance(u.at(i));
        if (dd <= snap_tol && w == cfg.conn_i) ++left;
        if (dd <= snap_tol && w == cfg.conn_j) ++right;
      }
      const double fl = static_cast<double>(left) / nn, fr = static_cast<double>(right) / nn;
      s.check("connect_plateaus" + tag, fl >= ck.a && fr >= ck.a,
              "fractions " + fmt17(fl) + ", " + fmt17(fr));
    } else if (ck.kind == "equipartition") {
      s.check("equipartition" + tag, conn.equip_defect <= ck.a,
              "defect " + fmt17(conn.equip_defect));
    } else if (ck.kind == "growth_exponent" && have_probe) {
      const double target = ck.a > 0.0 ? ck.a : 2.0 / (2.0 - p.alpha);
      const bool ok = probe.fit_delta_valid && std::fabs(probe.fit_delta.slope - target) <= ck.b;
      s.check("growth_exponent" + tag, ok,
              "exponent " + (probe.fit_delta_valid ? fmt17(probe.fit_delta.slope) : "n/a") +
                  " target " + fmt17(target));
    }
  }
}

void do_sweep(Session& s) {
  const RunConfig& cfg = s.cfg;
  if (cfg.sweep_alphas.empty()) throw ConfigError("sweep.alphas is required");

  CsvTable agg;
  agg.header = {"alpha", "kappa_target", "exp_delta", "r2", "support_width", "equip_defect",
                "converged"};

  for (double alpha : cfg.sweep_alphas) {
    Potential p = cfg.potential;
    p.alpha = alpha;
    validate(p, cfg.field_bound);
    Connect1D conn = connect_1d(p, cfg.conn_i, cfg.conn_j, cfg.conn_half_length, cfg.conn_nodes,
                                cfg.minimize);
    const double snap_tol = cfg.minimize.resolved_snap_tol(p);
    const VectorField& u = conn.stats.field;

    double slope = std::numeric_limits<double>::quiet_NaN(), r2 = 0.0;
    if (!cfg.growth_radii.empty()) {
      const DeltaGrid d = delta_field(u, p);
      Point near = {conn.free_boundary_positions.empty() ? 0.0
                                                         : conn.free_boundary_positions.front(),
                    0, 0};
      const Index node = find_free_boundary_node(d, near, snap_tol);
      const GrowthProbe probe = growth_probe(u, p, d, node, cfg.growth_radii, snap_tol);
      if (probe.fit_delta_valid) {
        slope = probe.fit_delta.slope;
        r2 = probe.fit_delta.r2;
      }
    }
    agg.add_row({fmt17(alpha), fmt17(2.0 / (2.0 - alpha)), fmt17(slope), fmt17(r2),
                 fmt17(conn.support_width), fmt17(conn.equip_defect),
                 conn.stats.converged ? "1" : "0"});

    for (const auto& ck : cfg.checks) {
      if (ck.kind == "growth_exponent_sweep") {
        const double target = 2.0 / (2.0 - alpha);
        const bool ok = std::isfinite(slope) && std::fabs(slope - target) <= ck.a;
        s.check("growth_exponent_alpha_" + fmt17(alpha), ok,
                "exponent " + fmt17(slope) + " target " + fmt17(target));
      }
    }
  }
  s.emit("sweep.csv", agg.to_string());
}

}  // namespace

RunOutcome run_subcommand(const std::string& subcommand, const RunConfig& cfg, bool check_mode,
                          const std::string& out_dir_override) {
  Session s(cfg, out_dir_override);
  try {
    if (subcommand == "minimize") do_minimize(s);
    else if (subcommand == "analyze") do_analyze(s);
    else if (subcommand == "weiss") do_weiss(s);
    else if (subcommand == "growth") do_growth(s);
    else if (subcommand == "census") do_census(s);
    else if (subcommand == "connect1d") do_connect1d(s);
    else if (subcommand == "sweep") do_sweep(s);
    else {
      s.outcome.exit_code = 2;
      s.outcome.message = "unknown subcommand '" + subcommand + "'";
      return s.outcome;
    }
  } catch (const NonFiniteEnergy& e) {
    s.outcome.exit_code = 3;
    s.outcome.message = e.what();
    return s.outcome;
  } catch (const Error& e) {
    s.outcome.exit_code = 2;
    s.outcome.message = e.what();
    return s.outcome;
  }
  s.finish(subcommand, check_mode);
  return s.outcome;
}

}  // namespace acfb
