#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "critasym/errors.hpp"
#include "critasym/hopf.hpp"
#include "critasym/kdv_asym.hpp"
#include "critasym/kdv_direct.hpp"
#include "critasym/orthopoly.hpp"
#include "critasym/painleve.hpp"
#include "critasym/rmt_eq.hpp"
#include "critasym/toda.hpp"

namespace critasym::cli {

using json = nlohmann::ordered_json;

void Context::start_compute() {
  cfg.reject_unknown();
  if (!(tol_scale > 0.0) || !std::isfinite(tol_scale)) throw ValidationError("--tol-scale must be positive");
  if (jobs < 1) throw ValidationError("--jobs must be at least 1");
  hash = config_hash(command, cfg.effective(), tol_scale);
  writer = std::make_unique<Writer>(out_dir, command, hash);
  computing = true;
}

json Context::manifest(const json& tolerances) const {
  json m;
  m["command"] = command;
  m["config_hash"] = hash;
  json c = json::object();
  for (const auto& [k, v] : cfg.effective()) c[k] = v;
  m["config"] = c;
  m["tol_scale"] = tol_scale;
  m["tolerances"] = tolerances;
  m["seeds"] = json::object();  // no command draws random numbers
  return m;
}

namespace {

std::string error_cell(const Error& e) { return "error:" + e.kind() + ":" + e.what(); }

int finish(Context& ctx, json manifest, bool partial) {
  const int code = partial ? kPartial : kOk;
  manifest["outputs"] = ctx.writer->files();
  manifest["status"] = partial ? "partial" : "ok";
  manifest["exit_code"] = code;
  ctx.writer->write_json("manifest.json", manifest);
  return code;
}

// "sech2" or "csv:PATH". The file digest enters the configuration hash.
InitialData load_data(Config& cfg) {
  const std::string sel = cfg.get_string("data", "sech2");
  if (sel == "sech2") return make_sech2_data();
  if (sel.rfind("csv:", 0) == 0) {
    const std::string path = sel.substr(4);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read initial data file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(ss.str())));
    cfg.set("data_digest", buf);
    cfg.get_string("data_digest", buf);
    return load_tabulated_csv(path);
  }
  throw ValidationError("data must be sech2 or csv:PATH, got '" + sel + "'");
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

}  // namespace

int cmd_kdv_phase(Context& ctx) {
  const InitialData data = load_data(ctx.cfg);
  const CatastrophePoint cp = breaking_point(data);
  std::vector<double> grid;
  if (ctx.cfg.get_string("t_grid", "auto") == "auto") {
    for (int i = 1; i <= 8; ++i) grid.push_back(cp.t_c + 0.01 * i);
  } else {
    grid = parse_list("t_grid", ctx.cfg.effective().at("t_grid"));
  }
  for (double t : grid) {
    if (!(t > cp.t_c)) throw ValidationError("t_grid value " + fmt(t) + " is not after the breaking time " + fmt(cp.t_c));
  }
  if (!strictly_increasing(grid)) throw ValidationError("t_grid must be strictly increasing");
  ctx.start_compute();

  const PhaseDiagram pd = grid.empty() ? PhaseDiagram{} : kdv_phase_diagram(data, grid);
  CsvTable table({"t", "x_minus", "x_plus", "width", "status"});
  bool monotone = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i < pd.rows.size()) {
      const PhaseRow& r = pd.rows[i];
      table.add_row({fmt(r.t), fmt(r.x_minus), fmt(r.x_plus), fmt(r.x_plus - r.x_minus), "ok"});
      if (i > 0 && !(r.x_plus - r.x_minus > pd.rows[i - 1].x_plus - pd.rows[i - 1].x_minus)) monotone = false;
    } else {
      table.add_row({fmt(grid[i]), "nan", "nan", "nan", "fail:" + pd.error});
    }
  }
  ctx.writer->write_csv("kdv_phase.csv", table);

  json m = ctx.manifest({{"edge_newton", "module default"}});
  m["diagnostics"] = {{"t_c", cp.t_c},
                      {"x_c", cp.x_c},
                      {"u_c", cp.u_c},
                      {"rows_reached", pd.rows.size()},
                      {"widths_increasing", monotone},
                      {"continuation_error", pd.error}};
  return finish(ctx, m, pd.rows.size() < grid.size());
}

int cmd_kdv_compare(Context& ctx) {
  Config& cfg = ctx.cfg;
  const InitialData data = load_data(cfg);
  const CatastrophePoint cp = breaking_point(data);
  const std::string window = cfg.get_string("window", "hopf");
  if (window != "hopf" && window != "leading" && window != "trailing" && window != "catastrophe") {
    throw ValidationError("window must be hopf, leading, trailing or catastrophe");
  }
  const std::vector<double> eps_list = cfg.get_list("eps", "0.2, 0.1, 0.05");
  double t = 0.0;
  const std::string t_text = cfg.get_string("t", "auto");
  if (t_text == "auto") {
    t = window == "hopf" ? 0.1 : window == "catastrophe" ? cp.t_c : 0.25;
  } else {
    t = cfg.get_double("t", 0.0);
  }
  const double P = cfg.get_double("P", 15.0);
  const int m_extra = cfg.get_int("m_extra", 0);
  const double scale = cfg.get_double("window_scale", 5.0);
  const double hx_lo = cfg.get_double("x_lo", -8.0), hx_hi = cfg.get_double("x_hi", 8.0);
  for (double e : eps_list) {
    if (!(e > 0.0)) throw ValidationError("eps values must be positive");
  }
  if (!(P > 0.0) || !(scale > 0.0) || m_extra < 0 || m_extra > 4) {
    throw ValidationError("need P > 0, window_scale > 0 and 0 <= m_extra <= 4");
  }
  if (window == "hopf" && !(t >= 0.0 && t < cp.t_c)) throw ValidationError("hopf window needs 0 <= t < t_c");
  if ((window == "leading" || window == "trailing") && !(t > cp.t_c)) {
    throw ValidationError(window + " window needs t > t_c");
  }
  if (window == "hopf" && !(hx_lo < hx_hi)) throw ValidationError("need x_lo < x_hi");
  KdVOptions kopt;
  kopt.tol *= ctx.tol_scale;
  ctx.start_compute();

  // Shared read-only inputs, prepared serially so that workers never race on
  // continuation caches.
  EdgeSolution edge;
  LeadingEdgeModel lead;
  TrailingEdgeModel trail;
  HMGrid hm;
  PI2Cache cache;
  std::string setup_error;
  try {
    if (window == "leading") {
      edge = solve_leading_edge(t, data);
      lead = make_leading_model(edge, data);
      hm = solve_hastings_mcleod();
    } else if (window == "trailing") {
      edge = solve_trailing_edge(t, data);
      trail = make_trailing_model(edge, data);
    } else if (window == "catastrophe") {
      for (double e : eps_list) cache.get(catastrophe_scaling(cp.x_c, t, e, cp).T);
    }
  } catch (const Error& e) {
    setup_error = error_cell(e);
  }

  struct Row {
    int m = 0;
    double lo = NAN, hi = NAN, err = NAN;
    std::string status = "ok";
  };
  std::vector<Row> rows(eps_list.size());
  run_pool(setup_error.empty() ? ctx.jobs : 1, setup_error.empty() ? eps_list.size() : 0, [&](std::size_t i) {
    const double eps = eps_list[i];
    Row& r = rows[i];
    // Smallest power of two with spacing below eps/4.
    r.m = static_cast<int>(std::ceil(std::log2(8.0 * P / eps) + 1e-12)) + m_extra;
    try {
      RealFn ref;
      if (window == "hopf") {
        r.lo = hx_lo;
        r.hi = hx_hi;
        ref = [&](double x) { return hopf_solve(x, t, data); };
      } else if (window == "leading") {
        const double w = scale * std::pow(eps, 2.0 / 3.0);
        r.lo = edge.x_edge - w;
        r.hi = edge.x_edge + w;
        ref = [&, eps](double x) { return leading_edge_approx(x, eps, lead, hm); };
      } else if (window == "trailing") {
        const double dxdy = trail.x_of(1.0, eps) - trail.x_of(0.0, eps);
        r.lo = std::min(trail.x_of(-scale, eps), trail.x_of(scale, eps));
        r.hi = std::max(trail.x_of(-scale, eps), trail.x_of(scale, eps));
        ref = [&, eps, dxdy](double x) { return trailing_edge_approx((x - edge.x_edge) / dxdy, eps, trail); };
      } else {
        const double w = scale * std::pow(eps, 6.0 / 7.0);
        r.lo = cp.x_c - w;
        r.hi = cp.x_c + w;
        ref = [&, eps](double x) { return catastrophe_approx(x, t, eps, cp, cache); };
      }
      const KdVField f = solve_kdv(data, eps, t, P, r.m, kopt);
      r.err = max_deviation(f, ref, r.lo, r.hi);
    } catch (const Error& e) {
      r.status = error_cell(e);
    }
  });

  CsvTable table({"eps", "m", "t", "x_lo", "x_hi", "max_error", "status"});
  bool partial = !setup_error.empty();
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const Row& r = rows[i];
    const std::string status = setup_error.empty() ? r.status : setup_error;
    if (status != "ok") partial = true;
    table.add_row({fmt(eps_list[i]), std::to_string(r.m), fmt(t), fmt(r.lo), fmt(r.hi), fmt(r.err), status});
  }
  ctx.writer->write_csv("kdv_compare.csv", table);

  // Trend over successful rows ordered by decreasing eps.
  std::vector<std::pair<double, double>> ok;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (setup_error.empty() && rows[i].status == "ok") ok.emplace_back(eps_list[i], rows[i].err);
  }
  std::sort(ok.begin(), ok.end(), [](auto a, auto b) { return a.first > b.first; });
  bool decreasing = true;
  for (std::size_t i = 1; i < ok.size(); ++i) decreasing = decreasing && ok[i].second < ok[i - 1].second;

  json m = ctx.manifest({{"kdv_step_tol", kopt.tol}, {"kdv_tail_limit", kopt.tail_limit}});
  m["diagnostics"] = {{"window", window}, {"t", t}, {"t_c", cp.t_c}, {"errors_decreasing", decreasing}};
  return finish(ctx, m, partial);
}

int cmd_rmt_phase(Context& ctx) {
  const std::vector<double> xs = ctx.cfg.get_list("x_grid", "range(-2, 2, 9)");
  const std::vector<double> ts = ctx.cfg.get_list("t_grid", "range(0, 2, 9)");
  if (!strictly_increasing(xs)) throw ValidationError("x_grid must be strictly increasing");
  ctx.start_compute();

  std::vector<RmtPhaseDiagram> rows(ts.size());
  run_pool(ctx.jobs, ts.size(), [&](std::size_t i) { rows[i] = rmt_phase_diagram(xs, {ts[i]}); });

  CsvTable cells({"t", "x", "class", "margin", "a", "b", "message"});
  CsvTable curves({"t", "x", "kind"});
  bool partial = false;
  int edge_cells = 0;
  for (const auto& pd : rows) {
    for (const PhaseCell& c : pd.cells) {
      cells.add_row({fmt(c.t), fmt(c.x), c.cls, fmt(c.margin), fmt(c.a), fmt(c.b), c.message});
      partial = partial || c.cls == "failure";
      edge_cells += c.cls == "edge_III";
    }
    for (const BreakingPoint& b : pd.curves) curves.add_row({fmt(b.t), fmt(b.x), b.kind});
  }
  ctx.writer->write_csv("rmt_phase.csv", cells);
  ctx.writer->write_csv("rmt_curves.csv", curves);

  json m = ctx.manifest({{"curve_bisection_width", 1e-10}});
  m["diagnostics"] = {{"cells", xs.size() * ts.size()}, {"edge_III_cells", edge_cells}, {"x_star", x_star()}};
  return finish(ctx, m, partial);
}

int cmd_op_table(Context& ctx) {
  Config& cfg = ctx.cfg;
  const QuarticField f{cfg.get_double("x", 0.0), cfg.get_double("t", 0.0)};
  const int N = cfg.get_int("N", 0);
  const int n_lo = cfg.get_int("n_lo", 2);
  const int n_hi = cfg.get_int("n_hi", 16);
  const std::string kind_text = cfg.get_string("kind", "regular");
  AsymKind kind = AsymKind::regular;
  if (kind_text == "interior") {
    kind = AsymKind::interior;
  } else if (kind_text == "edge") {
    kind = AsymKind::edge;
  } else if (kind_text != "regular") {
    throw ValidationError("kind must be regular, interior or edge");
  }
  if (n_lo < 1 || n_hi < n_lo || n_hi > 64) throw ValidationError("need 1 <= n_lo <= n_hi <= 64");
  if (kind == AsymKind::interior && f.t != 9.0) throw ValidationError("kind = interior needs t = 9");
  if (N > 0 && n_hi > 2 * N) throw ValidationError("n_hi may not exceed 2 N");
  ctx.start_compute();

  const std::size_t count = static_cast<std::size_t>(n_hi - n_lo + 1);
  std::vector<AsymComparison> res(count);
  std::vector<std::string> status(count, "ok");
  run_pool(ctx.jobs, count, [&](std::size_t i) {
    const int n = n_lo + static_cast<int>(i);
    try {
      res[i] = compare_asymptotics(f, N, n, n, kind);
    } catch (const Error& e) {
      status[i] = error_cell(e);
    }
  });

  CsvTable table({"n", "gamma", "beta", "gamma_asym", "beta_asym", "err_gamma", "err_beta", "deviation", "status"});
  std::vector<int> ns;
  std::vector<double> eg, dev;
  bool partial = false;
  double a = NAN, b = NAN, max_err = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const int n = n_lo + static_cast<int>(i);
    if (status[i] != "ok" || res[i].rows.empty()) {
      partial = true;
      table.add_row({std::to_string(n), "nan", "nan", "nan", "nan", "nan", "nan", "nan", status[i]});
      continue;
    }
    const AsymRow& r = res[i].rows.front();
    a = res[i].a;
    b = res[i].b;
    table.add_row({std::to_string(n), fmt(r.gamma), fmt(r.beta), fmt(r.gamma_asym), fmt(r.beta_asym), fmt(r.err_gamma),
                   fmt(r.err_beta), fmt(r.deviation), "ok"});
    ns.push_back(n);
    eg.push_back(r.err_gamma);
    dev.push_back(r.deviation);
    max_err = std::max(max_err, r.err_gamma);
  }
  ctx.writer->write_csv("op_table.csv", table);

  json m = ctx.manifest({{"inner_product_digits", 50}, {"boundary_mass_limit", 1e-32}});
  m["diagnostics"] = {{"kind", to_string(kind)},
                      {"a", a},
                      {"b", b},
                      {"max_err_gamma", max_err},
                      {"err_gamma_slope", ns.size() >= 2 ? loglog_slope(ns, eg) : NAN},
                      {"deviation_slope", ns.size() >= 2 ? loglog_slope(ns, dev) : NAN}};
  return finish(ctx, m, partial);
}

int cmd_toda_run(Context& ctx) {
  Config& cfg = ctx.cfg;
  const std::string init = cfg.get_string("init", "gaussian");
  const int n_max = cfg.get_int("n_max", 40);
  const int k = cfg.get_int("k", 1);
  const double dt = cfg.get_double("dt", 1e-3);
  const int steps = cfg.get_int("steps", 100);
  double eps = 0.0;
  std::function<TodaState()> make;
  Polynomial V;  // potential whose string equation the initial state solves
  bool exact_string = true;
  if (init == "gaussian") {
    eps = cfg.get_double("eps", 0.05);
    V = Polynomial({0.0, 0.0, 0.5});
    make = [&] { return gaussian_state(eps, n_max); };
  } else if (init == "field") {
    const QuarticField f{cfg.get_double("x", 0.0), cfg.get_double("t", 0.0)};
    const int N = cfg.get_int("N", 32);
    if (N < 1) throw ValidationError("N must be positive");
    eps = 1.0 / N;
    V = potential(f);
    make = [f, N, n_max] { return state_from_recurrence(compute_recurrence(f, N, n_max)); };
  } else if (init == "hodograph") {
    eps = cfg.get_double("eps", 0.05);
    const std::vector<double> c = cfg.get_list("V0", "0, 0, 0.5");
    const double t0 = cfg.get_double("t0", 0.0);
    if (c.size() < 3) throw ValidationError("V0 needs degree >= 2");
    V = Polynomial(c);
    exact_string = false;
    make = [c, t0, &eps, n_max] { return state_from_hodograph(Polynomial(c), t0, eps, n_max); };
  } else {
    throw ValidationError("init must be gaussian, field or hodograph");
  }
  if (!(eps > 0.0) || n_max < 5 || n_max > 4096) throw ValidationError("need eps > 0 and 5 <= n_max <= 4096");
  if (k < 1 || k > 4 || !(dt > 0.0) || steps < 0) throw ValidationError("need 1 <= k <= 4, dt > 0 and steps >= 0");
  ctx.start_compute();

  const TodaState s0 = make();
  const TodaState s = k == 1 ? flow_t1(s0, dt, steps) : flow_hierarchy(s0, k, dt, steps);

  auto table = [](const TodaState& st) {
    CsvTable tb({"n", "gamma", "beta"});
    for (int n = 0; n <= st.n_max(); ++n) tb.add_row({std::to_string(n), fmt(st.gamma[n]), fmt(st.beta[n])});
    return tb;
  };
  ctx.writer->write_csv("toda_initial.csv", table(s0));
  ctx.writer->write_csv("toda_state.csv", table(s));

  // The flowed state solves the string equation of V + t_k xi^k on rows the
  // Dirichlet end has not reached.
  std::vector<double> c(V.coeffs());
  if (static_cast<int>(c.size()) <= k) c.resize(k + 1, 0.0);
  c[k] += dt * steps;
  double bulk = NAN;
  if (exact_string) {
    const StringResidual r = string_residual(s, Polynomial(c));
    bulk = 0.0;
    for (std::size_t i = 0; i < r.n.size() && r.n[i] <= n_max / 2; ++i) {
      bulk = std::max({bulk, std::abs(r.res1[i]), std::abs(r.res2[i])});
    }
  }
  const std::vector<double> spec = jacobi_spectrum(s);

  json m = ctx.manifest({{"spectral_drift_limit", 1e-6}});
  json times = json::object();
  for (const auto& [kk, tv] : s.times) times[std::to_string(kk)] = tv;
  m["diagnostics"] = {{"eps", eps},
                      {"times", times},
                      {"spectral_drift", s.drift},
                      {"spectrum_min", spec.front()},
                      {"spectrum_max", spec.back()},
                      {"string_residual_bulk", bulk}};
  return finish(ctx, m, false);
}

}  // namespace critasym::cli
