#include "tgf/app/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

#include "tgf/app/io.hpp"
#include "tgf/spectral_ops.hpp"

namespace tgf::app {

using nlohmann::json;

namespace {

// Seed streams under the root seed.
enum Stream : std::uint64_t { kInitial = 1, kTarget = 2, kControl = 3, kDirection = 4, kVerify = 5, kResidual = 6 };

ControlField random_control(const RunConfig& c, Stream s, double amplitude) {
  const auto& g = c.sim.grid;
  ControlField u(g, c.sim.steps, c.sim.p_exp);
  if (amplitude == 0.0) return u;
  const auto base = derive_seed(c.sim.seed, s);
  for (int n = 0; n < c.sim.steps; ++n) u.set(n, random_field(g, base + static_cast<std::uint64_t>(n), amplitude, 1.0));
  return u;
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"ci_halfwidth", e.ci_halfwidth}, {"std_error", e.std_error}}; }

std::vector<std::string> cells(std::initializer_list<double> xs) {
  std::vector<std::string> out;
  for (double x : xs) out.push_back(fmt(x));
  return out;
}

struct Context {
  const RunConfig& cfg;
  Output& out;
  std::ostream& log;
  std::ostream& err;
  bool quiet;
  void say(const std::string& s) const {
    if (!quiet) log << s << "\n";
  }
};

ControlProblem control_problem(const RunConfig& c) {
  ControlProblem pb;
  pb.cfg = c.sim;
  pb.y0 = initial_field(c);
  pb.target = tracking_target(c);
  pb.lambda = c.lambda;
  pb.samples = c.samples;
  pb.set.radius = c.radius;
  return pb;
}

int cmd_simulate(const Context& cx) {
  const auto& c = cx.cfg;
  const auto y0 = initial_field(c);
  const auto U = initial_control(c);
  const auto st = ensemble(y0, U, c.sim, c.samples);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t n = 0; n < st.v_mean.size(); ++n)
    rows.push_back(cells({double(n), n * c.sim.dt(), st.v_mean[n], st.v_q10[n], st.v_q50[n], st.v_q90[n]}));
  cx.out.csv("ensemble.csv", {"step", "t", "v_mean", "v_q10", "v_q50", "v_q90"}, rows);
  rows.clear();
  for (std::size_t n = 0; n < st.stop_histogram.size(); ++n)
    rows.push_back({std::to_string(n), fmt(n * c.sim.dt()), std::to_string(st.stop_histogram[n])});
  cx.out.csv("stops.csv", {"stop_index", "stop_time", "count"}, rows);

  json summary = {{"samples", st.samples},
                  {"completed", st.completed},
                  {"aborts", st.aborts},
                  {"sup_v2", estimate_json(st.sup_v2)},
                  {"dissipation", estimate_json(st.dissipation)},
                  {"deformation4", estimate_json(st.deformation4)},
                  {"sup_wtilde_p", estimate_json(st.sup_wtilde_p)}};
  int code = kOk;
  try {
    const auto tr = simulate(y0, U, c.sim.path(0), c.sim);
    cx.out.fields("trajectory.bin", c.sim.grid, c.sim.dt(), tr.fields);
    summary["sample0"] = {{"stop_index", tr.stop_index}, {"stop_time", tr.stop_index * c.sim.dt()}};
    cx.say("sample 0 stop time " + fmt(tr.stop_index * c.sim.dt()) + " of " + fmt(c.sim.T));
  } catch (const BlowUpError& e) {
    cx.err << "blow-up abort, sample 0: " << e.what() << "\n";
    summary["sample0"] = {{"error", e.what()}};
    code = kRuntimeAbort;
  }
  cx.out.json("simulate.json", summary);
  cx.say("completed " + std::to_string(st.completed) + "/" + std::to_string(st.samples) +
         " samples, E sup |y|_V^2 = " + fmt(st.sup_v2.mean) + " +- " + fmt(st.sup_v2.ci_halfwidth));
  for (const auto& a : st.aborts) cx.err << "blow-up abort, " << a << "\n";
  if (!st.aborts.empty()) code = kRuntimeAbort;
  return code;
}

int cmd_tangent_check(const Context& cx) {
  const auto& c = cx.cfg;
  const auto rep = gateaux_check(initial_field(c), initial_control(c), direction(c), c.sim, c.rhos, c.samples);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rep.rows)
    rows.push_back({fmt(r.rho), fmt(r.error), fmt(r.slope), std::to_string(r.stop_mismatches)});
  cx.out.csv("gateaux.csv", {"rho", "error", "slope", "stop_mismatches"}, rows);
  cx.out.json("gateaux.json", {{"samples", rep.samples},
                               {"fitted_slope", rep.fitted_slope},
                               {"tangent_bound_ratio", rep.tangent_bound_ratio}});
  cx.say("fitted log-log slope " + fmt(rep.fitted_slope));
  return kOk;
}

int cmd_duality_check(const Context& cx) {
  const auto& c = cx.cfg;
  const auto y0 = initial_field(c);
  const auto U = initial_control(c);
  const auto psi = direction(c);
  const auto target = tracking_target(c);
  const auto rep = duality_check(y0, U, psi, target, c.sim, c.samples);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    rows.push_back({std::to_string(i), std::to_string(s.stop_index), fmt(s.lhs), fmt(s.rhs), fmt(s.rel_gap),
                    fmt(s.residual)});
  }
  cx.out.csv("duality.csv", {"sample", "stop_index", "lhs", "rhs", "rel_gap", "residual"}, rows);
  bool pass = rep.max_rel_gap <= c.duality_tol && rep.max_residual <= c.duality_tol;
  json body = {{"max_rel_gap", rep.max_rel_gap}, {"max_residual", rep.max_residual}, {"tolerance", c.duality_tol}};
  cx.say("pathwise duality: max relative gap " + fmt(rep.max_rel_gap) + ", max residual " + fmt(rep.max_residual));
  if (c.bsde) {
    const auto b = adapted_bsde(y0, U, psi, target, c.sim, c.bsde_samples);
    const bool ok = std::abs(b.gap.mean) <= 3.0 * b.gap.std_error && b.terminal_max == 0.0 && b.post_stop_max == 0.0;
    body["bsde"] = {{"samples", b.samples},           {"features", b.features},
                    {"max_condition", b.max_condition}, {"gap", estimate_json(b.gap)},
                    {"rhs_mean", b.rhs_mean},           {"terminal_max", b.terminal_max},
                    {"post_stop_max", b.post_stop_max}, {"post_stop_entries", b.post_stop_entries},
                    {"p0_vs_pathwise", b.p0_vs_pathwise}, {"pass", ok}};
    cx.say("adapted backward solution: gap " + fmt(b.gap.mean) + " (standard error " + fmt(b.gap.std_error) + ")");
    pass = pass && ok;
  }
  body["pass"] = pass;
  cx.out.json("duality.json", body);
  return pass ? kOk : kVerificationFailure;
}

int cmd_optimize(const Context& cx) {
  const auto& c = cx.cfg;
  const auto pb = control_problem(c);
  std::vector<std::vector<std::string>> rows;
  const auto res = optimize(pb, initial_control(c), c.optimizer, [&](const IterateLog& r) {
    rows.push_back({std::to_string(r.iter), fmt(r.cost), fmt(r.tracking), fmt(r.penalty), fmt(r.grad_norm), fmt(r.step),
                    fmt(r.stopped_fraction)});
  });
  cx.out.csv("optimizer_log.csv", {"iter", "cost", "tracking", "penalty", "grad_norm", "step", "stopped_fraction"},
             rows);
  cx.out.fields("control.bin", c.sim.grid, c.sim.dt(), res.U.values());
  const auto cert = optimality_residual(pb, res.U, c.residual_directions, derive_seed(c.sim.seed, kResidual));
  const auto& last = res.log.back();
  cx.out.json("optimize.json", {{"converged", res.converged},
                                {"line_search_failed", res.line_search_failed},
                                {"iterations", static_cast<int>(res.log.size()) - 1},
                                {"cost", last.cost},
                                {"tracking", last.tracking},
                                {"penalty", last.penalty},
                                {"grad_map_norm", last.grad_norm},
                                {"control_norm", res.U.norm(c.sim.dt())},
                                {"optimality_residual", cert.residual},
                                {"worst_direction", cert.worst >= 0 ? cert.directions[cert.worst].kind : ""},
                                {"directions", static_cast<int>(cert.directions.size())}});
  cx.say("optimize: " + std::to_string(res.log.size() - 1) + " iterations, cost " + fmt(last.cost) +
         ", gradient-map norm " + fmt(last.grad_norm) + ", optimality residual " + fmt(cert.residual));
  if (res.line_search_failed) cx.say("warning: line search failed; reporting the last iterate");
  return kOk;
}

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass() const { return value <= tolerance; }
};

int cmd_verify(const Context& cx) {
  auto& err = cx.err;
  const auto& c = cx.cfg;
  const auto& g = c.sim.grid;
  const auto& p = c.sim.params;
  const auto seed = derive_seed(c.sim.seed, kVerify);
  std::vector<Check> checks;

  const auto ids = verify_identities(seed, p, g, c.triples, c.identity_tol, c.technical_samples);
  for (const auto& k : ids.checks) checks.push_back({k.name, k.max_defect, k.tolerance});

  if (c.sim.model.active()) checks.push_back({"g_star_adjointness", g_star_adjointness(c.sim.model, g, seed, c.g_star_triples), c.g_star_tol});

  {
    const auto y = random_field(g, seed + 11, 1.0, 1.5);
    const auto z = random_field(g, seed + 12, 1.0, 1.5);
    const auto q = random_field(g, seed + 13, 1.0, 1.5);
    const LinearizedOperator L(y, p);
    const auto Lt = L.apply_transpose(q);
    const double a = coef_dot(L.apply(z), q), b = coef_dot(z, Lt);
    const double s = std::max(std::abs(a), std::abs(b));
    checks.push_back({"linearized_transpose", s > 0 ? std::abs(a - b) / s : 0.0, c.duality_tol});
    const double m = max_abs(Lt);
    checks.push_back({"adjoint_transport_form", m > 0 ? max_abs_difference(Lt, adjoint_transport(y, q, p)) / m : 0.0,
                      c.duality_tol});
  }

  auto pc = c;
  pc.samples = c.duality_samples;
  const auto pb = control_problem(pc);
  const auto U = initial_control(c);
  const auto dual = duality_check(pb.y0, U, direction(c), pb.target, c.sim, c.duality_samples);
  checks.push_back({"pathwise_duality", dual.max_rel_gap, c.duality_tol});
  checks.push_back({"adjoint_residual", dual.max_residual, c.duality_tol});

  const auto grad = cost_gradient(pb, U);
  double fd_err = 0.0, tan_err = 0.0;
  for (int j = 0; j < c.gradient_directions; ++j) {
    ControlField psi(g, c.sim.steps, c.sim.p_exp);
    for (int n = 0; n < c.sim.steps; ++n) psi.set(n, random_field(g, seed + 1000 * (j + 1) + n, 1.0, 1.0));
    const double dj = control_dot(grad.gradient, psi, c.sim.dt());
    const double fd = central_difference(pb, U, psi, c.gradient_rho);
    const double tg = tangent_derivative(pb, U, psi);
    fd_err = std::max(fd_err, std::abs(dj - fd) / std::max(std::abs(fd), 1e-300));
    tan_err = std::max(tan_err, std::abs(dj - tg) / std::max(std::abs(tg), 1e-300));
  }
  checks.push_back({"adjoint_gradient_vs_finite_difference", fd_err, c.gradient_tol});
  checks.push_back({"adjoint_gradient_vs_tangent", tan_err, c.duality_tol});

  bool all = true;
  json arr = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& k : checks) {
    all = all && k.pass();
    arr.push_back({{"name", k.name}, {"value", k.value}, {"tolerance", k.tolerance}, {"pass", k.pass()}});
    rows.push_back({k.name, fmt(k.value), fmt(k.tolerance), k.pass() ? "PASS" : "FAIL"});
    cx.say((k.pass() ? "PASS " : "FAIL ") + k.name + " " + fmt(k.value) + " (tolerance " + fmt(k.tolerance) + ")");
    if (!k.pass()) err << "verification failed: " << k.name << " = " << fmt(k.value) << " exceeds " << fmt(k.tolerance) << "\n";
  }
  cx.out.csv("verify.csv", {"check", "value", "tolerance", "status"}, rows);
  cx.out.json("verify.json", {{"checks", arr},
                              {"technical_constant", ids.technical_constant},
                              {"technical_constant_refined", ids.technical_constant_refined},
                              {"gradient_frozen_indicator", grad.frozen_indicator},
                              {"pass", all}});
  return all ? kOk : kVerificationFailure;
}

int cmd_stability_probe(const Context& cx) {
  const auto& c = cx.cfg;
  const auto y0 = initial_field(c);
  const auto U1 = initial_control(c);
  const auto psi = direction(c);
  std::vector<std::vector<std::string>> rows;
  double lo = INFINITY, hi = 0.0;
  for (double s : c.gap_scales) {
    ControlField U2 = U1;
    U2.axpy(s, psi);
    const auto r = stability_probe(U1, U2, y0, c.sim, c.samples, c.stability_p, c.epsilon);
    rows.push_back(cells({s, r.numerator_v, r.numerator_w, r.denominator, r.interpolation_term, r.ratio_v, r.ratio_w}));
    lo = std::min(lo, r.ratio_v);
    hi = std::max(hi, r.ratio_v);
  }
  cx.out.csv("stability.csv",
             {"gap_scale", "numerator_v", "numerator_w", "denominator", "interpolation_term", "ratio_v", "ratio_w"}, rows);
  cx.out.json("stability.json", {{"ratio_v_min", lo}, {"ratio_v_max", hi}, {"variation_factor", lo > 0 ? hi / lo : INFINITY}});
  cx.say("stability ratio range [" + fmt(lo) + ", " + fmt(hi) + "]");
  return kOk;
}

int cmd_stop_probe(const Context& cx) {
  const auto& c = cx.cfg;
  const auto y0 = initial_field(c);
  ControlField psi = direction(c);
  if (c.stop_direction == "initial") {
    auto d = y0;
    const double n = l2_norm(d);
    if (n > 0.0) d *= c.psi_amplitude / n;
    for (int k = 0; k < c.sim.steps; ++k) psi.set(k, d);
  }
  std::vector<double> rhos;
  for (double f : c.stop_factors) rhos.push_back(c.stop_rho0 * f);
  const auto rep = stop_time_probe(initial_control(c), psi, y0, c.sim, c.samples, rhos);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rep.rows)
    rows.push_back({fmt(r.rho), std::to_string(r.disagreements), fmt(r.probability), fmt(r.ratio)});
  cx.out.csv("stop_probe.csv", {"rho", "disagreements", "probability", "ratio"}, rows);
  cx.out.json("stop_probe.json", {{"samples", rep.samples},
                                   {"nonincreasing", rep.nonincreasing},
                                   {"ratio_decreased", rep.ratio_decreased}});
  cx.say(std::string("stop disagreement nonincreasing: ") + (rep.nonincreasing ? "yes" : "no") +
         ", ratio decreased: " + (rep.ratio_decreased ? "yes" : "no"));
  return kOk;
}

}  // namespace

SpectralField initial_field(const RunConfig& c) {
  if (c.initial_kind == "zero" || c.initial_amplitude == 0.0) return SpectralField(c.sim.grid);
  return random_field(c.sim.grid, derive_seed(c.sim.seed, kInitial), c.initial_amplitude, c.initial_slope);
}

TrackingTarget tracking_target(const RunConfig& c) {
  TrackingTarget t;
  t.norm = c.tracking;
  if (c.target_kind == "zero" || c.target_amplitude == 0.0) t.fields = {SpectralField(c.sim.grid)};
  else t.fields = {random_field(c.sim.grid, derive_seed(c.sim.seed, kTarget), c.target_amplitude, c.target_slope)};
  return t;
}

ControlField initial_control(const RunConfig& c) { return random_control(c, kControl, c.control_amplitude); }
ControlField direction(const RunConfig& c) { return random_control(c, kDirection, c.psi_amplitude); }

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic third-grade fluid toolkit: simulation, sensitivities and optimal control"};
  app.name("tgf");
  std::string command, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  bool quiet = false;
  const std::vector<std::string> commands{"simulate",     "tangent-check",   "duality-check", "optimize",
                                          "verify",       "stability-probe", "stop-probe"};
  app.add_option("command", command, "simulate | tangent-check | duality-check | optimize | verify | "
                                     "stability-probe | stop-probe")
      ->required()
      ->check(CLI::IsMember(commands));
  app.add_option("--config", config_path, "config file (key = value sections, or JSON)");
  app.add_option("--seed", seed, "override run.seed");
  app.add_option("--samples", samples, "override run.samples");
  app.add_option("--out", out_dir, "override run.out");
  app.add_flag("--quiet", quiet, "suppress progress output");

  std::vector<std::string> argv_store{"tgf"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kConfigError;
  }

  RunConfig cfg;
  try {
    json j = config_path.empty() ? json::object() : load_config_file(config_path);
    if (seed) j["run"]["seed"] = *seed;
    if (samples) j["run"]["samples"] = *samples;
    if (!out_dir.empty()) j["run"]["out"] = out_dir;
    cfg = from_json(j);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const std::string hash = config_hash(cfg);
    Output output(cfg.out, command, hash);
    const Context cx{cfg, output, out, err, quiet};
    cx.say(command + ": config_hash " + hash);
    int code = kOk;
    if (command == "simulate") code = cmd_simulate(cx);
    else if (command == "tangent-check") code = cmd_tangent_check(cx);
    else if (command == "duality-check") code = cmd_duality_check(cx);
    else if (command == "optimize") code = cmd_optimize(cx);
    else if (command == "verify") code = cmd_verify(cx);
    else if (command == "stability-probe") code = cmd_stability_probe(cx);
    else code = cmd_stop_probe(cx);
    json canon = to_json(cfg);
    canon["run"].erase("out");
    canon["run"].erase("workers");
    output.manifest(canon);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const BlowUpError& e) {
    err << "runtime abort: " << e.what() << "\n";
    return kRuntimeAbort;
  } catch (const std::exception& e) {
    err << "runtime abort: " << e.what() << "\n";
    return kRuntimeAbort;
  }
}

}  // namespace tgf::app
