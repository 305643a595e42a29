#include "contmeas/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "contmeas/cat.hpp"
#include "contmeas/classical.hpp"
#include "contmeas/coherent.hpp"
#include "contmeas/io.hpp"
#include "contmeas/master.hpp"
#include "contmeas/meter.hpp"
#include "contmeas/noise.hpp"
#include "contmeas/parallel.hpp"
#include "contmeas/trajectories.hpp"
#include "contmeas/wigner.hpp"

namespace contmeas {

using nlohmann::json;

Potential PotentialConfig::build(double mass) const {
  if (kind == "free") return Potential::free_particle();
  if (kind == "harmonic") return Potential::harmonic(mass, omega0);
  if (kind == "linear") return Potential::linear(mass, omega0, v0, v1);
  if (kind == "polynomial") return Potential::polynomial(coefficients);
  throw DomainError("unknown potential kind '" + kind + "'");
}

namespace {

json params_json(const PhysicalParams& p) {
  return {{"m", p.m},   {"gamma", p.gamma}, {"T", p.T},         {"kB", p.kB},
          {"hbar", p.hbar}, {"M", p.M},     {"Omega", p.Omega}, {"tau", p.tau}};
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw DomainError("unknown key '" + it.key() + "' in " + where);
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"scenario", c.scenario},
           {"params", params_json(c.params)},
           {"potential",
            {{"kind", c.potential.kind},
             {"omega0", c.potential.omega0},
             {"v0", c.potential.v0},
             {"v1", c.potential.v1},
             {"coefficients", c.potential.coefficients}}},
           {"grid", {{"q_min", c.grid.q_min}, {"q_max", c.grid.q_max}, {"n", c.grid.n}}},
           {"dt", c.dt},
           {"n_steps", c.n_steps},
           {"record_every", c.record_every},
           {"ensemble", c.ensemble},
           {"seed", c.seed},
           {"output_dir", c.output_dir},
           {"strict", c.strict},
           {"dissipationless", c.dissipationless},
           {"wigner_dumps", c.wigner_dumps},
           {"p0", c.p0},
           {"q0", c.q0},
           {"init_var_q", c.init_var_q},
           {"init_var_p", c.init_var_p},
           {"cat", {{"p1", c.p1}, {"q1", c.q1}, {"p2", c.p2}, {"q2", c.q2}}},
           {"times", c.times},
           {"hbar_scan", c.hbar_scan},
           {"meter",
            {{"mode", c.meter_mode},
             {"bath_modes", c.bath_modes},
             {"omega_min", c.omega_min},
             {"band_lo", c.band_lo},
             {"filter_rate", c.filter_rate}}}};
}

void from_json(const json& j, ExperimentConfig& c) {
  reject_unknown(j,
                 {"scenario", "params", "potential", "grid", "dt", "n_steps", "record_every",
                  "ensemble", "seed", "output_dir", "strict", "dissipationless", "wigner_dumps",
                  "p0", "q0", "init_var_q", "init_var_p", "cat", "times", "hbar_scan", "meter"},
                 "config");
  read(j, "scenario", c.scenario);
  if (j.contains("params")) {
    const json& p = j.at("params");
    reject_unknown(p, {"m", "gamma", "T", "kB", "hbar", "M", "Omega", "tau"}, "params");
    read(p, "m", c.params.m);
    read(p, "gamma", c.params.gamma);
    read(p, "T", c.params.T);
    read(p, "kB", c.params.kB);
    read(p, "hbar", c.params.hbar);
    read(p, "M", c.params.M);
    read(p, "Omega", c.params.Omega);
    read(p, "tau", c.params.tau);
  }
  if (j.contains("potential")) {
    const json& p = j.at("potential");
    reject_unknown(p, {"kind", "omega0", "v0", "v1", "coefficients"}, "potential");
    read(p, "kind", c.potential.kind);
    read(p, "omega0", c.potential.omega0);
    read(p, "v0", c.potential.v0);
    read(p, "v1", c.potential.v1);
    read(p, "coefficients", c.potential.coefficients);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"q_min", "q_max", "n"}, "grid");
    read(g, "q_min", c.grid.q_min);
    read(g, "q_max", c.grid.q_max);
    read(g, "n", c.grid.n);
  }
  read(j, "dt", c.dt);
  read(j, "n_steps", c.n_steps);
  read(j, "record_every", c.record_every);
  read(j, "ensemble", c.ensemble);
  read(j, "seed", c.seed);
  read(j, "output_dir", c.output_dir);
  read(j, "strict", c.strict);
  read(j, "dissipationless", c.dissipationless);
  read(j, "wigner_dumps", c.wigner_dumps);
  read(j, "p0", c.p0);
  read(j, "q0", c.q0);
  read(j, "init_var_q", c.init_var_q);
  read(j, "init_var_p", c.init_var_p);
  if (j.contains("cat")) {
    const json& k = j.at("cat");
    reject_unknown(k, {"p1", "q1", "p2", "q2"}, "cat");
    read(k, "p1", c.p1);
    read(k, "q1", c.q1);
    read(k, "p2", c.p2);
    read(k, "q2", c.q2);
  }
  read(j, "times", c.times);
  read(j, "hbar_scan", c.hbar_scan);
  if (j.contains("meter")) {
    const json& m = j.at("meter");
    reject_unknown(m, {"mode", "bath_modes", "omega_min", "band_lo", "filter_rate"}, "meter");
    read(m, "mode", c.meter_mode);
    read(m, "bath_modes", c.bath_modes);
    read(m, "omega_min", c.omega_min);
    read(m, "band_lo", c.band_lo);
    read(m, "filter_rate", c.filter_rate);
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DomainError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return j.get<ExperimentConfig>();
  } catch (const json::exception& e) {
    throw DomainError("config " + path.string() + ": " + e.what());
  }
}

std::string canonical_json(const ExperimentConfig& c) { return json(c).dump(); }

std::string config_hash(const ExperimentConfig& c) { return io::fnv1a_hex(canonical_json(c)); }

bool ComparisonReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

json ComparisonReport::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"observable", r.name},
                      {"max_abs_deviation", r.max_abs_deviation},
                      {"max_z", r.max_z},
                      {"points", r.n_points},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass}});
  return {{"pass", pass()}, {"observables", rows_j}};
}

ComparisonReport compare(const std::vector<Series>& a, const std::vector<Series>& b,
                         const Tolerance& tol) {
  ComparisonReport rep;
  for (const auto& sa : a) {
    const auto it = std::find_if(b.begin(), b.end(), [&](const Series& s) { return s.name == sa.name; });
    if (it == b.end()) throw DomainError("series '" + sa.name + "' missing from the second run");
    const Series& sb = *it;
    if (sa.t.size() != sb.t.size() || sa.value.size() != sa.t.size() || sb.value.size() != sb.t.size())
      throw DomainError("series '" + sa.name + "' has misaligned lengths; resample onto a common time axis");
    ObservableComparison row;
    row.name = sa.name;
    row.n_points = sa.t.size();
    std::ostringstream tl;
    tl << tol.n_sigma << " sigma + " << tol.absolute;
    row.tolerance = tl.str();
    for (std::size_t k = 0; k < sa.t.size(); ++k) {
      if (std::abs(sa.t[k] - sb.t[k]) > 1e-9 * std::max(1.0, std::abs(sa.t[k])))
        throw DomainError("series '" + sa.name + "' time axes differ at index " + std::to_string(k) +
                          "; resample onto a common time axis");
      const double ea = sa.se.empty() ? 0.0 : sa.se[k];
      const double eb = sb.se.empty() ? 0.0 : sb.se[k];
      const double se = std::hypot(ea, eb);
      const double d = std::abs(sa.value[k] - sb.value[k]);
      const double floor = tol.relative * std::max(std::abs(sa.value[k]), std::abs(sb.value[k]));
      row.max_abs_deviation = std::max(row.max_abs_deviation, d);
      // Points that agree to round-off carry no statistical information.
      if (se > 0.0 && d > floor) row.max_z = std::max(row.max_z, d / se);
      if (d > tol.n_sigma * se + tol.absolute + floor) row.pass = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

namespace fs = std::filesystem;

struct Run {
  const ExperimentConfig& cfg;
  ScenarioResult res;

  fs::path file(const std::string& name) {
    res.files.push_back(name);
    return res.run_dir / name;
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream out(file(name));
    out << j.dump(2) << "\n";
    if (!out) throw Error("failed writing " + name);
  }
};

double linear_force_constant(const ExperimentConfig& cfg) {
  return cfg.potential.kind == "free" ? 0.0 : cfg.potential.omega0;
}

bool linear_kind(const ExperimentConfig& cfg) {
  return cfg.potential.kind == "free" || cfg.potential.kind == "harmonic" ||
         cfg.potential.kind == "linear";
}

WaveFunction initial_wavefunction(const ExperimentConfig& cfg, const Grid& grid) {
  if (cfg.init_var_q > 0.0) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.q(i) - cfg.q0;
      v(static_cast<Eigen::Index>(i)) =
          std::polar(std::exp(-x * x / (4.0 * cfg.init_var_q)), cfg.p0 * x / cfg.params.hbar);
    }
    WaveFunction psi(grid, v);
    psi.normalize();
    return psi;
  }
  const CoherentParams cp = coherent_params(cfg.params, linear_force_constant(cfg));
  return coherent_wavefunction(cp, cfg.p0, cfg.q0, grid);
}

void scenario_langevin(Run& run) {
  const auto& c = run.cfg;
  const Potential pot = c.potential.build(c.params.m);
  const InitialGaussian init{c.p0, c.q0, std::sqrt(c.init_var_p), std::sqrt(c.init_var_q)};
  const MomentSeries ms =
      langevin_ensemble(c.params, pot, init, c.dt, c.n_steps, c.ensemble, c.seed, c.record_every);
  io::CsvWriter csv(run.file("moments.csv"), {"t", "mean_q", "se_mean_q", "var_q", "se_var_q",
                                               "mean_p", "se_mean_p", "var_p", "se_var_p"});
  for (std::size_t k = 0; k < ms.t.size(); ++k)
    csv.row({ms.t[k], ms.m[k].mean_q, ms.se[k].mean_q, ms.m[k].var_q, ms.se[k].var_q,
             ms.m[k].mean_p, ms.se[k].mean_p, ms.m[k].var_p, ms.se[k].var_p});
  if (!linear_kind(c)) return;
  // Exact Gaussian moments are available for linear forces. The error bars
  // come from that law: a sample variance judged by its own spread has a
  // heavy low tail at small ensembles.
  std::vector<Series> sim, exact;
  const char* names[4] = {"mean_q", "var_q", "mean_p", "var_p"};
  for (auto* n : names) {
    sim.push_back({n, ms.t, {}, {}});
    exact.push_back({n, ms.t, {}, {}});
  }
  const GaussianMoments g0{c.p0, c.q0, c.init_var_p, c.init_var_q, 0.0};
  const double v1 = c.potential.kind == "linear" ? c.potential.v1 : 0.0;
  for (std::size_t k = 0; k < ms.t.size(); ++k) {
    const GaussianMoments g = fp_moments_exact(c.params, linear_force_constant(c), v1, g0, ms.t[k]);
    const double sv[4] = {ms.m[k].mean_q, ms.m[k].var_q, ms.m[k].mean_p, ms.m[k].var_p};
    const double n = static_cast<double>(c.ensemble);
    const double rv = std::sqrt(2.0 / (n - 1.0));
    const double se[4] = {std::sqrt(g.var_q / n), g.var_q * rv, std::sqrt(g.var_p / n), g.var_p * rv};
    const double ev[4] = {g.mean_q, g.var_q, g.mean_p, g.var_p};
    for (int i = 0; i < 4; ++i) {
      sim[i].value.push_back(sv[i]);
      sim[i].se.push_back(se[i]);
      exact[i].value.push_back(ev[i]);
    }
  }
  run.res.comparison = compare(sim, exact);
  run.write_json("comparison.json", run.res.comparison->to_json());
}

void scenario_fp(Run& run) {
  const auto& c = run.cfg;
  if (!(c.init_var_q > 0.0 && c.init_var_p > 0.0))
    throw DomainError("fp scenario needs init_var_q > 0 and init_var_p > 0");
  const Potential pot = c.potential.build(c.params.m);
  const Grid grid = c.grid.build();
  const double sp = std::sqrt(std::max(c.params.m * c.params.kT(), c.init_var_p));
  const double pmax = std::abs(c.p0) + 8.0 * sp;
  const Axis pa{-pmax, 2.0 * pmax / static_cast<double>(grid.size()), grid.size()};
  const Axis qa{grid.q_min(), grid.dq(), grid.size()};
  PhaseSpaceDensity w0 = make_density(pa, qa, [&](double p, double q) {
    const double x = q - c.q0, y = p - c.p0;
    return std::exp(-x * x / (2.0 * c.init_var_q) - y * y / (2.0 * c.init_var_p)) /
           (2.0 * kPi * std::sqrt(c.init_var_q * c.init_var_p));
  });
  w0.values /= w0.integral();
  io::CsvWriter csv(run.file("moments.csv"), {"t", "mean_q", "var_q", "mean_p", "var_p", "mass"});
  const std::size_t every = std::max<std::size_t>(1, c.record_every);
  FokkerPlanckReport rep;
  std::size_t dump = 0;
  auto record = [&](const PhaseSpaceDensity& w, std::size_t step) {
    if (step % every != 0 && step != c.n_steps) return;
    const Moments m = classical_moments(w);
    csv.row({w.t, m.mean_q, m.var_q, m.mean_p, m.var_p, w.integral()});
    if (c.wigner_dumps) {
      char name[32];
      std::snprintf(name, sizeof name, "density_%04zu.bin", dump++);
      io::write_grid_dump(run.file(name), w.values, w.q.step, w.q.min);
    }
  };
  fokker_planck_solve(c.params, pot, w0, c.dt, c.n_steps, &rep, record);
  run.write_json("fp_report.json", {{"max_leakage", rep.max_leakage},
                                    {"clipped_mass", rep.clipped_mass},
                                    {"min_value", rep.min_value},
                                    {"mass_drift", rep.mass_drift},
                                    {"p_min", pa.min},
                                    {"dp", pa.step}});
}

void scenario_sse(Run& run) {
  const auto& c = run.cfg;
  const Potential pot = c.potential.build(c.params.m);
  const Grid grid = c.grid.build();
  const WaveFunction psi0 = initial_wavefunction(c, grid);
  const SseModel model = c.dissipationless ? SseModel::Dissipationless : SseModel::Full;
  const SseEnsembleResult ens = sse_ensemble(c.params, pot, psi0, c.dt, c.n_steps, c.ensemble,
                                             c.seed, c.record_every, model, false);
  {
    io::CsvWriter csv(run.file("ensemble.csv"), {"t", "mean_q", "se_mean_q", "delta_q2",
                                                 "se_delta_q2", "mean_p", "se_mean_p"});
    for (std::size_t k = 0; k < ens.t.size(); ++k)
      csv.row({ens.t[k], ens.mean_q[k], ens.se_mean_q[k], ens.delta_q2[k], ens.se_delta_q2[k],
               ens.mean_p[k], ens.se_mean_p[k]});
  }
  // Trajectory 0 in full detail; it uses the same stream as ensemble member 0.
  const SsePropagator prop(c.params, pot, grid, model);
  SseState s = make_sse_state(psi0, c.params, pot);
  NoiseSource src(c.seed, 0);
  const SseRecord rec = sse_run(prop, s, c.dt, c.n_steps, src);
  {
    io::CsvWriter csv(run.file("trajectory.csv"),
                      {"t", "mean_q", "mean_p", "var_q", "cov_pq", "var_p", "phi"});
    const std::size_t every = std::max<std::size_t>(1, c.record_every);
    for (std::size_t k = 0; k < rec.t.size(); k += every) {
      const auto& e = rec.ex[k];
      csv.row({rec.t[k], e.mean_q, e.mean_p, e.var_q, e.cov_pq, e.var_p, rec.phi[k]});
    }
  }
  json summary = {{"max_norm_error", std::max(ens.max_norm_error, rec.max_norm_error)}};
  const SdeCheckReport chk = expectation_sde_check(rec, c.params, model);
  summary["sde_check"] = {{"rms_residual_p", chk.rms_residual_p},
                          {"rms_residual_q", chk.rms_residual_q},
                          {"normalized_residual", chk.normalized_residual},
                          {"scheme_bug", chk.scheme_bug}};
  if (chk.scheme_bug) run.res.warnings.push_back("expectation SDE residual exceeds 10 dt");
  if (pot.is_linear() && model == SseModel::Full) {
    try {
      const CoherentParams cp = coherent_params(c.params, linear_force_constant(c));
      const ConvergenceReport conv = convergence_diagnostics(rec, cp);
      summary["convergence"] = {{"target_rate", conv.target_rate},
                                {"fitted_rate", conv.fitted_rate ? json(*conv.fitted_rate) : json()},
                                {"floor", conv.floor},
                                {"flagged", conv.flagged}};
    } catch (const DomainError& e) {
      run.res.warnings.push_back(std::string("no coherent reference: ") + e.what());
    }
  }
  run.write_json("summary.json", summary);
}

void scenario_lindblad(Run& run) {
  const auto& c = run.cfg;
  const Potential pot = c.potential.build(c.params.m);
  const Grid grid = c.grid.build();
  const DensityMatrix rho0 = DensityMatrix::projector(initial_wavefunction(c, grid));
  LindbladConfig lc;
  lc.include_dissipation = !c.dissipationless;
  lc.dt = c.dt;
  lc.n_steps = c.n_steps;
  io::CsvWriter csv(run.file("moments.csv"),
                    {"t", "trace", "purity", "mean_q", "var_q", "mean_p", "var_p"});
  const std::size_t every = std::max<std::size_t>(1, c.record_every);
  std::size_t step = 0, dump = 0;
  bool aliasing = false;
  auto obs = [&](double t, const DensityMatrix& r) {
    const std::size_t s = step++;
    if (s % every != 0 && s != c.n_steps) return;
    WignerReport wr;
    const WignerGrid w = wigner_transform(r, c.params.hbar, &wr);
    aliasing = aliasing || wr.aliasing;
    const Moments m = wigner_moments(w);
    csv.row({t, r.trace().real(), r.purity(), r.mean_q(), r.var_q(), m.mean_p, m.var_p});
    if (c.wigner_dumps) {
      char name[32];
      std::snprintf(name, sizeof name, "wigner_%04zu.bin", dump++);
      io::write_grid_dump(run.file(name), w.values, w.q.step, w.q.min);
    }
  };
  LindbladReport rep;
  lindblad_run(rho0, c.params, pot, lc, &rep, obs);
  if (aliasing) run.res.warnings.push_back("Wigner function reaches the momentum boundary");
  if (rep.purity_increase) run.res.warnings.push_back("purity increased between checks");
  run.write_json("lindblad_report.json", {{"max_trace_error", rep.max_trace_error},
                                          {"min_eigenvalue", rep.min_eigenvalue},
                                          {"eigen_checks", rep.eigen_checks},
                                          {"initial_purity", rep.initial_purity},
                                          {"final_purity", rep.final_purity},
                                          {"purity_increase", rep.purity_increase},
                                          {"wigner_p_spacing", grid.momentum_spacing(c.params.hbar)}});
}

void scenario_coherent(Run& run) {
  const auto& c = run.cfg;
  const CoherentParams cp = coherent_params(c.params, linear_force_constant(c));
  const LeadingOrderVariances lo = coherent_leading_order(c.params);
  run.write_json("coherent.json", {{"sigma_q2", cp.sigma_q2},
                                   {"sigma_pq2", cp.sigma_pq2},
                                   {"sigma_p2", cp.sigma_p2},
                                   {"epsilon", cp.epsilon},
                                   {"omega_re", cp.omega.real()},
                                   {"omega_im", cp.omega.imag()},
                                   {"uncertainty_residual", cp.uncertainty_residual()},
                                   {"residual_c1", cp.residual_c1},
                                   {"residual_c2", cp.residual_c2},
                                   {"leading_order",
                                    {{"sigma_q2", lo.sigma_q2},
                                     {"sigma_pq2", lo.sigma_pq2},
                                     {"sigma_p2", lo.sigma_p2}}}});
}

void scenario_meter(Run& run) {
  const auto& c = run.cfg;
  const auto& P = c.params;
  if (c.meter_mode == "sample") {
    NoiseSource src(c.seed, 0);
    const BathState b = sample_bath(P, c.bath_modes, c.omega_min, c.q0, src);
    io::CsvWriter csv(run.file("bath.csv"), {"omega", "Q", "P", "mode_mass"});
    for (std::size_t i = 0; i < b.size(); ++i) csv.row({b.omegas[i], b.Q[i], b.P[i], b.mode_mass[i]});
    run.write_json("bath.json", {{"physical_oscillators", bath_mode_count(P, c.omega_min)},
                                 {"modes", b.size()}});
  } else if (c.meter_mode == "noise") {
    const double half = 20.0 / P.Omega;
    const std::size_t origins = 64;
    std::vector<double> per_bath(c.ensemble);
    parallel_for(c.ensemble, [&](std::size_t k) {
      NoiseSource src(c.seed, k);
      const BathState b = sample_bath(P, c.bath_modes, c.omega_min, 0.0, src);
      double acc = 0.0;
      for (std::size_t o = 0; o < origins; ++o) acc += noise_window_product(b, 7.3 * static_cast<double>(o) / P.Omega, half);
      per_bath[k] = acc / static_cast<double>(origins);
    });
    double mean = 0.0, m2 = 0.0;
    for (double v : per_bath) mean += v;
    mean /= static_cast<double>(per_bath.size());
    for (double v : per_bath) m2 += (v - mean) * (v - mean);
    const double se = std::sqrt(m2 / std::max<double>(1.0, static_cast<double>(per_bath.size()) - 1.0) /
                                static_cast<double>(per_bath.size()));
    run.write_json("noise.json", {{"integrated_autocovariance", mean},
                                  {"standard_error", se},
                                  {"window_half_width", half},
                                  {"target_2m_gamma_kT", 2.0 * P.m * P.gamma * P.kT()},
                                  {"window_expectation", P.kT() * integrated_kernel(P, half)}});
  } else if (c.meter_mode == "pointer") {
    const double lambda = c.filter_rate;
    const std::size_t n_samples = std::max<std::size_t>(2, c.n_steps);
    std::vector<double> times(n_samples + 1), q(n_samples + 1, c.q0);
    for (std::size_t i = 0; i <= n_samples; ++i) times[i] = c.dt * static_cast<double>(i);
    std::vector<PointerReadout> runs(c.ensemble);
    parallel_for(c.ensemble, [&](std::size_t k) {
      NoiseSource src(c.seed, k);
      const BathState band = sample_band(P, c.bath_modes, c.band_lo, c.q0, src);
      runs[k] = pointer_run(band, times, q, P, lambda);
    });
    const PointerStats st = pointer_statistics(runs);
    io::CsvWriter csv(run.file("pointer.csv"), {"t", "mean_R", "se_mean_R", "var_R", "se_var_R"});
    for (std::size_t k = 0; k < st.t.size(); ++k)
      csv.row({st.t[k], st.mean_R[k], st.se_mean_R[k], st.var_R[k], st.se_var_R[k]});
    run.write_json("pointer.json", {{"ell2", resolution(P)},
                                    {"q0", c.q0},
                                    {"final_mean_R", st.mean_R.back()},
                                    {"final_var_R", st.var_R.back()}});
  } else {
    throw DomainError("unknown meter mode '" + c.meter_mode + "' (sample, noise, pointer)");
  }
}

void scenario_cat(Run& run) {
  const auto& c = run.cfg;
  const CatSpec spec = make_cat_spec(c.params, c.p1, c.q1, c.p2, c.q2);
  const Grid grid = c.grid.build();
  const double dp = grid.momentum_spacing(c.params.hbar);
  const Axis pa{-static_cast<double>(grid.size() / 2) * dp, dp, grid.size()};
  const Axis qa{grid.q_min(), grid.dq(), grid.size()};
  {
    io::CsvWriter csv(run.file("cat_wigner.csv"), {"t", "p", "q", "W", "W_cl", "interference_weight"});
    for (double t : c.times) {
      if (!(t > spec.t0)) throw DomainError("cat times must exceed the preparation time 0");
      const double wt = interference_weight(spec, t);
      for (std::size_t i = 0; i < pa.n; ++i)
        for (std::size_t j = 0; j < qa.n; ++j)
          csv.row({t, pa[i], qa[j], cat_wigner(spec, pa[i], qa[j], t),
                   cat_classical_limit(spec, pa[i], qa[j], t), wt});
    }
  }
  io::CsvWriter scan(run.file("hbar_scan.csv"), {"hbar", "t", "C", "log_weight", "weight"});
  for (double h : c.hbar_scan) {
    PhysicalParams p = c.params;
    p.hbar = h;
    const CatSpec s = make_cat_spec(p, c.p1, c.q1, c.p2, c.q2);
    const double C = overlap_exponent(s.cp, c.p1 - c.p2, c.q1 - c.q2);
    for (double t : c.times) {
      const double lw = interference_log_weight(s, t);
      scan.row({h, t, C, lw, std::exp(lw)});
    }
  }
}

void scenario_correspondence(Run& run) {
  const auto& c = run.cfg;
  const Potential pot = c.potential.build(c.params.m);
  const Grid grid = c.grid.build();
  const WaveFunction psi0 = initial_wavefunction(c, grid);
  const SseModel model = c.dissipationless ? SseModel::Dissipationless : SseModel::Full;
  const SseEnsembleResult ens = sse_ensemble(c.params, pot, psi0, c.dt, c.n_steps, c.ensemble,
                                             c.seed, c.record_every, model, false);
  LindbladConfig lc;
  lc.include_dissipation = !c.dissipationless;
  lc.dt = c.dt;
  lc.n_steps = c.n_steps;
  Series lq{"mean_q", {}, {}, {}}, lv{"delta_q2", {}, {}, {}};
  const std::size_t every = std::max<std::size_t>(1, c.record_every);
  std::size_t step = 0;
  lindblad_run(DensityMatrix::projector(psi0), c.params, pot, lc, nullptr,
               [&](double, const DensityMatrix& r) {
                 const std::size_t s = step++;
                 if (s % every != 0) return;
                 lq.t.push_back(ens.t[s / every]);
                 lq.value.push_back(r.mean_q());
                 lv.t.push_back(ens.t[s / every]);
                 lv.value.push_back(r.var_q());
               });
  const std::vector<Series> sse = {{"mean_q", ens.t, ens.mean_q, ens.se_mean_q},
                                   {"delta_q2", ens.t, ens.delta_q2, ens.se_delta_q2}};
  run.res.comparison = compare(sse, {lq, lv});
  io::CsvWriter csv(run.file("correspondence.csv"),
                    {"t", "sse_mean_q", "se_mean_q", "lindblad_mean_q", "sse_delta_q2",
                     "se_delta_q2", "lindblad_delta_q2"});
  for (std::size_t k = 0; k < ens.t.size(); ++k)
    csv.row({ens.t[k], ens.mean_q[k], ens.se_mean_q[k], lq.value[k], ens.delta_q2[k],
             ens.se_delta_q2[k], lv.value[k]});
  run.write_json("report.json", run.res.comparison->to_json());
}

std::string file_hash(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return io::fnv1a_hex(bytes);
}

}  // namespace

ScenarioResult run_scenario(const ExperimentConfig& cfg) {
  static const std::set<std::string> known = {"langevin", "fp",  "sse", "lindblad", "coherent",
                                              "meter",    "cat", "correspondence"};
  if (!known.count(cfg.scenario)) throw DomainError("unknown scenario '" + cfg.scenario + "'");
  cfg.params.validate();
  Run run{cfg, {}};
  for (const auto& w : validate_regime(cfg.params).warnings()) run.res.warnings.push_back(w);
  if (cfg.strict && !run.res.warnings.empty())
    throw DomainError("regime check failed in strict mode: " + run.res.warnings.front());

  const std::string hash = config_hash(cfg);
  run.res.run_dir = fs::path(cfg.output_dir) / (cfg.scenario + "-" + hash);
  io::ensure_writable_dir(run.res.run_dir);

  if (cfg.scenario == "langevin") scenario_langevin(run);
  else if (cfg.scenario == "fp") scenario_fp(run);
  else if (cfg.scenario == "sse") scenario_sse(run);
  else if (cfg.scenario == "lindblad") scenario_lindblad(run);
  else if (cfg.scenario == "coherent") scenario_coherent(run);
  else if (cfg.scenario == "meter") scenario_meter(run);
  else if (cfg.scenario == "cat") scenario_cat(run);
  else scenario_correspondence(run);

  if (run.res.comparison) run.res.pass = run.res.comparison->pass();
  json files = json::array();
  for (const auto& f : run.res.files) files.push_back({{"name", f}, {"fnv1a", file_hash(run.res.run_dir / f)}});
  const json manifest = {{"scenario", cfg.scenario}, {"config", json(cfg)},
                         {"config_hash", hash},      {"seed", cfg.seed},
                         {"files", files},           {"warnings", run.res.warnings},
                         {"pass", run.res.pass}};
  std::ofstream out(run.res.run_dir / "manifest.json");
  out << manifest.dump(2) << "\n";
  if (!out) throw Error("failed writing manifest.json");
  return run.res;
}

}  // namespace contmeas
