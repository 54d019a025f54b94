#include "qmem/pipelines.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>

#include "qmem/counting.hpp"
#include "qmem/eit.hpp"
#include "qmem/errors.hpp"
#include "qmem/polariton.hpp"

namespace qmem {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1.0);
  return v;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// JSON cannot hold inf/nan; they are written as strings.
ojson num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

ojson estimate_json(const Estimate& e) {
  ojson j;
  if (e.defined()) {
    j["value"] = num(*e.value);
    j["se"] = num(e.se);
  } else {
    j["value"] = nullptr;
    j["undefined_reason"] = e.undefined_reason;
  }
  return j;
}

void common_meta(Table& t, const RunContext& ctx) {
  t.add_meta("toolkit_version", QMEM_VERSION);
  t.add_meta("config_sha256", sha256_hex(ctx.config_bytes));
  t.add_meta("seed", std::to_string(ctx.seed()));
}

Table pulse_table(const std::string& name, const ControlProfile& control, const PropagationResult& r) {
  Table t;
  t.name = name;
  t.columns = {"t_s", "t_physical_s", "control_abs2_rel", "vacuum_re", "vacuum_im", "vacuum_abs2",
               "output_re",  "output_im",    "output_abs2"};
  const FrequencyGrid& g = r.output.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t_s = g.time(i);
    const double om = control.Omega0 > 0.0 ? control.omega(t_s) / control.Omega0 : 0.0;
    const cplx v = r.vacuum.samples[static_cast<Eigen::Index>(i)];
    const cplx o = r.output.samples[static_cast<Eigen::Index>(i)];
    t.add_row({t_s, r.output_times[i], om * om, v.real(), v.imag(), std::norm(v), o.real(), o.imag(), std::norm(o)});
  }
  t.add_meta("control", control.describe());
  t.add_meta("group_delay_s", r.group_delay);
  t.add_meta("transmitted_fraction", r.transmitted_fraction);
  if (r.retrieval_efficiency) t.add_meta("retrieval_efficiency", *r.retrieval_efficiency);
  t.add_meta("convergence_change", r.convergence_change);
  return t;
}

ojson propagation_json(const PropagationResult& r) {
  ojson j;
  j["group_delay_s"] = num(r.group_delay);
  j["transmitted_fraction"] = num(r.transmitted_fraction);
  j["retrieval_efficiency"] = r.retrieval_efficiency ? num(*r.retrieval_efficiency) : ojson(nullptr);
  j["convergence_change"] = num(r.convergence_change);
  double worst = 1.0;
  for (double c : r.rcond) worst = std::min(worst, c);
  j["min_rcond"] = num(worst);
  return j;
}

}  // namespace

RunContext RunContext::from_text(const std::string& text, const std::string& source) {
  RunContext ctx;
  ctx.config = parse_config(text, source);
  ctx.config_bytes = text;
  ctx.config_source = source;
  return ctx;
}

RunContext RunContext::from_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ValidationError&) {
    throw ValidationError("cannot read config file " + path.string());
  }
  return from_text(text, path.string());
}

ExperimentConfig RunContext::effective_config() const {
  ExperimentConfig c = config;
  if (seed_override) c.counting.source.seed = *seed_override;
  if (trials_override) c.counting.source.trials = *trials_override;
  return c;
}

std::uint64_t RunContext::seed() const { return seed_override ? *seed_override : config.counting.source.seed; }

FigureDataset cmd_spectrum(const RunContext& ctx) {
  const ExperimentConfig cfg = ctx.effective_config();
  const LevelScheme& sc = cfg.scheme;
  const MediumProfile medium = cfg.medium_profile();
  const auto x = linspace(cfg.spectrum.delta_min_over_gamma, cfg.spectrum.delta_max_over_gamma, cfg.spectrum.points);
  std::vector<double> delta(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) delta[i] = x[i] * sc.Gamma_c;

  const auto on = transmission_spectrum(sc, cfg.polarization, medium, cfg.control.Omega, delta);
  const auto off = transmission_spectrum(sc, cfg.polarization, medium, 0.0, delta);

  Table t;
  t.name = "spectrum";
  common_meta(t, ctx);
  t.add_meta("optical_depth", cfg.medium.optical_depth);
  t.add_meta("omega_over_gamma_c", cfg.control.Omega / sc.Gamma_c);
  t.columns = {"delta_over_gamma_c", "delta_rad_s", "T_control_on", "T_control_off"};
  for (std::size_t i = 0; i < x.size(); ++i) t.add_row({x[i], delta[i], on.transmittance[i], off.transmittance[i]});

  const std::array<double, 1> zero{0.0};
  FigureDataset ds;
  ds.name = "spectrum";
  ds.diagnostics["T_on_at_zero"] = num(transmission_spectrum(sc, cfg.polarization, medium, cfg.control.Omega, zero)
                                           .transmittance[0]);
  ds.diagnostics["T_off_at_zero"] =
      num(transmission_spectrum(sc, cfg.polarization, medium, 0.0, zero).transmittance[0]);
  ds.diagnostics["exp_minus_d"] = num(std::exp(-cfg.medium.optical_depth));
  ds.tables.push_back(std::move(t));
  return ds;
}

FigureDataset cmd_store(const RunContext& ctx) {
  const ExperimentConfig cfg = ctx.effective_config();
  const LevelScheme& sc = cfg.scheme;
  const Polarization pol = cfg.polarization;
  const MediumProfile medium = cfg.medium_profile();
  const ZeemanConfig zeeman = cfg.zeeman_config();
  const FrequencyGrid grid = cfg.frequency_grid();
  const SignalField input = SignalField::gaussian(grid, cfg.signal.fwhm, cfg.signal.t_center, pol.beta);

  PropagationOptions opt;
  opt.z_steps = cfg.grid.z_steps;
  opt.kernel.gamma0 = cfg.gamma0();
  opt.kernel.policy = ctx.policy;

  const double t_off = cfg.signal.t_center + cfg.control.t_off;
  const ControlProfile cw = ControlProfile::constant(cfg.control.Omega, pol.r);
  const ControlProfile stored =
      ControlProfile::step_off_on(cfg.control.Omega, t_off, t_off + cfg.store.short_storage, cfg.control.edge, pol.r);

  auto log = [&](const std::string& s) {
    if (ctx.verbose) std::cerr << "store: " << s << "\n";
  };
  log("cw control");
  const PropagationResult r_cw = propagate(input, cw, medium, sc, pol, zeeman, opt);
  log("short storage");
  const PropagationResult r_short = propagate(input, stored, medium, sc, pol, zeeman, opt);
  log("long storage");
  PropagationOptions opt_long = opt;
  opt_long.kernel.storage_skip = cfg.store.long_storage - cfg.store.short_storage;
  const PropagationResult r_long = propagate(input, stored, medium, sc, pol, zeeman, opt_long);

  FigureDataset ds;
  ds.name = "store";
  Table a = pulse_table("store_cw", cw, r_cw);
  Table b = pulse_table("store_short", stored, r_short);
  Table c = pulse_table("store_long", stored, r_long);
  b.add_meta("storage_time_s", cfg.store.short_storage);
  c.add_meta("storage_time_s", cfg.store.long_storage);
  c.add_meta("simulated_dark_time_s", cfg.store.short_storage);
  c.add_meta("phase_skip_s", opt_long.kernel.storage_skip);
  for (Table* t : {&a, &b, &c}) common_meta(*t, ctx);

  const double np_short = polariton_number(cfg.store.short_storage, zeeman, sc, pol);
  const double np_long = polariton_number(cfg.store.long_storage, zeeman, sc, pol);
  const double decay = std::exp(-2.0 * cfg.gamma0() * (cfg.store.long_storage - cfg.store.short_storage));
  ds.diagnostics["cw"] = propagation_json(r_cw);
  ds.diagnostics["short_storage"] = propagation_json(r_short);
  ds.diagnostics["long_storage"] = propagation_json(r_long);
  ds.diagnostics["short_storage_time_s"] = cfg.store.short_storage;
  ds.diagnostics["long_storage_time_s"] = cfg.store.long_storage;
  ds.diagnostics["polariton_number_short"] = num(np_short);
  ds.diagnostics["polariton_number_long"] = num(np_long);
  const double ratio = *r_long.retrieval_efficiency / *r_short.retrieval_efficiency;
  ds.diagnostics["retrieved_energy_ratio"] = num(ratio);
  ds.diagnostics["expected_ratio_np_times_decay"] = num(np_long / np_short * decay);
  ds.tables = {std::move(a), std::move(b), std::move(c)};
  return ds;
}

FigureDataset cmd_larmor(const RunContext& ctx) {
  const ExperimentConfig cfg = ctx.effective_config();
  const LevelScheme& sc = cfg.scheme;
  const Polarization pol = cfg.polarization;
  const ZeemanConfig zeeman = cfg.zeeman_config();
  const auto times = linspace(0.0, cfg.larmor.t_max, cfg.larmor.points);

  std::vector<double> np(times.size());
  std::vector<CollapseSample> fit_samples;
  for (std::size_t i = 0; i < times.size(); ++i) {
    np[i] = polariton_number(times[i], zeeman, sc, pol);
    if (times[i] <= cfg.larmor.fit_max_time) fit_samples.push_back({times[i], 1.0 + cfg.larmor.B0 * np[i], 1.0});
  }
  const CollapseFit fit = fit_collapse(fit_samples);
  const double f_larmor = extract_larmor_frequency(fit.tau, sc, pol) / kTwoPi;

  Table t;
  t.name = "larmor";
  common_meta(t, ctx);
  t.add_meta("B0", cfg.larmor.B0);
  t.add_meta("Delta_ab_over_2pi_hz", zeeman.Delta_ab / kTwoPi);
  t.add_meta("fit_B", fit.B);
  t.add_meta("fit_tau_s", fit.tau);
  t.add_meta("fit_tau_identifiable", fit.tau_identifiable ? "true" : "false");
  t.add_meta("fit_max_time_s", cfg.larmor.fit_max_time);
  t.add_meta("extracted_larmor_hz", f_larmor);
  t.columns = {"T_s", "polariton_number", "g_si", "g_si_fit", "in_fit"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double model = std::isinf(fit.tau) ? 1.0 + fit.B
                                             : 1.0 + fit.B * std::exp(-times[i] * times[i] / (fit.tau * fit.tau));
    t.add_row({times[i], np[i], 1.0 + cfg.larmor.B0 * np[i], model, times[i] <= cfg.larmor.fit_max_time ? 1.0 : 0.0});
  }

  FigureDataset ds;
  ds.name = "larmor";
  ds.diagnostics["eta_squared"] = num(eta_squared(sc, pol));
  ds.diagnostics["fit"] = {{"B", num(fit.B)},
                           {"tau_s", num(fit.tau)},
                           {"tau_identifiable", fit.tau_identifiable},
                           {"rms_residual", num(fit.rms_residual)},
                           {"iterations", fit.iterations}};
  ds.diagnostics["Delta_ab_over_2pi_hz"] = num(zeeman.Delta_ab / kTwoPi);
  ds.diagnostics["extracted_larmor_hz"] = num(f_larmor);
  ds.tables.push_back(std::move(t));
  return ds;
}

FigureDataset cmd_counting(const RunContext& ctx) {
  const ExperimentConfig cfg = ctx.effective_config();
  const CountingConfig& src = cfg.counting.source;
  const double E = cfg.counting.storage_efficiency;
  const double Bp = cfg.counting.retrieved_background;
  const bool mc = src.trials > 0;

  auto make = [&](const std::string& name, const std::string& quantity, double B) {
    Table t;
    t.name = name;
    common_meta(t, ctx);
    t.add_meta("quantity", quantity);
    t.add_meta("B_s", B);
    t.add_meta("epsilon_1", src.epsilon_1);
    t.add_meta("trials", std::to_string(src.trials));
    t.add_meta("detector", src.detector == DetectorModel::PhotonCounting ? "photon_counting" : "threshold");
    t.columns = {"p1", "s", "analytic", "mc", "se"};
    return t;
  };
  Table sg = make("counting_source_gsi", "g_si", src.B_s);
  Table sa = make("counting_source_alpha", "alpha", src.B_s);
  Table rg = make("counting_retrieved_gsi", "g_si", Bp);
  Table ra = make("counting_retrieved_alpha", "alpha", Bp);
  for (Table* t : {&rg, &ra}) t->add_meta("storage_efficiency", E);

  auto value = [](const Estimate& e) { return e.defined() ? *e.value : nan(); };
  auto se = [](const Estimate& e) { return e.defined() ? e.se : nan(); };

  std::uint64_t k = 0;
  for (double s : cfg.counting.sweep_s) {
    CountingConfig source = src;
    source.s = s;
    // Distinct, reproducible streams per sweep point and chain.
    source.seed = src.seed + 2 * k;
    CountingConfig retrieved = memory_chain(source, E, Bp);
    retrieved.seed = src.seed + 2 * k + 1;
    ++k;
    const double p1 = src.epsilon_1 * s;
    StatisticsReport rs, rr;
    if (mc) {
      rs = run_counting(source, ctx.policy);
      rr = run_counting(retrieved, ctx.policy);
    }
    sg.add_row({p1, s, analytic_g_si(s, source.B_s), mc ? value(rs.g_si) : nan(), mc ? se(rs.g_si) : nan()});
    sa.add_row({p1, s, analytic_alpha(s, source.B_s), mc ? value(rs.alpha) : nan(), mc ? se(rs.alpha) : nan()});
    rg.add_row({p1, s, analytic_g_si(s, Bp), mc ? value(rr.g_si) : nan(), mc ? se(rr.g_si) : nan()});
    ra.add_row({p1, s, analytic_alpha(s, Bp), mc ? value(rr.alpha) : nan(), mc ? se(rr.alpha) : nan()});
  }

  FigureDataset ds;
  ds.name = "counting";
  ds.diagnostics["monte_carlo"] = mc;
  ds.diagnostics["trials_per_point"] = src.trials;

  // Operating point of the config, with the trial record export.
  ojson op;
  op["s"] = num(src.s);
  op["B_s"] = num(src.B_s);
  op["analytic_g_si"] = src.s + src.B_s > 0.0 ? num(analytic_g_si(src.s, src.B_s)) : ojson(nullptr);
  op["analytic_alpha"] = num(analytic_alpha(src.s, src.B_s));
  if (mc) {
    const StatisticsReport r = run_counting(src, ctx.policy);
    op["p1"] = num(r.p1);
    op["g_si"] = estimate_json(r.g_si);
    op["alpha"] = estimate_json(r.alpha);
    op["g_ss"] = estimate_json(r.g_ss);
    op["g_ii"] = estimate_json(r.g_ii);
    op["R_clauser"] = estimate_json(r.R_clauser);

    CountingConfig small = src;
    small.trials = std::min<std::uint64_t>(src.trials, 1000);
    Table tr;
    tr.name = "counting_trials";
    common_meta(tr, ctx);
    tr.add_meta("note", "first trials of the operating point; -1 means no event in the gate");
    tr.columns = {"trial_index", "d1_t_ns", "d2_t_ns", "d3_t_ns", "da_t_ns"};
    for (const auto& rec : simulate_trials(small)) {
      tr.add_row({static_cast<double>(rec.index), static_cast<double>(rec.t_ns[kD1]),
                  static_cast<double>(rec.t_ns[kD2]), static_cast<double>(rec.t_ns[kD3]),
                  static_cast<double>(rec.t_ns[kDa])});
    }
    ds.tables = {std::move(sg), std::move(sa), std::move(rg), std::move(ra), std::move(tr)};
  } else {
    ds.tables = {std::move(sg), std::move(sa), std::move(rg), std::move(ra)};
  }
  ds.diagnostics["operating_point"] = op;
  return ds;
}

WrittenDataset write_dataset(const RunContext& ctx, const FigureDataset& ds, const std::filesystem::path& out_dir,
                             double wall_time_s) {
  std::filesystem::create_directories(out_dir);
  WrittenDataset w;
  w.name = ds.name;
  ojson files = ojson::array();
  for (const auto& t : ds.tables) {
    const auto path = out_dir / (t.name + ".csv");
    write_file_atomic(path, t.to_csv());
    w.files.push_back(path);
    files.push_back(path.filename().string());
  }
  ojson side;
  side["dataset"] = ds.name;
  side["files"] = files;
  side["config_source"] = ctx.config_source;
  side["config_sha256"] = sha256_hex(ctx.config_bytes);
  side["seed"] = ctx.seed();
  side["toolkit_version"] = QMEM_VERSION;
  side["wall_time_s"] = wall_time_s;
  ojson ov = ojson::object();
  if (ctx.seed_override) ov["seed"] = *ctx.seed_override;
  if (ctx.trials_override) ov["trials"] = *ctx.trials_override;
  side["overrides"] = ov;
  side["diagnostics"] = ds.diagnostics;
  const auto path = out_dir / (ds.name + ".json");
  write_file_atomic(path, side.dump(2) + "\n");
  w.files.push_back(path);
  return w;
}

WrittenDataset run_pipeline(const RunContext& ctx, const std::string& name, const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  FigureDataset ds;
  if (name == "spectrum") {
    ds = cmd_spectrum(ctx);
  } else if (name == "store") {
    ds = cmd_store(ctx);
  } else if (name == "larmor") {
    ds = cmd_larmor(ctx);
  } else if (name == "counting") {
    ds = cmd_counting(ctx);
  } else {
    throw ValidationError("unknown pipeline \"" + name + "\"");
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return write_dataset(ctx, ds, out_dir, wall);
}

std::string manifest_json(const RunContext& ctx, const std::vector<WrittenDataset>& done,
                          const std::filesystem::path& out_dir, const std::string& failed) {
  ojson m;
  m["toolkit_version"] = QMEM_VERSION;
  m["config_sha256"] = sha256_hex(ctx.config_bytes);
  m["seed"] = ctx.seed();
  ojson list = ojson::array();
  for (const auto& w : done) {
    ojson d;
    d["name"] = w.name;
    ojson files = ojson::array();
    for (const auto& f : w.files) {
      // The sidecar carries the wall time, so only tables are hashed.
      const bool sidecar = f.extension() == ".json";
      ojson e{{"file", std::filesystem::relative(f, out_dir).string()}};
      if (!sidecar) e["sha256"] = sha256_hex(read_file(f));
      files.push_back(e);
    }
    d["files"] = files;
    list.push_back(d);
  }
  m["datasets"] = list;
  m["complete"] = failed.empty();
  if (!failed.empty()) m["failed"] = failed;
  return m.dump(2) + "\n";
}

std::vector<WrittenDataset> cmd_figures(const RunContext& ctx, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<WrittenDataset> done;
  for (const auto& name : ctx.config.pipelines) {
    try {
      done.push_back(run_pipeline(ctx, name, out_dir));
    } catch (...) {
      write_file_atomic(out_dir / "manifest.json", manifest_json(ctx, done, out_dir, name));
      throw;
    }
  }
  write_file_atomic(out_dir / "manifest.json", manifest_json(ctx, done, out_dir));
  return done;
}

}  // namespace qmem
