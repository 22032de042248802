#include "kitres/scenarios.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

namespace kitres {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = n > 1 ? lo + (hi - lo) * k / (n - 1) : lo;
  return v;
}

std::string out_path(const std::string& outdir, const std::string& name) {
  return (std::filesystem::path(outdir) / name).string();
}

double opt(const Config& cfg, const std::string& key, double fallback) {
  return cfg.has(key) ? cfg.get_double(key) : fallback;
}

PulseSchedule hahn_schedule(double tau, double t_wait) {
  PulseSchedule sch;
  const double tp = 1e-4;
  double t0 = 0.0;
  if (t_wait > 0.0) {
    sch.add({0.0, tp, PulseKind::microwave_drive, std::numbers::pi / tp, 0.0, 0.0});
    t0 = t_wait;
  }
  sch.add({t0, tp, PulseKind::microwave_drive, 0.5 * std::numbers::pi / tp, 0.0, 0.0});
  sch.add({t0 + tau, tp, PulseKind::microwave_drive, std::numbers::pi / tp, 0.0, 0.0});
  return sch;
}

std::map<std::string, std::string> base_meta(const std::string& id, const std::string& figure,
                                             const Config& cfg) {
  std::map<std::string, std::string> m;
  m["scenario"] = id;
  m["figure"] = figure;
  m["seed"] = cfg.get_string("run.seed");
  return m;
}

using Files = std::vector<std::string>;

Files scenario_fig2a(const Config& cfg, const std::string& outdir) {
  CircuitNetlist n = cfg.netlist();
  const int npts = static_cast<int>(opt(cfg, "run.points", 81));
  const double imax = opt(cfg, "run.ia_max", 4e-3);
  const auto curve = tuning_curve(n, linspace(-imax, imax, npts), {0.0});
  CsvTable t;
  t.header = {"ia_A", "fa_Hz", "fb_Hz"};
  for (const auto& p : curve) t.rows.push_back({p.ia, p.fa, p.fb});
  const std::string csv = out_path(outdir, "fig2a_tuning_a.csv");
  write_csv_atomic(csv, t);
  auto meta = base_meta("fig2a", "2a", cfg);
  meta["ia_max_A"] = format_number(imax);
  write_metadata(out_path(outdir, "fig2a_tuning_a.meta"), meta);
  return {csv};
}

Files scenario_fig2b(const Config& cfg, const std::string& outdir) {
  CircuitNetlist n = cfg.netlist();
  const int npts = static_cast<int>(opt(cfg, "run.points", 81));
  const double imax = opt(cfg, "run.ib_max", 2e-3);
  const auto curve = tuning_curve(n, {0.0}, linspace(-imax, imax, npts));
  CsvTable t;
  t.header = {"ib_A", "fa_Hz", "fb_Hz"};
  for (const auto& p : curve) t.rows.push_back({p.ib, p.fa, p.fb});
  const std::string csv = out_path(outdir, "fig2b_tuning_kic.csv");
  write_csv_atomic(csv, t);
  auto meta = base_meta("fig2b", "2b", cfg);
  meta["ib_max_A"] = format_number(imax);
  write_metadata(out_path(outdir, "fig2b_tuning_kic.meta"), meta);
  return {csv};
}

Files scenario_fig2c(const Config& cfg, const std::string& outdir) {
  // Mode-A reflection with the 3WM pump off and on: the on-trace dip broadens
  // by the induced loss.
  ModePair modes = cfg.mode_pair();
  CircuitNetlist n = cfg.netlist();
  if (n.bias_a == 0.0 && n.bias_b == 0.0) {
    n.bias_a = opt(cfg, "run.bias_a", 2e-3);
    n.bias_b = opt(cfg, "run.bias_b", 1e-3);
  }
  CouplingSet c = quantize_circuit(n);
  const double p_pump = opt(cfg, "run.pump_power", 1e-7);
  const double idc = n.bias_a + n.bias_b;
  const double g = three_wave_coupling(c, idc, pump_current_from_power(p_pump, cfg.get_double("circuit.z0")));
  const double extra = induced_loss(g, modes.kappa_b());
  const double span = 30.0 * (modes.kappa_a() + extra) / kTwoPi;
  const auto freqs = linspace(modes.fa - span / 2, modes.fa + span / 2, 801);
  Files files;
  for (int on = 0; on <= 1; ++on) {
    Trace tr = reflection_s11(modes.fa, modes.kappa_ca, modes.kappa_ia, on ? extra : 0.0, freqs);
    const std::string csv = out_path(outdir, on ? "fig2c_s11_pump_on.csv" : "fig2c_s11_pump_off.csv");
    write_trace_csv(csv, tr);
    files.push_back(csv);
  }
  auto meta = base_meta("fig2c", "2c-d", cfg);
  meta["pump_power_W"] = format_number(p_pump);
  meta["g3wm_s-1"] = format_number(g);
  meta["induced_loss_s-1"] = format_number(extra);
  write_metadata(out_path(outdir, "fig2c_s11.meta"), meta);
  return files;
}

Files scenario_fig2e(const Config& cfg, const std::string& outdir) {
  // Induced loss vs pump power for a family of DC bias currents.
  ModePair modes = cfg.mode_pair();
  CircuitNetlist n = cfg.netlist();
  const double z0 = cfg.get_double("circuit.z0");
  const std::vector<double> idc_list = {1e-3, 2e-3, 3e-3};
  const auto powers = linspace(0.0, opt(cfg, "run.pump_power_max", 4e-7), 41);
  CsvTable t;
  t.header = {"pump_power_W", "idc_A", "g3wm_s-1", "induced_loss_s-1"};
  for (double idc : idc_list) {
    CircuitNetlist nb = n;
    nb.bias_a = 0.0;
    nb.bias_b = idc;
    CouplingSet c = quantize_circuit(nb);
    for (double p : powers) {
      const double g = three_wave_coupling(c, idc, pump_current_from_power(p, z0));
      t.rows.push_back({p, idc, g, induced_loss(g, modes.kappa_b())});
    }
  }
  const std::string csv = out_path(outdir, "fig2e_induced_loss.csv");
  write_csv_atomic(csv, t);
  write_metadata(out_path(outdir, "fig2e_induced_loss.meta"), base_meta("fig2e", "2e", cfg));
  return {csv};
}

Files scenario_fig2f(const Config& cfg, const std::string& outdir) {
  // Ringdown suppression: mode A rings down freely until a delayed pump window
  // opens the 3WM drain.
  ModePair modes = cfg.mode_pair();
  const double g = opt(cfg, "run.g3wm", 1.5e6);
  const double t_end = opt(cfg, "run.t_end", 1e-5);
  const double dt = 1.0 / (40.0 * modes.kappa_b());
  std::vector<double> delays;
  if (cfg.has("run.pump_delay")) {
    delays = {cfg.get_double("run.pump_delay")};
  } else {
    for (int k = 0; k <= 4; ++k) delays.push_back(k * 1e-6);
  }
  Files files;
  for (double delay : delays) {
    PulseSchedule sch;
    sch.add({delay, t_end - delay, PulseKind::pump_window, g, 0.0, 0.0});
    Trace tr = integrate_modes(modes, sch, t_end, dt, Complex{1.0, 0.0});
    std::ostringstream name;
    name << "fig2f_ringdown_delay_" << format_number(delay * 1e6) << "us.csv";
    const std::string csv = out_path(outdir, name.str());
    write_trace_csv(csv, tr);
    files.push_back(csv);
  }
  auto meta = base_meta("fig2f", "2f", cfg);
  meta["g3wm_s-1"] = format_number(g);
  meta["t_end_s"] = format_number(t_end);
  write_metadata(out_path(outdir, "fig2f_ringdown.meta"), meta);
  return files;
}

Files scenario_fig3a(const Config& cfg, const std::string& outdir) {
  const SpinSystem sys = cfg.spin_system();
  const double b_max = opt(cfg, "run.b_max", 65e-3);
  const int npts = static_cast<int>(opt(cfg, "run.points", 131));
  CsvTable t;
  t.header = {"bz_T"};
  for (int k = 0; k < sys.dim(); ++k) t.header.push_back("e" + std::to_string(k) + "_Hz");
  for (double bz : linspace(0.0, b_max, npts)) {
    const LabeledSpectrum spec = labeled_spectrum(sys, bz);
    std::vector<double> row{bz};
    for (int k = 0; k < sys.dim(); ++k) row.push_back(spec.energies(k));
    t.rows.push_back(std::move(row));
  }
  const std::string csv = out_path(outdir, "fig3a_levels.csv");
  write_csv_atomic(csv, t);
  write_metadata(out_path(outdir, "fig3a_levels.meta"), base_meta("fig3a", "3a", cfg));
  return {csv};
}

Files scenario_fig3b(const Config& cfg, const std::string& outdir) {
  // Spin-induced extra resonator loss over the (frequency, field) plane: each
  // ESR line contributes a dipole^2-weighted Lorentzian of width Gamma.
  const SpinSystem sys = cfg.spin_system();
  const double b_max = opt(cfg, "run.b_max", 65e-3);
  const double db0 = cfg.get_double("spin.delta_b0");
  const double coupling = opt(cfg, "run.spin_coupling", 1.0);
  const double gamma_floor = opt(cfg, "run.gamma_display_floor", 2e6);
  const int nb = static_cast<int>(opt(cfg, "run.field_points", 66));
  const int nf = static_cast<int>(opt(cfg, "run.points", 151));
  const auto freqs = linspace(opt(cfg, "run.f_min", 7.30e9), opt(cfg, "run.f_max", 7.45e9), nf);
  CsvTable t;
  t.header = {"bz_T", "freq_Hz", "delta_kappa"};
  for (double bz : linspace(1e-3, b_max, nb)) {
    const LabeledSpectrum spec = labeled_spectrum(sys, bz);
    const auto esr = transitions(sys, spec, TransitionKind::esr);
    for (double f : freqs) {
      double dk = 0.0;
      for (const Transition& tr : esr) {
        const double gamma = std::max(std::abs(tr.sensitivity) * db0, gamma_floor);
        const double hw = 0.5 * gamma;
        dk += coupling * tr.dipole * tr.dipole * hw * hw / ((f - tr.frequency) * (f - tr.frequency) + hw * hw);
      }
      t.rows.push_back({bz, f, dk});
    }
  }
  const std::string csv = out_path(outdir, "fig3b_absorption_grid.csv");
  write_csv_atomic(csv, t);
  auto meta = base_meta("fig3b", "3b", cfg);
  meta["delta_b0_T"] = format_number(db0);
  write_metadata(out_path(outdir, "fig3b_absorption_grid.meta"), meta);
  return {csv};
}

Files scenario_fig3c(const Config& cfg, const std::string& outdir) {
  // Homogeneous linewidth of the probed branch vs field; dips to ~0 at the CT.
  const SpinSystem sys = cfg.spin_system();
  const double db0 = cfg.get_double("spin.delta_b0");
  const LevelLabel lower{4, 0}, upper{5, -1};
  CsvTable t;
  t.header = {"bz_T", "freq_Hz", "dfdB_Hz_per_T", "gamma_Hz"};
  for (double bz : linspace(1e-3, opt(cfg, "run.b_max", 65e-3), static_cast<int>(opt(cfg, "run.points", 129)))) {
    const double f = transition_frequency(sys, bz, lower, upper);
    const double s = transition_sensitivity(sys, bz, lower, upper);
    t.rows.push_back({bz, f, s, std::abs(s) * db0});
  }
  const std::string csv = out_path(outdir, "fig3c_linewidth.csv");
  write_csv_atomic(csv, t);
  write_metadata(out_path(outdir, "fig3c_linewidth.meta"), base_meta("fig3c", "3c", cfg));
  return {csv};
}

Files scenario_fig4a(const Config& cfg, const std::string& outdir) {
  // Echo-detected spectrum near the clock transition: two dipole^2-weighted
  // Lorentzian peaks at the CT-pair frequencies.
  const SpinSystem sys = cfg.spin_system();
  const double bz = opt(cfg, "run.bz", 25.6e-3);
  const double width = opt(cfg, "run.peak_width", 9e4);
  const LabeledSpectrum spec = labeled_spectrum(sys, bz);
  const auto esr = transitions(sys, spec, TransitionKind::esr);
  std::vector<const Transition*> pair;
  for (const Transition& t : esr)
    if ((t.lower == LevelLabel{4, 0} && t.upper == LevelLabel{5, -1}) ||
        (t.lower == LevelLabel{4, -1} && t.upper == LevelLabel{5, 0}))
      pair.push_back(&t);
  if (pair.size() != 2) throw std::runtime_error("fig4a: clock-transition pair not found at this field");
  const double f_lo = std::min(pair[0]->frequency, pair[1]->frequency);
  const double f_hi = std::max(pair[0]->frequency, pair[1]->frequency);
  const auto freqs = linspace(f_lo - 5e5, f_hi + 5e5, 601);
  Trace tr;
  tr.axis = freqs;
  for (double f : freqs) {
    double y = 0.0;
    for (const Transition* t : pair) {
      const double hw = 0.5 * width;
      y += t->dipole * t->dipole * hw * hw / ((f - t->frequency) * (f - t->frequency) + hw * hw);
    }
    tr.values.push_back(y);
  }
  const std::string csv = out_path(outdir, "fig4a_echo_spectrum.csv");
  write_trace_csv(csv, tr);
  auto meta = base_meta("fig4a", "4a", cfg);
  meta["bz_T"] = format_number(bz);
  meta["peak1_Hz"] = format_number(f_lo);
  meta["peak2_Hz"] = format_number(f_hi);
  write_metadata(out_path(outdir, "fig4a_echo_spectrum.meta"), meta);
  return {csv};
}

Files scenario_fig4b(const Config& cfg, const std::string& outdir) {
  const EnsembleModel ens = cfg.ensemble();
  const int npts = static_cast<int>(opt(cfg, "run.points", 41));
  const auto taus = linspace(1e-3, opt(cfg, "run.tau_max", 0.75), npts);
  CsvTable t;
  t.header = {"two_tau_s", "echo_amplitude"};
  for (double tau : taus) {
    const EchoResult r = hahn_echo(ens, hahn_schedule(tau, 0.0));
    t.rows.push_back({2.0 * tau, r.amplitude});
  }
  const std::string csv = out_path(outdir, "fig4b_echo_decay.csv");
  write_csv_atomic(csv, t);
  auto meta = base_meta("fig4b", "4b", cfg);
  meta["t2_s"] = format_number(ens.t2);
  write_metadata(out_path(outdir, "fig4b_echo_decay.meta"), meta);
  return {csv};
}

Files scenario_fig4c(const Config& cfg, const std::string& outdir) {
  const EnsembleModel ens = cfg.ensemble();
  const double tau = opt(cfg, "run.tau", 5e-3);
  const int npts = static_cast<int>(opt(cfg, "run.points", 41));
  const auto waits = linspace(0.5, opt(cfg, "run.wait_max", 200.0), npts);
  CsvTable t;
  t.header = {"t_wait_s", "echo_amplitude"};
  for (double w : waits) {
    const EchoResult r = hahn_echo(ens, hahn_schedule(tau, w));
    t.rows.push_back({w, r.amplitude});
  }
  const std::string csv = out_path(outdir, "fig4c_inversion_recovery.csv");
  write_csv_atomic(csv, t);
  auto meta = base_meta("fig4c", "4c", cfg);
  meta["t1_s"] = format_number(ens.t1);
  meta["tau_s"] = format_number(tau);
  write_metadata(out_path(outdir, "fig4c_inversion_recovery.meta"), meta);
  return {csv};
}

Files scenario_fig4d(const Config& cfg, const std::string& outdir) {
  const ModePair modes = cfg.mode_pair();
  const EnsembleModel ens = cfg.ensemble();
  const double tau = opt(cfg, "run.tau", 5e-3);
  const EchoResult base = hahn_echo(ens, hahn_schedule(tau, 0.0));
  const double kappa = modes.kappa_a();
  const auto dfs = linspace(0.0, opt(cfg, "run.df_max", 2e6), static_cast<int>(opt(cfg, "run.points", 81)));
  CsvTable t;
  t.header = {"delta_f_Hz", "echo_amplitude", "normalized"};
  for (double df : dfs) {
    const double s = echo_silencing_factor(kappa, df);
    t.rows.push_back({df, base.amplitude * s, s});
  }
  const std::string csv = out_path(outdir, "fig4d_echo_silencing.csv");
  write_csv_atomic(csv, t);
  auto meta = base_meta("fig4d", "4d", cfg);
  meta["kappa_tot_s-1"] = format_number(kappa);
  write_metadata(out_path(outdir, "fig4d_echo_silencing.meta"), meta);
  return {csv};
}

Files scenario_fig4e(const Config& cfg, const std::string& outdir) {
  const SpinSystem sys = cfg.spin_system();
  const EndorConfig ec = cfg.endor();
  const auto freqs = linspace(opt(cfg, "run.f_min", 36.9e6), opt(cfg, "run.f_max", 38.2e6),
                              static_cast<int>(opt(cfg, "run.points", 1301)));
  Trace tr = endor_scan(sys, ec, freqs);
  const std::string csv = out_path(outdir, "fig4e_endor.csv");
  write_trace_csv(csv, tr);
  auto meta = base_meta("fig4e", "4e", cfg);
  meta["bz_T"] = format_number(ec.bz);
  meta["rf_area"] = format_number(ec.rf_area);
  write_metadata(out_path(outdir, "fig4e_endor.meta"), meta);
  return {csv};
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> reg = {
      {"fig2a", "2a", "mode-A frequency tuning vs microwire-A bias current"},
      {"fig2b", "2b", "both mode frequencies vs KIC bias current"},
      {"fig2c", "2c-d", "mode-A reflection dip with the 3WM pump off and on"},
      {"fig2e", "2e", "3WM-induced loss vs pump power for several DC biases"},
      {"fig2f", "2f", "ringdown traces with pump windows delayed 0-4 us"},
      {"fig3a", "3a", "20-level donor spectrum vs magnetic field"},
      {"fig3b", "3b", "spin absorption grid over (frequency, field)"},
      {"fig3c", "3c", "probed-branch frequency, sensitivity, and linewidth vs field"},
      {"fig4a", "4a", "echo-detected spectrum of the clock-transition pair"},
      {"fig4b", "4b", "Hahn-echo amplitude vs 2 tau (T2 decay)"},
      {"fig4c", "4c", "inversion-recovery echo amplitude vs wait time (T1)"},
      {"fig4d", "4d", "echo silencing vs resonator detuning during emission"},
      {"fig4e", "4e", "ENDOR: normalized echo vs RF frequency"},
  };
  return reg;
}

std::vector<std::string> run_scenario(const std::string& id, const Config& cfg, const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  if (id == "fig2a") return scenario_fig2a(cfg, outdir);
  if (id == "fig2b") return scenario_fig2b(cfg, outdir);
  if (id == "fig2c") return scenario_fig2c(cfg, outdir);
  if (id == "fig2e") return scenario_fig2e(cfg, outdir);
  if (id == "fig2f") return scenario_fig2f(cfg, outdir);
  if (id == "fig3a") return scenario_fig3a(cfg, outdir);
  if (id == "fig3b") return scenario_fig3b(cfg, outdir);
  if (id == "fig3c") return scenario_fig3c(cfg, outdir);
  if (id == "fig4a") return scenario_fig4a(cfg, outdir);
  if (id == "fig4b") return scenario_fig4b(cfg, outdir);
  if (id == "fig4c") return scenario_fig4c(cfg, outdir);
  if (id == "fig4d") return scenario_fig4d(cfg, outdir);
  if (id == "fig4e") return scenario_fig4e(cfg, outdir);
  throw ConfigError("unknown scenario: " + id);
}

}  // namespace kitres
