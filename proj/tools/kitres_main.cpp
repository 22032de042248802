#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "kitres/config.hpp"
#include "kitres/fitting.hpp"
#include "kitres/scenarios.hpp"

using namespace kitres;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

LevelLabel parse_label(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("level label must be F,m (e.g. \"4,0\"): " + s);
  try {
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("level label must be two integers: " + s);
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = n > 1 ? lo + (hi - lo) * k / (n - 1) : lo;
  return v;
}

void print_fit(const FitResult& r) {
  for (size_t k = 0; k < r.names.size(); ++k)
    std::cout << r.names[k] << " = " << format_number(r.values(static_cast<Eigen::Index>(k))) << " +- "
              << format_number(r.sigmas(static_cast<Eigen::Index>(k))) << "\n";
  std::cout << "residual_norm = " << format_number(r.residual_norm) << "\n";
  std::cout << "converged = " << (r.converged ? "true" : "false") << "\n";
  std::cout << "iterations = " << r.iterations << "\n";
  for (const auto& w : r.warnings) std::cout << "warning = " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kitres: tunable kinetic-inductance resonator + donor-spin simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string outdir = ".";
  if (const char* env = std::getenv("KITRES_OUT")) outdir = env;
  app.add_option("--config", config_path, "config file (INI-style sections)");
  app.add_option("--set", overrides, "override as section.key=value (repeatable)");
  app.add_option("--out", outdir, "output directory");

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "transition catalog at a field, CSV to stdout or --output");
  double sp_bz = 25.6e-3;
  std::string sp_kind = "esr", sp_output;
  sp->add_option("--bz", sp_bz, "field (T)");
  sp->add_option("--kind", sp_kind, "esr | nmr | all");
  sp->add_option("--output", sp_output, "CSV file (default stdout)");

  // clock-find
  auto* cf = app.add_subcommand("clock-find", "locate df/dB = 0 on a labeled branch");
  std::string cf_lower = "4,0", cf_upper = "5,-1";
  double cf_blo = 10e-3, cf_bhi = 40e-3;
  bool cf_scan = false;
  cf->add_option("--lower", cf_lower, "lower level F,m");
  cf->add_option("--upper", cf_upper, "upper level F,m");
  cf->add_option("--b-lo", cf_blo, "bracket low (T)");
  cf->add_option("--b-hi", cf_bhi, "bracket high (T)");
  cf->add_flag("--scan", cf_scan, "scan every ESR branch up to --b-hi instead");

  // tune
  auto* tn = app.add_subcommand("tune", "tuning curve over bias sweeps, CSV output");
  double tn_ia_max = 4e-3, tn_ib_max = 0.0;
  int tn_points = 81;
  std::string tn_output = "tuning.csv";
  tn->add_option("--ia-max", tn_ia_max, "microwire-A sweep half-span (A)");
  tn->add_option("--ib-max", tn_ib_max, "KIC sweep half-span (A)");
  tn->add_option("--points", tn_points, "points per sweep");
  tn->add_option("--output", tn_output, "CSV file");

  // quantize
  auto* qz = app.add_subcommand("quantize", "derive dressed parameters and couplings");
  double qz_idc = 0.0, qz_power = 0.0;
  int qz_order = 3;
  qz->add_option("--idc", qz_idc, "total KIC DC current (A); default bias_a + bias_b");
  qz->add_option("--power", qz_power, "pump power (W) for g3wm");
  qz->add_option("--order", qz_order, "series truncation order");

  // s11
  auto* s11 = app.add_subcommand("s11", "single-port reflection trace");
  double s_f0 = 7.422e9, s_kc = 9.4e4, s_ki = 7.5e5, s_extra = 0.0, s_span = 0.0;
  int s_points = 801;
  std::string s_output = "s11.csv";
  s11->add_option("--f0", s_f0, "resonance (Hz)");
  s11->add_option("--kappa-c", s_kc, "coupling rate (s^-1)");
  s11->add_option("--kappa-i", s_ki, "internal rate (s^-1)");
  s11->add_option("--extra-loss", s_extra, "3WM-induced loss (s^-1)");
  s11->add_option("--span", s_span, "sweep span (Hz); default 30 linewidths");
  s11->add_option("--points", s_points, "sweep points");
  s11->add_option("--output", s_output, "CSV file");

  // ringdown
  auto* rd = app.add_subcommand("ringdown", "mode-A ringdown with a delayed pump window");
  double rd_delay = 0.0, rd_g = 1.5e6, rd_tend = 1e-5;
  std::string rd_output = "ringdown.csv";
  rd->add_option("--pump-delay", rd_delay, "pump turn-on time (s)");
  rd->add_option("--g", rd_g, "3WM coupling while pumped (s^-1)");
  rd->add_option("--t-end", rd_tend, "trace length (s)");
  rd->add_option("--output", rd_output, "CSV file");

  // echo
  auto* ec = app.add_subcommand("echo", "Hahn echo / inversion recovery");
  double ec_tau = 5e-3, ec_wait = 0.0;
  std::string ec_output;
  ec->add_option("--tau", ec_tau, "pi/2 to pi delay (s)");
  ec->add_option("--t-wait", ec_wait, "inversion-recovery wait (s); 0 for plain Hahn echo");
  ec->add_option("--output", ec_output, "echo-transient CSV (optional)");

  // endor
  auto* en = app.add_subcommand("endor", "normalized echo vs RF frequency");
  double en_fmin = 36.9e6, en_fmax = 38.2e6;
  int en_points = 1301;
  std::string en_output = "endor.csv";
  en->add_option("--f-min", en_fmin, "RF sweep start (Hz)");
  en->add_option("--f-max", en_fmax, "RF sweep end (Hz)");
  en->add_option("--points", en_points, "sweep points");
  en->add_option("--output", en_output, "CSV file");

  // fit
  auto* ft = app.add_subcommand("fit", "fit a CSV trace");
  std::string ft_model = "resonance", ft_input;
  int ft_npeaks = 1;
  double ft_f0 = 7.422e9, ft_eta = 0.0;
  ft->add_option("--model", ft_model, "resonance | resonance-mag | tuning | exp | exp-inv | lorentzian");
  ft->add_option("--input", ft_input, "CSV: (axis, real, imag) or (axis, value)")->required();
  ft->add_option("--n-peaks", ft_npeaks, "peak count for lorentzian");
  ft->add_option("--f0", ft_f0, "zero-bias frequency for tuning fits (Hz)");
  ft->add_option("--eta", ft_eta, "kinetic fraction Lk0/Ltot for tuning fits");

  // run
  auto* rn = app.add_subcommand("run", "run a registered scenario");
  std::string rn_id;
  double rn_pump_delay = -1.0;
  rn->add_option("id", rn_id, "scenario id (see `list`)")->required();
  rn->add_option("--pump-delay", rn_pump_delay, "ringdown pump delay override (s)");

  // list
  auto* ls = app.add_subcommand("list", "list registered scenarios");
  bool ls_ids = false;
  ls->add_flag("--ids", ls_ids, "machine-readable: one id per line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    Config cfg = config_path.empty() ? default_config() : load_config(config_path);
    for (const auto& o : overrides) cfg.apply_override(o);
    const SpinSystem sys = cfg.spin_system();

    if (sp->parsed()) {
      const LabeledSpectrum spec = labeled_spectrum(sys, sp_bz);
      std::vector<Transition> list;
      if (sp_kind == "esr" || sp_kind == "all")
        for (const auto& t : transitions(sys, spec, TransitionKind::esr)) list.push_back(t);
      if (sp_kind == "nmr" || sp_kind == "all")
        for (const auto& t : transitions(sys, spec, TransitionKind::nmr)) list.push_back(t);
      if (sp_kind != "esr" && sp_kind != "nmr" && sp_kind != "all")
        throw ConfigError("spectrum --kind must be esr, nmr, or all");
      if (sp_output.empty()) {
        write_transitions_csv(std::cout, sp_bz, list);
      } else {
        std::ostringstream buf;
        write_transitions_csv(buf, sp_bz, list);
        write_text_atomic(sp_output, buf.str());
      }
    } else if (cf->parsed()) {
      if (cf_scan) {
        for (const auto& e : scan_clock_transitions(sys, cf_bhi))
          std::cout << "|" << e.lower.f << "," << e.lower.m << "> <-> |" << e.upper.f << "," << e.upper.m
                    << ">  B_CT = " << format_number(e.ct.field)
                    << " T  f_CT = " << format_number(e.ct.frequency) << " Hz\n";
      } else {
        const ClockTransition ct =
            find_clock_transition(sys, parse_label(cf_lower), parse_label(cf_upper), cf_blo, cf_bhi);
        std::cout << "B_CT = " << format_number(ct.field) << " T\n";
        std::cout << "f_CT = " << format_number(ct.frequency) << " Hz\n";
      }
    } else if (tn->parsed()) {
      const auto ia = tn_ia_max > 0.0 ? linspace(-tn_ia_max, tn_ia_max, tn_points) : std::vector<double>{0.0};
      const auto ib = tn_ib_max > 0.0 ? linspace(-tn_ib_max, tn_ib_max, tn_points) : std::vector<double>{0.0};
      CsvTable t;
      t.header = {"ia_A", "ib_A", "fa_Hz", "fb_Hz"};
      for (const auto& p : tuning_curve(cfg.netlist(), ia, ib)) t.rows.push_back({p.ia, p.ib, p.fa, p.fb});
      write_csv_atomic(tn_output, t);
      std::cout << "wrote " << tn_output << "\n";
    } else if (qz->parsed()) {
      const CircuitNetlist n = cfg.netlist();
      CouplingSet c = quantize_circuit(n, qz_order);
      const double idc = qz->count("--idc") ? qz_idc : n.bias_a + n.bias_b;
      if (qz_power > 0.0) {
        c.g3wm = three_wave_coupling(c, idc, pump_current_from_power(qz_power, cfg.get_double("circuit.z0")));
        c.induced_loss = induced_loss(c.g3wm, cfg.mode_pair().kappa_b());
      }
      std::cout << "ltilde_a = " << format_number(c.ltilde_a) << "\n"
                << "ltilde_b = " << format_number(c.ltilde_b) << "\n"
                << "za = " << format_number(c.za) << "\n"
                << "zb = " << format_number(c.zb) << "\n"
                << "fa = " << format_number(c.fa) << "\n"
                << "fb = " << format_number(c.fb) << "\n"
                << "g11 = " << format_number(c.g11) << "\n"
                << "g21 = " << format_number(c.g21) << "\n"
                << "g12 = " << format_number(c.g12) << "\n"
                << "g30 = " << format_number(c.g30) << "\n"
                << "g03 = " << format_number(c.g03) << "\n"
                << "k = " << format_number(c.k) << "\n"
                << "g3wm = " << format_number(c.g3wm) << "\n"
                << "induced_loss = " << format_number(c.induced_loss) << "\n";
    } else if (s11->parsed()) {
      const double kappa_tot = s_kc + s_ki + s_extra;
      const double span = s_span > 0.0 ? s_span : 30.0 * kappa_tot / (2.0 * 3.14159265358979324);
      const Trace tr =
          reflection_s11(s_f0, s_kc, s_ki, s_extra, linspace(s_f0 - span / 2, s_f0 + span / 2, s_points));
      write_trace_csv(s_output, tr);
      std::cout << "wrote " << s_output << "\n";
    } else if (rd->parsed()) {
      const ModePair modes = cfg.mode_pair();
      PulseSchedule sch;
      sch.add({rd_delay, rd_tend - rd_delay, PulseKind::pump_window, rd_g, 0.0, 0.0});
      const Trace tr = integrate_modes(modes, sch, rd_tend, 1.0 / (40.0 * modes.kappa_b()), Complex{1.0, 0.0});
      write_trace_csv(rd_output, tr);
      std::cout << "wrote " << rd_output << "\n";
    } else if (ec->parsed()) {
      const EnsembleModel ens = cfg.ensemble();
      PulseSchedule sch;
      const double tp = 1e-4;
      double t0 = 0.0;
      if (ec_wait > 0.0) {
        sch.add({0.0, tp, PulseKind::microwave_drive, 3.14159265358979324 / tp, 0.0, 0.0});
        t0 = ec_wait;
      }
      sch.add({t0, tp, PulseKind::microwave_drive, 0.5 * 3.14159265358979324 / tp, 0.0, 0.0});
      sch.add({t0 + ec_tau, tp, PulseKind::microwave_drive, 3.14159265358979324 / tp, 0.0, 0.0});
      const EchoResult r = hahn_echo(ens, sch);
      std::cout << "tau = " << format_number(r.tau) << "\n"
                << "polarization = " << format_number(r.polarization) << "\n"
                << "echo_amplitude = " << format_number(r.amplitude) << "\n";
      if (!ec_output.empty()) {
        write_trace_csv(ec_output, r.trace);
        std::cout << "wrote " << ec_output << "\n";
      }
    } else if (en->parsed()) {
      const Trace tr = endor_scan(sys, cfg.endor(), linspace(en_fmin, en_fmax, en_points));
      write_trace_csv(en_output, tr);
      std::cout << "wrote " << en_output << "\n";
    } else if (ft->parsed()) {
      const CsvTable t = read_csv(ft_input);
      if (t.rows.empty()) throw ConfigError("fit: empty input trace " + ft_input);
      std::vector<double> axis, col1, col2;
      for (const auto& row : t.rows) {
        axis.push_back(row.at(0));
        col1.push_back(row.at(1));
        if (row.size() > 2) col2.push_back(row.at(2));
      }
      FitResult r;
      if (ft_model == "resonance") {
        if (col2.size() != col1.size())
          throw ConfigError("fit --model resonance needs (axis, real, imag) columns");
        std::vector<Complex> s;
        for (size_t k = 0; k < col1.size(); ++k) s.push_back({col1[k], col2[k]});
        r = fit_resonance(axis, s);
      } else if (ft_model == "resonance-mag") {
        r = fit_resonance_magnitude(axis, col1);
      } else if (ft_model == "tuning") {
        if (!(ft_eta > 0.0)) throw ConfigError("fit --model tuning requires --eta > 0");
        r = fit_tuning(axis, col1, ft_f0, ft_eta);
      } else if (ft_model == "exp") {
        r = fit_exponential(axis, col1, ExponentialModel::simple);
      } else if (ft_model == "exp-inv") {
        r = fit_exponential(axis, col1, ExponentialModel::inversion_recovery);
      } else if (ft_model == "lorentzian") {
        r = fit_lorentzian_peaks(axis, col1, ft_npeaks);
      } else {
        throw ConfigError("unknown fit model: " + ft_model);
      }
      print_fit(r);
    } else if (rn->parsed()) {
      if (rn_pump_delay >= 0.0) cfg.entries["run.pump_delay"] = format_number(rn_pump_delay);
      for (const auto& f : run_scenario(rn_id, cfg, outdir)) std::cout << "wrote " << f << "\n";
    } else if (ls->parsed()) {
      for (const auto& s : scenario_registry()) {
        if (ls_ids)
          std::cout << s.id << "\n";
        else
          std::cout << s.id << "  (fig. " << s.figure << ")  " << s.description << "\n";
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
