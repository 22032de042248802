#include "kitres/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kitres {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};
}  // namespace

void ModePair::validate() const {
  if (kappa_ca < 0.0 || kappa_ia < 0.0 || kappa_cb < 0.0 || kappa_ib < 0.0)
    throw std::invalid_argument("ModePair: decay rates must be non-negative");
}

Complex steady_state(const ModePair& modes, double g3wm, Complex drive) {
  modes.validate();
  if (modes.delta_b != 0.0)
    throw std::invalid_argument("steady_state: closed form requires a resonant pump (delta_b = 0)");
  const double induced = modes.kappa_b() > 0.0 ? 4.0 * g3wm * g3wm / modes.kappa_b() : 0.0;
  return 2.0 * std::sqrt(modes.kappa_ca) * drive /
         (modes.kappa_a() + induced + 2.0 * kI * modes.delta_a);
}

Trace reflection_s11(double f0, double kappa_c, double kappa_i, double extra_loss,
                     const std::vector<double>& freqs) {
  Trace tr;
  tr.axis = freqs;
  tr.values.reserve(freqs.size());
  const double kappa_tot = kappa_c + kappa_i + extra_loss;
  for (double f : freqs) {
    const double delta = kTwoPi * (f - f0);
    tr.values.push_back(1.0 - 2.0 * kappa_c / (kappa_tot + 2.0 * kI * delta));
  }
  tr.meta["model"] = "single_port_reflection";
  return tr;
}

void PulseSchedule::add(PulseEvent e) {
  if (e.duration < 0.0) throw std::invalid_argument("PulseSchedule: negative event duration");
  events.push_back(e);
  std::stable_sort(events.begin(), events.end(),
                   [](const PulseEvent& a, const PulseEvent& b) { return a.t_start < b.t_start; });
}

void PulseSchedule::validate() const {
  for (const PulseEvent& e : events)
    if (e.duration < 0.0) throw std::invalid_argument("PulseSchedule: negative event duration");
  if (!std::is_sorted(events.begin(), events.end(),
                      [](const PulseEvent& a, const PulseEvent& b) { return a.t_start < b.t_start; }))
    throw std::invalid_argument("PulseSchedule: events must be sorted by start time");
}

double PulseSchedule::active_amplitude(PulseKind kind, double t) const {
  double a = 0.0;
  for (const PulseEvent& e : events)
    if (e.kind == kind && t >= e.t_start && t < e.t_start + e.duration) a += e.amplitude;
  return a;
}

Complex PulseSchedule::active_drive(double t) const {
  Complex a{};
  for (const PulseEvent& e : events)
    if (e.kind == PulseKind::microwave_drive && t >= e.t_start && t < e.t_start + e.duration)
      a += e.amplitude * std::exp(kI * e.phase);
  return a;
}

TwoModeTrace integrate_modes_ab(const ModePair& modes, const PulseSchedule& schedule, double t_end,
                                double dt, Complex a0, Complex b0) {
  modes.validate();
  schedule.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_modes: non-positive time step");
  const double max_rate = std::max(modes.kappa_a(), modes.kappa_b());
  if (max_rate > 0.0 && dt > 1.0 / (20.0 * max_rate))
    throw std::invalid_argument("integrate_modes: time step too coarse for the fastest decay rate");
  const auto n_steps_ll = static_cast<long long>(std::ceil(t_end / dt));
  if (n_steps_ll < 1 || n_steps_ll > 200'000'000)
    throw std::runtime_error("integrate_modes: step count underflow/overflow for requested grid");
  const int n = static_cast<int>(n_steps_ll);

  auto rhs = [&](double t, Complex a, Complex b, Complex& da, Complex& db) {
    const double g = schedule.active_amplitude(PulseKind::pump_window, t);
    // Detuning ramps are programmed in Hz.
    const double da_shift = kTwoPi * schedule.active_amplitude(PulseKind::detuning_ramp, t);
    const Complex drive = schedule.active_drive(t);
    da = -(0.5 * modes.kappa_a() + kI * (modes.delta_a + da_shift)) * a - kI * g * b +
         std::sqrt(modes.kappa_ca) * drive;
    db = -(0.5 * modes.kappa_b() + kI * modes.delta_b) * b - kI * g * a;
  };

  TwoModeTrace out;
  out.a.axis.reserve(n + 1);
  out.a.values.reserve(n + 1);
  out.b.axis.reserve(n + 1);
  out.b.values.reserve(n + 1);
  Complex a = a0, b = b0;
  double t = 0.0;
  out.a.axis.push_back(t);
  out.a.values.push_back(a);
  out.b.axis.push_back(t);
  out.b.values.push_back(b);
  for (int k = 0; k < n; ++k) {
    Complex k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    rhs(t, a, b, k1a, k1b);
    rhs(t + 0.5 * dt, a + 0.5 * dt * k1a, b + 0.5 * dt * k1b, k2a, k2b);
    rhs(t + 0.5 * dt, a + 0.5 * dt * k2a, b + 0.5 * dt * k2b, k3a, k3b);
    rhs(t + dt, a + dt * k3a, b + dt * k3b, k4a, k4b);
    a += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    b += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    t = (k + 1) * dt;
    out.a.axis.push_back(t);
    out.a.values.push_back(a);
    out.b.axis.push_back(t);
    out.b.values.push_back(b);
  }
  return out;
}

Trace integrate_modes(const ModePair& modes, const PulseSchedule& schedule, double t_end, double dt,
                      Complex a0, Complex b0) {
  return integrate_modes_ab(modes, schedule, t_end, dt, a0, b0).a;
}

void EnsembleModel::validate() const {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("EnsembleModel: T1 and T2 must be positive");
  if (n_spins < 1) throw std::invalid_argument("EnsembleModel: need at least one spin packet");
  if (!populations.empty()) {
    double sum = 0.0;
    for (double p : populations) {
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("EnsembleModel: populations must lie in [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("EnsembleModel: populations must sum to 1");
  }
}

Quadrature gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(0.5 * k);
    j(k, k - 1) = off;
    j(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(j);
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    q.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    q.weights[k] = v0 * v0;
    sum += q.weights[k];
  }
  for (double& w : q.weights) w /= sum;
  return q;
}

namespace {

struct ControlPulse {
  double t_start;
  double area;
};

constexpr double kPi = std::numbers::pi;

bool near_area(double area, double target) { return std::abs(area - target) < 0.25 * target; }

}  // namespace

EchoResult hahn_echo(const EnsembleModel& ens, const PulseSchedule& schedule) {
  ens.validate();
  schedule.validate();
  std::vector<ControlPulse> pulses;
  for (const PulseEvent& e : schedule.events)
    if (e.kind == PulseKind::microwave_drive) pulses.push_back({e.t_start, e.amplitude * e.duration});

  double t_half = 0.0, t_pi = 0.0, polarization = 1.0;
  if (pulses.size() == 2 && near_area(pulses[0].area, 0.5 * kPi) && near_area(pulses[1].area, kPi)) {
    t_half = pulses[0].t_start;
    t_pi = pulses[1].t_start;
  } else if (pulses.size() == 3 && near_area(pulses[0].area, kPi) && near_area(pulses[1].area, 0.5 * kPi) &&
             near_area(pulses[2].area, kPi)) {
    const double t_wait = pulses[1].t_start - pulses[0].t_start;
    polarization = 1.0 - 2.0 * std::exp(-t_wait / ens.t1);
    t_half = pulses[1].t_start;
    t_pi = pulses[2].t_start;
  } else {
    throw std::invalid_argument("hahn_echo: schedule must contain pi/2-tau-pi (optionally preceded by pi)");
  }
  const double tau = t_pi - t_half;
  if (!(tau > 0.0)) throw std::invalid_argument("hahn_echo: refocusing pulse must follow the pi/2 pulse");

  const Quadrature q = gauss_hermite(ens.n_spins);
  const double t_echo = t_half + 2.0 * tau;
  const double envelope = polarization * std::exp(-2.0 * tau / ens.t2);

  // Echo transient: each packet accumulates phase 2 pi delta (t - t_echo)
  // after the pi-pulse conjugation.
  const double window = ens.detuning_sigma > 0.0 ? 5.0 / (kTwoPi * ens.detuning_sigma) : 0.1 * tau;
  const int n_pts = 401;
  EchoResult res;
  res.tau = tau;
  res.polarization = polarization;
  res.trace.meta["scenario"] = "hahn_echo";
  for (int k = 0; k < n_pts; ++k) {
    const double t = t_echo - window + 2.0 * window * k / (n_pts - 1);
    Complex e{};
    for (int s = 0; s < ens.n_spins; ++s) {
      const double delta = std::sqrt(2.0) * ens.detuning_sigma * q.nodes[s];
      e += q.weights[s] * std::exp(kI * (kTwoPi * delta * (t - t_echo)));
    }
    res.trace.axis.push_back(t);
    res.trace.values.push_back(envelope * e);
  }
  res.amplitude = envelope;  // signed; packet phases cancel exactly at t = 2 tau
  return res;
}

double echo_silencing_factor(double kappa_tot, double delta_f) {
  const double half = 0.5 * kappa_tot;
  return half / std::sqrt(half * half + kTwoPi * delta_f * kTwoPi * delta_f);
}

Trace endor_scan(const SpinSystem& sys, const EndorConfig& cfg, const std::vector<double>& f_nmr,
                 EnsembleModel* ens) {
  std::vector<EndorProbe> probes = cfg.probes;
  if (probes.empty())
    probes = {{{4, 0}, {5, 1}, 0.8}, {{4, 1}, {5, 0}, 0.2}};

  const LabeledSpectrum spec = labeled_spectrum(sys, cfg.bz);
  const std::vector<Transition> nmr = transitions(sys, spec, TransitionKind::nmr);
  for (const EndorProbe& p : probes)
    if (spec.index_of(p.lower) < 0 || spec.index_of(p.upper) < 0)
      throw std::invalid_argument("endor_scan: probed transition not found in the labeled spectrum");

  const int d = sys.dim();
  std::vector<double> base_pop(d, 1.0 / d);
  if (ens) {
    ens->validate();
    if (!ens->populations.empty()) {
      if (static_cast<int>(ens->populations.size()) != d)
        throw std::invalid_argument("endor_scan: populations must have one entry per level");
      base_pop = ens->populations;
    }
  }

  struct Line {
    int i, j;       // level indices in the spectrum
    double f;       // Hz
    double gamma;   // Hz, Lorentzian FWHM
  };
  std::vector<Line> lines;
  lines.reserve(nmr.size());
  for (const Transition& t : nmr) {
    const double gamma = std::max(std::abs(t.sensitivity) * cfg.delta_b0, 1e3);
    lines.push_back({spec.index_of(t.lower), spec.index_of(t.upper), t.frequency, gamma});
  }

  double weight_sum = 0.0;
  for (const EndorProbe& p : probes) weight_sum += p.weight;

  Trace tr;
  tr.axis = f_nmr;
  tr.values.reserve(f_nmr.size());
  std::vector<double> pop(d);
  for (double f : f_nmr) {
    pop = base_pop;
    std::vector<double> retained;
    retained.reserve(probes.size());
    for (const EndorProbe& p : probes) retained.push_back(p.weight);
    for (const Line& ln : lines) {
      const double df = f - ln.f;
      const double hw = 0.5 * ln.gamma;
      const double lor = hw * hw / (df * df + hw * hw);
      const double sat = std::min(1.0, cfg.rf_area * lor);
      if (sat < 1e-12) continue;
      const double transfer = 0.5 * sat * (pop[ln.i] - pop[ln.j]);
      pop[ln.i] -= transfer;
      pop[ln.j] += transfer;
      for (size_t k = 0; k < probes.size(); ++k) {
        const int lo = spec.index_of(probes[k].lower);
        const int up = spec.index_of(probes[k].upper);
        if (ln.i == lo || ln.j == lo || ln.i == up || ln.j == up) retained[k] *= 1.0 - 0.5 * sat;
      }
    }
    double echo = 0.0;
    for (double r : retained) echo += r;
    tr.values.push_back(echo / weight_sum);
  }
  if (ens) ens->populations = pop;
  tr.meta["scenario"] = "endor_scan";
  return tr;
}

}  // namespace kitres
