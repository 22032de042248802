#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "kitres/spin.hpp"

namespace kitres {

using Complex = std::complex<double>;

// Sampled trace: axis in s or Hz, complex amplitudes, free-form metadata.
struct Trace {
  std::vector<double> axis;
  std::vector<Complex> values;
  std::map<std::string, std::string> meta;
};

struct ModePair {
  double fa = 7.422e9, fb = 6.605e9;           // Hz
  double kappa_ca = 9.4e4, kappa_ia = 7.5e5;   // s^-1
  double kappa_cb = 2.6e7, kappa_ib = 5.7e6;   // s^-1
  double delta_a = 0.0, delta_b = 0.0;         // angular, s^-1

  double kappa_a() const { return kappa_ca + kappa_ia; }
  double kappa_b() const { return kappa_cb + kappa_ib; }
  void validate() const;
};

// Steady-state mode-A amplitude under a resonant pump (delta_b = 0):
// a = 2 sqrt(kappa_c^a) alpha_in / (kappa_a + 4 g^2/kappa_b + 2 i delta_a).
Complex steady_state(const ModePair& modes, double g3wm, Complex drive);

// Single-port reflection S11(f) = 1 - 2 kappa_c / (kappa_tot + 2 i delta),
// delta = 2 pi (f - f0); kappa_tot includes any 3WM-induced loss.
Trace reflection_s11(double f0, double kappa_c, double kappa_i, double extra_loss,
                     const std::vector<double>& freqs);

enum class PulseKind { microwave_drive, rf_drive, pump_window, detuning_ramp };

struct PulseEvent {
  double t_start = 0.0;   // s
  double duration = 0.0;  // s
  PulseKind kind = PulseKind::microwave_drive;
  double amplitude = 0.0;
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
};

struct PulseSchedule {
  std::vector<PulseEvent> events;  // kept sorted by t_start
  void add(PulseEvent e);
  void validate() const;
  // Sum of amplitudes of active events of a kind at time t (phase ignored).
  double active_amplitude(PulseKind kind, double t) const;
  Complex active_drive(double t) const;  // microwave drive with phase
};

// Fixed-step RK4 integration of the two-mode Langevin equations
//   da/dt = -(kappa_a/2 + i delta_a) a - i g(t) b + sqrt(kappa_ca) alpha(t)
//   db/dt = -(kappa_b/2 + i delta_b) b - i g(t) a
// with g(t) from pump windows and delta_a shifted by detuning ramps.
// Returns the mode-A trace on the grid.
Trace integrate_modes(const ModePair& modes, const PulseSchedule& schedule, double t_end, double dt,
                      Complex a0 = {}, Complex b0 = {});
// Same, also returning mode B.
struct TwoModeTrace {
  Trace a, b;
};
TwoModeTrace integrate_modes_ab(const ModePair& modes, const PulseSchedule& schedule, double t_end, double dt,
                                Complex a0 = {}, Complex b0 = {});

struct EnsembleModel {
  int n_spins = 201;             // Gauss-Hermite nodes
  double detuning_sigma = 5e4;   // Hz
  double t1 = 53.0;              // s
  double t2 = 0.45;              // s
  // Level populations for the 20-level bookkeeping (ENDOR); sum 1.
  std::vector<double> populations;
  void validate() const;
};

// Gauss-Hermite discretization of a unit-variance Gaussian; weights sum to 1.
struct Quadrature {
  std::vector<double> nodes, weights;
};
Quadrature gauss_hermite(int n);

struct EchoResult {
  Trace trace;          // echo transient around t = 2 tau
  double amplitude;     // |echo| at t = 2 tau
  double tau;           // s
  double polarization;  // 1, or 1 - 2 exp(-t_wait/T1) for inversion recovery
};

// Hahn echo (pi/2 - tau - pi) or inversion recovery (pi - wait - pi/2 - tau - pi);
// control pulses are classified by area = amplitude * duration.
EchoResult hahn_echo(const EnsembleModel& ens, const PulseSchedule& schedule);

// Resonator amplitude response applied to the emitted echo when mode A is
// detuned by delta_f during the emission window.
double echo_silencing_factor(double kappa_tot, double delta_f);

struct EndorProbe {
  LevelLabel lower, upper;
  double weight;
};

struct EndorConfig {
  double bz = 13.49e-3;                 // T
  std::vector<EndorProbe> probes;       // default {|4,0>-|5,1>: 0.8, |4,1>-|5,0>: 0.2}
  double rf_area = 2.0;                 // saturation scale at dip center
  double delta_b0 = 4e-6;               // T, sets dip widths
};

// Normalized echo amplitude vs RF frequency. Saturation bookkeeping: an RF
// tone within the linewidth of an NMR transition mixes that pair's populations
// and reduces the retained echo share of any probed pair touching either level.
Trace endor_scan(const SpinSystem& sys, const EndorConfig& cfg, const std::vector<double>& f_nmr,
                 EnsembleModel* ens = nullptr);

}  // namespace kitres
