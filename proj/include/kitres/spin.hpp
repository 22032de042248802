#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace kitres {

// Coupled electron-nuclear spin system, H = (gamma_e S + gamma_n I) Bz + A I.S,
// everything in ordinary frequency units (Hz).
struct SpinSystem {
  double s = 0.5;
  double i = 4.5;
  double gamma_e = -28.0e9;       // Hz/T, signed
  double gamma_n = 8.0e6;         // Hz/T
  double hyperfine = 1.47507e9;   // Hz

  int dim() const { return static_cast<int>(std::lround((2.0 * s + 1.0) * (2.0 * i + 1.0))); }
};

struct SpinOperators {
  Eigen::MatrixXcd sx, sy, sz, ix, iy, iz;
};

// Angular-momentum operators on the (2S+1)(2I+1) product space.
SpinOperators build_operators(double s, double i);

Eigen::MatrixXcd hamiltonian(const SpinSystem& sys, double bz);

struct LevelLabel {
  int f = 0;
  int m = 0;
  bool operator==(const LevelLabel&) const = default;
};

struct LabeledSpectrum {
  double bz = 0.0;
  Eigen::VectorXd energies;       // Hz, ascending
  std::vector<LevelLabel> labels; // paper convention: m = -<Fz> at the seed field
  Eigen::MatrixXcd eigenvectors;  // columns, |mS,mI> product basis

  int index_of(LevelLabel l) const;
};

// Adiabatic labeling by eigenvector-overlap continuation from zero field.
// step is the default field increment (T); it halves automatically when the
// best overlap drops to <= 0.5, and a labeling failure is thrown if the step
// underflows.
LabeledSpectrum labeled_spectrum(const SpinSystem& sys, double bz, double step = 1e-4);

enum class TransitionKind { esr, nmr };

struct Transition {
  LevelLabel lower, upper;
  double frequency;    // Hz
  double dipole;       // |<upper|Sx|lower>|
  double sensitivity;  // df/dB, Hz/T
  TransitionKind kind;
};

// All |dm| = 1 pairs of the given kind, with dipoles and centered-difference
// field sensitivities (step 1 uT).
std::vector<Transition> transitions(const SpinSystem& sys, const LabeledSpectrum& spec, TransitionKind kind);

double transition_frequency(const SpinSystem& sys, double bz, LevelLabel lower, LevelLabel upper);
double transition_sensitivity(const SpinSystem& sys, double bz, LevelLabel lower, LevelLabel upper,
                              double fd_step = 1e-6);

struct ClockTransition {
  double field;      // T
  double frequency;  // Hz
};

// Root of df/dB inside [b_lo, b_hi] for the labeled branch; |df/dB| at the
// returned field is below tol (Hz/T).
ClockTransition find_clock_transition(const SpinSystem& sys, LevelLabel lower, LevelLabel upper,
                                      double b_lo, double b_hi, double tol = 1e6);

// Scan every ESR branch for sensitivity sign changes below b_max.
struct ClockTransitionEntry {
  LevelLabel lower, upper;
  ClockTransition ct;
};
std::vector<ClockTransitionEntry> scan_clock_transitions(const SpinSystem& sys, double b_max);

// Homogeneous linewidth from an Overhauser field spread: |df/dB| * deltaB0.
double linewidth_estimate(const Transition& t, double delta_b0);

void write_transitions_csv(std::ostream& os, double bz, const std::vector<Transition>& list);

}  // namespace kitres
