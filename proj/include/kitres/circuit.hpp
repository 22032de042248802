#pragma once

#include <array>
#include <vector>

#include "kitres/poly2.hpp"

namespace kitres {

// Current-dependent inductor: L(I) = Lg + Lk0 [1 + (I/I*)^2 + alpha (I/I*)^4].
struct KineticInductor {
  double lk0;    // zero-current kinetic inductance, H
  double lg;     // series geometric inductance, H
  double istar;  // critical-current scale, A
  double alpha;  // quartic coefficient
};

double kinetic_inductance(const KineticInductor& ind, double current);

// Coefficients c1..c4 (units 1/A^i) of the rf expansion
// L(Idc + Irf) = Lg + Lk(Idc) + Lk0 * sum_i c_i Irf^i.
std::array<double, 4> expansion_coeffs(const KineticInductor& ind, double idc);

double resonance_frequency(double inductance, double capacitance);

struct CircuitNetlist {
  KineticInductor inductor_a;  // microwire A
  KineticInductor inductor_c;  // KIC
  double lb;                   // microwire B, linear, H
  double ca;                   // F
  double cb;                   // F
  double bias_a = 0.0;         // I_A, A
  double bias_b = 0.0;         // I_B, A (KIC carries I_A + I_B)
  void validate() const;
};

// DC-biased inductances and the dressed (hybridized) values entering the
// quadratic Hamiltonian.
double biased_la(const CircuitNetlist& n);
double biased_lc(const CircuitNetlist& n);
double dressed_la(const CircuitNetlist& n);
double dressed_lb(const CircuitNetlist& n);

struct TuningPoint {
  double ia, ib;  // A
  double fa, fb;  // Hz
};

std::vector<TuningPoint> tuning_curve(const CircuitNetlist& base, const std::vector<double>& ia_sweep,
                                      const std::vector<double>& ib_sweep);

struct CouplingSet {
  double ltilde_a, ltilde_b;            // H
  double za, zb;                        // Ohm
  double fa, fb;                        // Hz
  double g11, g21, g12, g30, g03;       // flux-monomial coefficients, J/Wb^n
  double k;                             // Lk0_kic / sqrt(La Lb)
  double istar_kic;                     // A
  double g3wm = 0.0;                    // s^-1, angular; filled by three_wave_coupling
  double induced_loss = 0.0;            // s^-1
};

// Flux-charge-rate series: Phi_a(Qdot_a, Qdot_b) and Phi_b(Qdot_a, Qdot_b),
// or the inverse map after inversion. Exposed for the series-inversion checks.
struct FluxSeries {
  Poly2 a, b;
};

FluxSeries forward_flux_relation(const CircuitNetlist& n, int order);
// Fixed-point inversion of Phi = Lambda Qdot + R, truncated at the series order.
FluxSeries invert_flux_relation(const FluxSeries& fwd, int order);

CouplingSet quantize_circuit(const CircuitNetlist& n, int order = 3);

// g_3WM = 12 k (Idc Irf / I*^2) sqrt(wa wb); Idc is the total KIC current.
double three_wave_coupling(const CouplingSet& c, double idc, double irf);
double pump_current_from_power(double p_in, double z0 = 50.0);
double induced_loss(double g3wm, double kappa_b);

}  // namespace kitres
