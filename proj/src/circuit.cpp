#include "kitres/circuit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kitres {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_bias(const KineticInductor& ind, double current) {
  if (!(std::abs(current) < ind.istar))
    throw std::domain_error("kinetic inductor biased at or beyond its critical current");
}
}  // namespace

double kinetic_inductance(const KineticInductor& ind, double current) {
  check_bias(ind, current);
  const double u = current / ind.istar;
  const double u2 = u * u;
  return ind.lg + ind.lk0 * (1.0 + u2 + ind.alpha * u2 * u2);
}

std::array<double, 4> expansion_coeffs(const KineticInductor& ind, double idc) {
  check_bias(ind, idc);
  const double is = ind.istar;
  const double u = idc / is;
  return {
      (2.0 * u + 4.0 * ind.alpha * u * u * u) / is,
      (1.0 + 6.0 * ind.alpha * u * u) / (is * is),
      (4.0 * ind.alpha * u) / (is * is * is),
      ind.alpha / (is * is * is * is),
  };
}

double resonance_frequency(double inductance, double capacitance) {
  if (!(inductance > 0.0) || !(capacitance > 0.0))
    throw std::invalid_argument("resonance_frequency: non-positive element value");
  return 1.0 / (kTwoPi * std::sqrt(inductance * capacitance));
}

void CircuitNetlist::validate() const {
  if (!(inductor_a.lk0 > 0.0) || !(inductor_c.lk0 > 0.0) || !(inductor_a.istar > 0.0) ||
      !(inductor_c.istar > 0.0) || !(lb > 0.0) || !(ca > 0.0) || !(cb > 0.0) || inductor_a.lg < 0.0 ||
      inductor_c.lg < 0.0)
    throw std::invalid_argument("CircuitNetlist: element values must be positive");
  check_bias(inductor_a, bias_a);
  check_bias(inductor_c, bias_a + bias_b);
}

double biased_la(const CircuitNetlist& n) { return kinetic_inductance(n.inductor_a, n.bias_a); }
double biased_lc(const CircuitNetlist& n) { return kinetic_inductance(n.inductor_c, n.bias_a + n.bias_b); }

double dressed_la(const CircuitNetlist& n) {
  const double lc = biased_lc(n);
  return biased_la(n) + lc / (1.0 + lc / n.lb);
}

double dressed_lb(const CircuitNetlist& n) {
  const double lc = biased_lc(n);
  return n.lb + lc / (1.0 + lc / biased_la(n));
}

std::vector<TuningPoint> tuning_curve(const CircuitNetlist& base, const std::vector<double>& ia_sweep,
                                      const std::vector<double>& ib_sweep) {
  std::vector<TuningPoint> out;
  out.reserve(ia_sweep.size() * ib_sweep.size());
  for (double ib : ib_sweep)
    for (double ia : ia_sweep) {
      CircuitNetlist n = base;
      n.bias_a = ia;
      n.bias_b = ib;
      n.validate();
      out.push_back({ia, ib, resonance_frequency(dressed_la(n), n.ca),
                     resonance_frequency(dressed_lb(n), n.cb)});
    }
  return out;
}

FluxSeries forward_flux_relation(const CircuitNetlist& n, int order) {
  n.validate();
  const auto cfa = expansion_coeffs(n.inductor_a, n.bias_a);
  const auto cfc = expansion_coeffs(n.inductor_c, n.bias_a + n.bias_b);
  // Flux expansion coefficients of the Lagrangian inductances (absolute units).
  const double c1a = n.inductor_a.lk0 * cfa[0];
  const double c2a = n.inductor_a.lk0 * cfa[1];
  const double c1n = n.inductor_c.lk0 * cfc[0];
  const double c2n = n.inductor_c.lk0 * cfc[1];
  const double la0 = biased_la(n);
  const double lc0 = biased_lc(n);

  const Poly2 qa = Poly2::var_x(order);
  const Poly2 qb = Poly2::var_y(order);
  const Poly2 s = qa + qb;  // KIC current

  FluxSeries f{Poly2(order), Poly2(order)};
  f.a = (la0 + lc0) * qa + lc0 * qb + 1.5 * c1a * (qa * qa) + 1.5 * c1n * (s * s) +
        2.0 * c2a * (qa * qa * qa) + 2.0 * c2n * (s * s * s);
  f.b = (n.lb + lc0) * qb + lc0 * qa + 1.5 * c1n * (s * s) + 2.0 * c2n * (s * s * s);
  return f;
}

FluxSeries invert_flux_relation(const FluxSeries& fwd, int order) {
  // Phi = Lambda Qdot + R(Qdot); iterate Qdot <- Lambda^-1 (Phi - R(Qdot)).
  Eigen::Matrix2d lambda;
  lambda << fwd.a.coeff(1, 0), fwd.a.coeff(0, 1), fwd.b.coeff(1, 0), fwd.b.coeff(0, 1);
  const double det = lambda.determinant();
  if (det == 0.0 || !std::isfinite(1.0 / det))
    throw std::runtime_error("invert_flux_relation: singular linear flux relation (degenerate circuit)");
  const Eigen::Matrix2d inv = lambda.inverse();

  FluxSeries rem{fwd.a, fwd.b};  // R: nonlinear remainder
  rem.a.set_coeff(1, 0, 0.0);
  rem.a.set_coeff(0, 1, 0.0);
  rem.b.set_coeff(1, 0, 0.0);
  rem.b.set_coeff(0, 1, 0.0);

  const Poly2 pa = Poly2::var_x(order);
  const Poly2 pb = Poly2::var_y(order);
  // Seed with the linear inverse; each pass refines one more order.
  FluxSeries q{inv(0, 0) * pa + inv(0, 1) * pb, inv(1, 0) * pa + inv(1, 1) * pb};
  for (int pass = 1; pass < order; ++pass) {
    const Poly2 ra = rem.a.compose(q.a, q.b);
    const Poly2 rb = rem.b.compose(q.a, q.b);
    q.a = inv(0, 0) * (pa - ra) + inv(0, 1) * (pb - rb);
    q.b = inv(1, 0) * (pa - ra) + inv(1, 1) * (pb - rb);
  }
  return q;
}

CouplingSet quantize_circuit(const CircuitNetlist& n, int order) {
  if (order < 2) throw std::invalid_argument("quantize_circuit: truncation order must be >= 2");
  const FluxSeries fwd = forward_flux_relation(n, order);
  const FluxSeries q = invert_flux_relation(fwd, order);

  // Kinetic energy T(Qdot); the full Hamiltonian kinetic part is
  // Phi.Qdot - T evaluated on the inverted series.
  const auto cfa = expansion_coeffs(n.inductor_a, n.bias_a);
  const auto cfc = expansion_coeffs(n.inductor_c, n.bias_a + n.bias_b);
  const double c1a = n.inductor_a.lk0 * cfa[0];
  const double c2a = n.inductor_a.lk0 * cfa[1];
  const double c1n = n.inductor_c.lk0 * cfc[0];
  const double c2n = n.inductor_c.lk0 * cfc[1];
  const double la0 = biased_la(n);
  const double lc0 = biased_lc(n);

  const Poly2 pa = Poly2::var_x(order);
  const Poly2 pb = Poly2::var_y(order);
  const Poly2& qa = q.a;
  const Poly2& qb = q.b;
  const Poly2 s = qa + qb;

  Poly2 t = 0.5 * la0 * (qa * qa) + 0.5 * n.lb * (qb * qb) + 0.5 * lc0 * (s * s) +
            0.5 * c1a * (qa * qa * qa) + 0.5 * c1n * (s * s * s);
  if (order >= 4) t += 0.5 * c2a * (qa * qa * qa * qa) + 0.5 * c2n * (s * s * s * s);

  const Poly2 h = pa * qa + pb * qb - t;  // kinetic part of H(Phi)

  CouplingSet c{};
  c.ltilde_a = 0.5 / h.coeff(2, 0);
  c.ltilde_b = 0.5 / h.coeff(0, 2);
  c.g11 = h.coeff(1, 1);
  c.g21 = h.coeff(2, 1);
  c.g12 = h.coeff(1, 2);
  c.g30 = h.coeff(3, 0);
  c.g03 = h.coeff(0, 3);
  c.za = std::sqrt(c.ltilde_a / n.ca);
  c.zb = std::sqrt(c.ltilde_b / n.cb);
  c.fa = resonance_frequency(c.ltilde_a, n.ca);
  c.fb = resonance_frequency(c.ltilde_b, n.cb);
  c.k = n.inductor_c.lk0 / std::sqrt(la0 * n.lb);
  c.istar_kic = n.inductor_c.istar;
  return c;
}

double three_wave_coupling(const CouplingSet& c, double idc, double irf) {
  if (!(std::abs(idc) < c.istar_kic))
    throw std::domain_error("three_wave_coupling: DC current at or beyond the KIC critical current");
  const double wa = kTwoPi * c.fa;
  const double wb = kTwoPi * c.fb;
  return 12.0 * c.k * (idc * irf / (c.istar_kic * c.istar_kic)) * std::sqrt(wa * wb);
}

double pump_current_from_power(double p_in, double z0) {
  if (!(p_in >= 0.0) || !(z0 > 0.0)) throw std::invalid_argument("pump_current_from_power: bad inputs");
  return std::sqrt(p_in / z0);
}

double induced_loss(double g3wm, double kappa_b) {
  if (!(kappa_b > 0.0)) throw std::invalid_argument("induced_loss: kappa_b must be positive");
  return 4.0 * g3wm * g3wm / kappa_b;
}

}  // namespace kitres
