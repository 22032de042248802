#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kitres/circuit.hpp"
#include "kitres/config.hpp"

using namespace kitres;

namespace {

CircuitNetlist random_netlist(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CircuitNetlist n;
  n.inductor_a = {1e-10 * (0.5 + u(rng)), 1e-9 * (0.5 + 2.0 * u(rng)), 1e-2 * (0.5 + u(rng)),
                  u(rng)};
  n.inductor_c = {1e-11 * (0.2 + u(rng)), 1e-12 * u(rng), 0.6e-2 * (0.5 + u(rng)), u(rng)};
  n.lb = 1e-9 * (0.5 + 2.0 * u(rng));
  n.ca = 1e-13 * (1.0 + 4.0 * u(rng));
  n.cb = 1e-13 * (1.0 + 4.0 * u(rng));
  n.bias_a = 0.4 * n.inductor_a.istar * (2.0 * u(rng) - 1.0);
  n.bias_b = 0.4 * n.inductor_c.istar * (2.0 * u(rng) - 1.0) - n.bias_a;
  if (std::abs(n.bias_a + n.bias_b) >= 0.9 * n.inductor_c.istar) n.bias_b = -n.bias_a;
  return n;
}

// corrected closed forms (flux-basis cubic from the linear inverse)
double closed_form_g12(const CircuitNetlist& n) {
  const auto cfa = expansion_coeffs(n.inductor_a, n.bias_a);
  const auto cfc = expansion_coeffs(n.inductor_c, n.bias_a + n.bias_b);
  const double c1a = n.inductor_a.lk0 * cfa[0];
  const double c1n = n.inductor_c.lk0 * cfc[0];
  const double la0 = biased_la(n);
  const double lc0 = biased_lc(n);
  const double det = la0 * n.lb + la0 * lc0 + n.lb * lc0;
  return -1.5 * (c1a * (n.lb + lc0) * lc0 * lc0 + c1n * la0 * la0 * n.lb) / (det * det * det);
}

}  // namespace

TEST_CASE("linear circuit reduces to dressed inductances") {
  CircuitNetlist n = default_config().netlist();  // zero bias -> c1 = 0 everywhere
  const CouplingSet c = quantize_circuit(n);
  const double la0 = biased_la(n);
  const double lc0 = biased_lc(n);
  CHECK(c.ltilde_a == doctest::Approx(la0 + lc0 / (1.0 + lc0 / n.lb)).epsilon(1e-12));
  CHECK(c.ltilde_b == doctest::Approx(n.lb + lc0 / (1.0 + lc0 / la0)).epsilon(1e-12));
  CHECK(c.g12 == 0.0);
  CHECK(c.g21 == 0.0);
  CHECK(c.g30 == 0.0);
  CHECK(c.g03 == 0.0);
  CHECK(c.za > 0.0);
  CHECK(c.zb > 0.0);
  CHECK(c.fa == doctest::Approx(7.422e9).epsilon(1e-3));
  CHECK(c.fb == doctest::Approx(6.605e9).epsilon(1e-3));
  CHECK(c.ltilde_a >= la0);
}

TEST_CASE("series inversion identity and closed forms over random netlists") {
  std::mt19937 rng(20240817);
  const int order = 3;
  for (int trial = 0; trial < 100; ++trial) {
    const CircuitNetlist n = random_netlist(rng);
    const FluxSeries fwd = forward_flux_relation(n, order);
    const FluxSeries inv = invert_flux_relation(fwd, order);

    // compose forward(inverse(Phi)) and compare against the identity map,
    // with coefficients weighted by a physical flux scale
    const Poly2 ida = fwd.a.compose(inv.a, inv.b);
    const Poly2 idb = fwd.b.compose(inv.a, inv.b);
    const double phi_scale = 1e-15;  // typical zero-point flux, Wb
    Poly2 ra = ida;
    Poly2 rb = idb;
    ra.set_coeff(1, 0, ra.coeff(1, 0) - 1.0);
    rb.set_coeff(0, 1, rb.coeff(0, 1) - 1.0);
    const double lin_scale = phi_scale;  // identity-map value scale at phi_scale
    CHECK(ra.scaled_max_abs(phi_scale, phi_scale) < 1e-10 * lin_scale);
    CHECK(rb.scaled_max_abs(phi_scale, phi_scale) < 1e-10 * lin_scale);

    const CouplingSet c = quantize_circuit(n, order);
    const double la0 = biased_la(n);
    const double lc0 = biased_lc(n);
    CHECK(c.ltilde_a == doctest::Approx(la0 + lc0 / (1.0 + lc0 / n.lb)).epsilon(1e-10));
    const double g12_ref = closed_form_g12(n);
    if (std::abs(g12_ref) > 0.0)
      CHECK(c.g12 == doctest::Approx(g12_ref).epsilon(1e-10));
  }
}

TEST_CASE("decoupling limit") {
  CircuitNetlist n = default_config().netlist();
  n.inductor_c.lk0 = 1e-22;  // KIC inductance -> 0
  n.inductor_c.lg = 0.0;
  n.bias_a = 1e-3;
  n.bias_b = 0.0;
  const CouplingSet c = quantize_circuit(n);
  CHECK(std::abs(c.g12) < 1e-30 * std::abs(c.g30) + 1e-6 * std::abs(c.g30));
  CHECK(c.fa == doctest::Approx(resonance_frequency(biased_la(n), n.ca)).epsilon(1e-10));
  CHECK(c.fb == doctest::Approx(resonance_frequency(n.lb, n.cb)).epsilon(1e-10));
}

TEST_CASE("dimensional rescaling") {
  std::mt19937 rng(7);
  CircuitNetlist n = random_netlist(rng);
  const CouplingSet c = quantize_circuit(n);
  const double s = 3.7;
  CircuitNetlist m = n;
  m.inductor_a.lk0 *= s;
  m.inductor_a.lg *= s;
  m.inductor_c.lk0 *= s;
  m.inductor_c.lg *= s;
  m.lb *= s;
  m.ca /= s;
  m.cb /= s;
  const CouplingSet cs = quantize_circuit(m);
  CHECK(cs.fa == doctest::Approx(c.fa).epsilon(1e-10));
  CHECK(cs.fb == doctest::Approx(c.fb).epsilon(1e-10));
  CHECK(cs.za == doctest::Approx(s * c.za).epsilon(1e-10));
  CHECK(cs.zb == doctest::Approx(s * c.zb).epsilon(1e-10));
  const double g = three_wave_coupling(c, 1e-3, 1e-4);
  const double gs = three_wave_coupling(cs, 1e-3, 1e-4);
  CHECK(gs == doctest::Approx(g).epsilon(1e-10));
}

TEST_CASE("error contracts") {
  CHECK_THROWS_AS(quantize_circuit(default_config().netlist(), 1), std::invalid_argument);
  FluxSeries degenerate{Poly2(3), Poly2(3)};  // Lambda = 0
  CHECK_THROWS_AS(invert_flux_relation(degenerate, 3), std::runtime_error);
}
