#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kitres/circuit.hpp"
#include "kitres/config.hpp"

using namespace kitres;

namespace {
CircuitNetlist device() { return default_config().netlist(); }
}  // namespace

TEST_CASE("kinetic inductance law") {
  const KineticInductor ind{1e-10, 2e-10, 1e-2, 0.0};
  CHECK(kinetic_inductance(ind, 0.0) == doctest::Approx(3e-10).epsilon(1e-12));
  CHECK(kinetic_inductance(ind, 5e-3) == doctest::Approx(2e-10 + 1.25e-10).epsilon(1e-12));
  for (double i : {1e-3, 3e-3, 7e-3})
    CHECK(kinetic_inductance(ind, i) == doctest::Approx(kinetic_inductance(ind, -i)).epsilon(1e-14));
  CHECK_THROWS_AS(kinetic_inductance(ind, 1e-2), std::domain_error);
  CHECK_THROWS_AS(kinetic_inductance(ind, -2e-2), std::domain_error);

  const KineticInductor quart{1e-10, 0.0, 1e-2, 0.5};
  const double u = 0.6;
  CHECK(kinetic_inductance(quart, u * 1e-2) ==
        doctest::Approx(1e-10 * (1 + u * u + 0.5 * u * u * u * u)).epsilon(1e-12));
}

TEST_CASE("expansion coefficients") {
  const KineticInductor ind{1e-10, 0.0, 1e-2, 0.0};
  const auto c0 = expansion_coeffs(ind, 0.0);
  CHECK(c0[0] == 0.0);
  CHECK(c0[2] == 0.0);
  const auto ch = expansion_coeffs(ind, 0.5e-2);
  CHECK(ch[0] * ind.istar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ch[1] * ind.istar * ind.istar == doctest::Approx(1.0).epsilon(1e-12));

  // full reconstruction around the bias point
  const KineticInductor gen{1.3e-10, 0.7e-10, 0.8e-2, 0.4};
  const double idc = 0.3e-2, d = 0.01 * gen.istar;
  const auto c = expansion_coeffs(gen, idc);
  const double rebuilt =
      kinetic_inductance(gen, idc) +
      gen.lk0 * (c[0] * d + c[1] * d * d + c[2] * d * d * d + c[3] * d * d * d * d);
  CHECK(rebuilt == doctest::Approx(kinetic_inductance(gen, idc + d)).epsilon(1e-12));
}

TEST_CASE("resonance frequency") {
  CHECK(resonance_frequency(1e-9, 1e-12) == doctest::Approx(5.0329e9).epsilon(1e-4));
  CHECK(resonance_frequency(4e-9, 1e-12) ==
        doctest::Approx(0.5 * resonance_frequency(1e-9, 1e-12)).epsilon(1e-12));
  CHECK_THROWS_AS(resonance_frequency(0.0, 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(resonance_frequency(1e-9, -1e-12), std::invalid_argument);
}

TEST_CASE("netlist validation") {
  CircuitNetlist n = device();
  CHECK_NOTHROW(n.validate());
  n.bias_a = 10e-3;
  CHECK_THROWS(n.validate());
  n = device();
  n.cb = 0.0;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
}

TEST_CASE("tuning curve symmetry and spans") {
  const CircuitNetlist n = device();
  std::vector<double> ia, ib{0.0};
  for (int k = 0; k <= 40; ++k) ia.push_back(-4e-3 + 8e-3 * k / 40.0);
  const auto curve = tuning_curve(n, ia, ib);

  // sign-flip symmetry
  const auto flipped = tuning_curve(n, {2.5e-3}, {1e-3});
  const auto flipped2 = tuning_curve(n, {-2.5e-3}, {-1e-3});
  CHECK(flipped[0].fa == doctest::Approx(flipped2[0].fa).epsilon(1e-14));
  CHECK(flipped[0].fb == doctest::Approx(flipped2[0].fb).epsilon(1e-14));

  double fa_min = 1e30, fa_max = 0, fb_min = 1e30, fb_max = 0;
  for (const auto& p : curve) {
    fa_min = std::min(fa_min, p.fa);
    fa_max = std::max(fa_max, p.fa);
    fb_min = std::min(fb_min, p.fb);
    fb_max = std::max(fb_max, p.fb);
  }
  CHECK(fa_max == doctest::Approx(7.422e9).epsilon(1e-3));
  CHECK(fa_max - fa_min == doctest::Approx(80e6).epsilon(0.1));
  CHECK(fb_max - fb_min < 10e6);
}

TEST_CASE("three-wave mixing coupling") {
  const CouplingSet c = quantize_circuit(device());
  CHECK(three_wave_coupling(c, 0.0, 1e-4) == 0.0);
  const double g1 = three_wave_coupling(c, 2e-3, 1e-4);
  CHECK(three_wave_coupling(c, 2e-3, 2e-4) == doctest::Approx(2.0 * g1).epsilon(1e-12));
  CHECK(three_wave_coupling(c, 1e-3, 1e-4) == doctest::Approx(0.5 * g1).epsilon(1e-12));
  CHECK_THROWS_AS(three_wave_coupling(c, 6e-3, 1e-4), std::domain_error);

  // induced loss slope family: linear in pump power, quadratic in Idc
  const double kb = 3.17e7;
  const double p = 1e-7;
  auto loss_at = [&](double idc, double power) {
    return induced_loss(three_wave_coupling(c, idc, pump_current_from_power(power)), kb);
  };
  CHECK(loss_at(2e-3, 2 * p) == doctest::Approx(2.0 * loss_at(2e-3, p)).epsilon(1e-10));
  CHECK(loss_at(2e-3, p) == doctest::Approx(4.0 * loss_at(1e-3, p)).epsilon(1e-10));
}

TEST_CASE("induced loss formula") {
  CHECK(induced_loss(0.0, 3.17e7) == 0.0);
  CHECK(induced_loss(1.0e5, 3.17e7) == doctest::Approx(1.26e3).epsilon(5e-3));
  CHECK(induced_loss(2.0e5, 3.17e7) == doctest::Approx(4.0 * induced_loss(1.0e5, 3.17e7)).epsilon(1e-12));
  CHECK_THROWS_AS(induced_loss(1e5, 0.0), std::invalid_argument);
}

TEST_CASE("pump current from power") {
  CHECK(pump_current_from_power(0.0) == 0.0);
  CHECK(pump_current_from_power(5e-7) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK_THROWS_AS(pump_current_from_power(-1.0), std::invalid_argument);
}
