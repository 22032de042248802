#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <set>
#include <sstream>

#include "kitres/spin.hpp"

using namespace kitres;

namespace {
const SpinSystem kBi{};  // defaults: S=1/2, I=9/2, Bi:Si constants
constexpr double kA = 1.47507e9;
}  // namespace

TEST_CASE("build_operators basics") {
  const SpinOperators half = build_operators(0.5, 0.0);
  CHECK(half.sz.rows() == 2);
  CHECK(half.sz(0, 0).real() == doctest::Approx(0.5));
  CHECK(half.sz(1, 1).real() == doctest::Approx(-0.5));

  const SpinOperators ops = build_operators(0.5, 4.5);
  CHECK(ops.sx.rows() == 20);

  const Eigen::MatrixXcd comm =
      ops.sx * ops.sy - ops.sy * ops.sx - std::complex<double>(0, 1) * ops.sz;
  CHECK(comm.norm() < 1e-14);
  const Eigen::MatrixXcd commi =
      ops.ix * ops.iy - ops.iy * ops.ix - std::complex<double>(0, 1) * ops.iz;
  CHECK(commi.norm() < 1e-13);

  CHECK((ops.sx - ops.sx.adjoint()).norm() < 1e-14);
  CHECK((ops.iy - ops.iy.adjoint()).norm() < 1e-14);

  CHECK_THROWS_AS(build_operators(0.3, 0.0), std::invalid_argument);
}

TEST_CASE("hamiltonian structure") {
  const Eigen::MatrixXcd h = hamiltonian(kBi, 25.6e-3);
  CHECK((h - h.adjoint()).norm() < 1e-14 * h.norm());
  CHECK(std::abs(h.trace()) < 1e-6 * kA);

  // zero field: eigenvalues +9/4 A (x11) and -11/4 A (x9)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(kBi, 0.0));
  int n_low = 0, n_high = 0;
  for (int k = 0; k < 20; ++k) {
    if (std::abs(es.eigenvalues()(k) + 2.75 * kA) < 1e3) ++n_low;
    if (std::abs(es.eigenvalues()(k) - 2.25 * kA) < 1e3) ++n_high;
  }
  CHECK(n_low == 9);
  CHECK(n_high == 11);
  const double split = es.eigenvalues()(19) - es.eigenvalues()(0);
  CHECK(split == doctest::Approx(5.0 * kA).epsilon(1e-9));
}

TEST_CASE("labeled_spectrum labeling") {
  const LabeledSpectrum zero = labeled_spectrum(kBi, 0.0);
  int f4 = 0, f5 = 0;
  for (const auto& l : zero.labels) (l.f == 4 ? f4 : f5)++;
  CHECK(f4 == 9);
  CHECK(f5 == 11);

  const LabeledSpectrum spec = labeled_spectrum(kBi, 65e-3);
  CHECK(spec.energies.size() == 20);
  for (int k = 1; k < 20; ++k) CHECK(spec.energies(k) > spec.energies(k - 1));
  CHECK((spec.eigenvectors * spec.eigenvectors.adjoint() - Eigen::MatrixXcd::Identity(20, 20)).norm() <
        1e-12);
  CHECK(std::abs(spec.energies.sum()) < 1e-6 * kA);

  // label multiset invariance: {(4,-4..4)} u {(5,-5..5)}
  std::set<std::pair<int, int>> seen;
  for (const auto& l : spec.labels) seen.insert({l.f, l.m});
  CHECK(seen.size() == 20);
  for (int m = -4; m <= 4; ++m) CHECK(seen.count({4, m}) == 1);
  for (int m = -5; m <= 5; ++m) CHECK(seen.count({5, m}) == 1);

  // continuity from zero field
  const LabeledSpectrum tiny = labeled_spectrum(kBi, 1e-6);
  for (int k = 0; k < 20; ++k) CHECK(tiny.labels[k] == zero.labels[k]);

  CHECK_THROWS(labeled_spectrum(kBi, 2.0));
}

TEST_CASE("transitions catalog") {
  const LabeledSpectrum zero = labeled_spectrum(kBi, 0.0);
  const auto esr0 = transitions(kBi, zero, TransitionKind::esr);
  REQUIRE(!esr0.empty());
  for (const auto& t : esr0) {
    CHECK(t.frequency == doctest::Approx(5.0 * kA).epsilon(1e-9));
    CHECK(std::abs(t.lower.m - t.upper.m) == 1);
    CHECK(t.dipole >= 0.0);
    CHECK(t.dipole <= 5.0);
  }

  const LabeledSpectrum spec = labeled_spectrum(kBi, 25.6e-3);
  const auto esr = transitions(kBi, spec, TransitionKind::esr);
  int found = 0;
  for (const auto& t : esr) {
    if ((t.lower == LevelLabel{4, 0} && t.upper == LevelLabel{5, -1}) ||
        (t.lower == LevelLabel{4, -1} && t.upper == LevelLabel{5, 0})) {
      ++found;
      CHECK(t.frequency == doctest::Approx(7.3382e9).epsilon(2e-4));
    }
    CHECK(t.lower.f == 4);
    CHECK(t.upper.f == 5);
    CHECK(t.frequency >= 0.0);
  }
  CHECK(found == 2);

  // forbidden pairs carry negligible dipole: check via raw matrix elements
  const SpinOperators ops = build_operators(kBi.s, kBi.i);
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b) {
      const int dm = std::abs(spec.labels[a].m - spec.labels[b].m);
      if (dm != 1) {
        const std::complex<double> el =
            (spec.eigenvectors.col(a).adjoint() * ops.sx * spec.eigenvectors.col(b))(0);
        CHECK(std::abs(el) < 1e-10);
      }
    }
}

TEST_CASE("NMR catalog at 13.49 mT matches diagonalization") {
  const LabeledSpectrum spec = labeled_spectrum(kBi, 13.49e-3);
  const auto nmr = transitions(kBi, spec, TransitionKind::nmr);
  auto freq_of = [&](LevelLabel lo, LevelLabel up) {
    for (const auto& t : nmr)
      if (t.lower == lo && t.upper == up) return t.frequency;
    FAIL("transition not found");
    return 0.0;
  };
  // the six lines probed in the RF scan, low to high
  CHECK(freq_of({5, 1}, {5, 2}) == doctest::Approx(37.0604e6).epsilon(1e-4));
  CHECK(freq_of({4, 2}, {4, 1}) == doctest::Approx(37.2763e6).epsilon(1e-4));
  CHECK(freq_of({5, 0}, {5, 1}) == doctest::Approx(37.4345e6).epsilon(1e-4));
  CHECK(freq_of({4, 1}, {4, 0}) == doctest::Approx(37.6504e6).epsilon(1e-4));
  CHECK(freq_of({5, -1}, {5, 0}) == doctest::Approx(37.8202e6).epsilon(1e-4));
  CHECK(freq_of({4, 0}, {4, -1}) == doctest::Approx(38.0360e6).epsilon(1e-4));
  for (const auto& t : nmr) CHECK(t.lower.f == t.upper.f);
}

TEST_CASE("sensitivity agrees with Hellmann-Feynman") {
  const double bz = 10e-3;
  const LabeledSpectrum spec = labeled_spectrum(kBi, bz);
  const SpinOperators ops = build_operators(kBi.s, kBi.i);
  const Eigen::MatrixXcd dh = kBi.gamma_e * ops.sz + kBi.gamma_n * ops.iz;
  const auto esr = transitions(kBi, spec, TransitionKind::esr);
  for (const auto& t : esr) {
    const int lo = spec.index_of(t.lower), up = spec.index_of(t.upper);
    const double hf = ((spec.eigenvectors.col(up).adjoint() * dh * spec.eigenvectors.col(up))(0) -
                       (spec.eigenvectors.col(lo).adjoint() * dh * spec.eigenvectors.col(lo))(0))
                          .real();
    CHECK(t.sensitivity == doctest::Approx(hf).epsilon(1e-4));
  }
}

TEST_CASE("clock transition location") {
  const ClockTransition ct = find_clock_transition(kBi, {4, 0}, {5, -1}, 10e-3, 40e-3);
  CHECK(ct.field == doctest::Approx(26.526e-3).epsilon(5e-3));
  CHECK(ct.frequency == doctest::Approx(7.338215e9).epsilon(1e-5));
  CHECK(std::abs(transition_sensitivity(kBi, ct.field, {4, 0}, {5, -1})) < 1e6);

  // no sign change in bracket
  CHECK_THROWS(find_clock_transition(kBi, {4, 0}, {5, -1}, 1e-3, 5e-3));

  const auto all = scan_clock_transitions(kBi, 300e-3);
  bool has_main = false;
  for (const auto& e : all)
    if (e.lower == LevelLabel{4, 0} && e.upper == LevelLabel{5, -1} &&
        std::abs(e.ct.field - 26.526e-3) < 1e-3)
      has_main = true;
  CHECK(has_main);
  CHECK(all.size() >= 2);
}

TEST_CASE("linewidth estimate") {
  Transition t{};
  t.sensitivity = -28e9;
  CHECK(linewidth_estimate(t, 4e-6) == doctest::Approx(112e3).epsilon(1e-9));
  CHECK(linewidth_estimate(t, 8e-6) == doctest::Approx(2.0 * linewidth_estimate(t, 4e-6)));
  const ClockTransition ct = find_clock_transition(kBi, {4, 0}, {5, -1}, 10e-3, 40e-3);
  Transition at_ct{};
  at_ct.sensitivity = transition_sensitivity(kBi, ct.field, {4, 0}, {5, -1});
  CHECK(linewidth_estimate(at_ct, 4e-6) < 1e3);
}

TEST_CASE("transitions CSV export") {
  const LabeledSpectrum spec = labeled_spectrum(kBi, 25.6e-3);
  std::ostringstream os;
  write_transitions_csv(os, 25.6e-3, transitions(kBi, spec, TransitionKind::esr));
  const std::string s = os.str();
  CHECK(s.rfind("Bz_T,F_lower,m_lower,F_upper,m_upper,freq_Hz,dipole,dfdB_Hz_per_T", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') > 1);
}
