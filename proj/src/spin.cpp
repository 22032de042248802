#include "kitres/spin.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace kitres {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

bool half_integer(double j) {
  const double t = 2.0 * j;
  return j >= 0.0 && std::abs(t - std::lround(t)) < 1e-12;
}

// Single-spin operators, basis ordered m = j, j-1, ..., -j.
struct SingleSpin {
  MatrixXcd jx, jy, jz;
};

SingleSpin single_spin(double j) {
  const int d = static_cast<int>(std::lround(2.0 * j)) + 1;
  MatrixXcd jz = MatrixXcd::Zero(d, d);
  MatrixXcd jp = MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k) jz(k, k) = j - k;
  for (int k = 1; k < d; ++k) {
    const double m = j - k;
    jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  SingleSpin out;
  out.jz = jz;
  out.jx = 0.5 * (jp + jp.adjoint());
  out.jy = std::complex<double>(0.0, -0.5) * (jp - jp.adjoint());
  return out;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct Eigensystem {
  VectorXd energies;
  MatrixXcd vectors;
};

Eigensystem diagonalize(const SpinSystem& sys, double bz) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(hamiltonian(sys, bz));
  if (solver.info() != Eigen::Success) throw std::runtime_error("spin Hamiltonian diagonalization failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Seed labels at a small but fully split field: F from the energy cluster,
// m = -<Fz> (paper sign convention).
constexpr double kSeedField = 1e-4;  // T

std::vector<LevelLabel> seed_labels(const SpinSystem& sys, const Eigensystem& es) {
  const SpinOperators ops = build_operators(sys.s, sys.i);
  const MatrixXcd fz = ops.sz + ops.iz;
  const int d = sys.dim();
  std::vector<LevelLabel> labels(d);
  // Zero-field manifolds: F = I +- S for S = 1/2; energies A/2 [F(F+1)-S(S+1)-I(I+1)].
  // Midpoint between the two zero-field manifold energies
  // A/2 [F(F+1) - S(S+1) - I(I+1)], F = I -+ S.
  const double e_mid = 0.5 * sys.hyperfine * (0.5 * ((sys.i + sys.s) * (sys.i + sys.s + 1.0) +
                                                     (sys.i - sys.s) * (sys.i - sys.s + 1.0)) -
                                              sys.s * (sys.s + 1.0) - sys.i * (sys.i + 1.0));
  const int f_lo = static_cast<int>(std::lround(sys.i - sys.s));
  const int f_hi = static_cast<int>(std::lround(sys.i + sys.s));
  for (int k = 0; k < d; ++k) {
    const std::complex<double> mexp = (es.vectors.col(k).adjoint() * fz * es.vectors.col(k))(0, 0);
    const double mval = -mexp.real();
    const long mr = std::lround(mval);
    if (std::abs(mval - static_cast<double>(mr)) > 0.25)
      throw std::runtime_error("labeled_spectrum: seed-field m projection is not near-integer");
    labels[k].m = static_cast<int>(mr);
    labels[k].f = es.energies(k) < e_mid ? f_lo : f_hi;
  }
  return labels;
}

// Carry labels from (v_prev, labels) onto the eigenvectors at the next field.
// Returns false when the best overlap is ambiguous (<= 0.5).
bool carry_labels(const MatrixXcd& v_prev, const std::vector<LevelLabel>& prev, const MatrixXcd& v_next,
                  std::vector<LevelLabel>& next) {
  const int d = static_cast<int>(prev.size());
  const Eigen::MatrixXd ov = (v_prev.adjoint() * v_next).cwiseAbs();
  next.resize(d);
  for (int col = 0; col < d; ++col) {
    int best = 0;
    ov.col(col).maxCoeff(&best);
    if (ov(best, col) <= 0.5) return false;
    next[col] = prev[best];
  }
  return true;
}

struct TrackedState {
  double bz;
  Eigensystem es;
  std::vector<LevelLabel> labels;
};

TrackedState track_to(const SpinSystem& sys, double bz, double step) {
  if (!(bz >= 0.0)) throw std::invalid_argument("labeled_spectrum: field must be non-negative");
  TrackedState st;
  st.bz = std::min(kSeedField, bz > 0.0 ? bz : kSeedField);
  st.es = diagonalize(sys, st.bz);
  st.labels = seed_labels(sys, st.es);
  double h = step;
  while (st.bz < bz) {
    const double b_next = std::min(st.bz + h, bz);
    Eigensystem es_next = diagonalize(sys, b_next);
    std::vector<LevelLabel> labels_next;
    if (carry_labels(st.es.vectors, st.labels, es_next.vectors, labels_next)) {
      st = {b_next, std::move(es_next), std::move(labels_next)};
      h = step;
    } else {
      h *= 0.5;
      if (h < 1e-12)
        throw std::runtime_error("labeled_spectrum: adiabatic labeling ambiguous near Bz = " +
                                 std::to_string(b_next) + " T");
    }
  }
  return st;
}

}  // namespace

SpinOperators build_operators(double s, double i) {
  if (!half_integer(s) || !half_integer(i))
    throw std::invalid_argument("build_operators: 2S and 2I must be non-negative integers");
  const SingleSpin es = single_spin(s);
  const SingleSpin ns = single_spin(i);
  const int ds = static_cast<int>(std::lround(2.0 * s)) + 1;
  const int di = static_cast<int>(std::lround(2.0 * i)) + 1;
  const MatrixXcd ids = MatrixXcd::Identity(ds, ds);
  const MatrixXcd idi = MatrixXcd::Identity(di, di);
  return {kron(es.jx, idi), kron(es.jy, idi), kron(es.jz, idi),
          kron(ids, ns.jx), kron(ids, ns.jy), kron(ids, ns.jz)};
}

MatrixXcd hamiltonian(const SpinSystem& sys, double bz) {
  if (!std::isfinite(bz)) throw std::invalid_argument("hamiltonian: field must be finite");
  const SpinOperators ops = build_operators(sys.s, sys.i);
  return bz * (sys.gamma_e * ops.sz + sys.gamma_n * ops.iz) +
         sys.hyperfine * (ops.sx * ops.ix + ops.sy * ops.iy + ops.sz * ops.iz);
}

int LabeledSpectrum::index_of(LevelLabel l) const {
  for (int k = 0; k < static_cast<int>(labels.size()); ++k)
    if (labels[k] == l) return k;
  return -1;
}

LabeledSpectrum labeled_spectrum(const SpinSystem& sys, double bz, double step) {
  if (!(bz >= 0.0 && bz <= 1.0))
    throw std::invalid_argument("labeled_spectrum: field must lie in [0, 1] T");
  if (bz == 0.0) {
    // Degenerate manifolds: energies from H(0), canonical label assignment.
    Eigensystem es = diagonalize(sys, 0.0);
    const TrackedState seed = track_to(sys, kSeedField, step);
    LabeledSpectrum out;
    out.bz = 0.0;
    out.energies = std::move(es.energies);
    out.eigenvectors = std::move(es.vectors);
    // Order the seed labels by seed-field energy; degenerate clusters at zero
    // field inherit that ordering.
    std::vector<int> idx(seed.labels.size());
    for (size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<int>(k);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return seed.es.energies(a) < seed.es.energies(b); });
    out.labels.resize(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) out.labels[k] = seed.labels[idx[k]];
    return out;
  }
  TrackedState st = track_to(sys, bz, step);
  return {st.bz, std::move(st.es.energies), std::move(st.labels), std::move(st.es.vectors)};
}

namespace {

// Labels at a nearby field, matched by overlap against an already labeled
// spectrum. Used for the finite-difference sensitivities.
LabeledSpectrum neighbor_spectrum(const SpinSystem& sys, const LabeledSpectrum& ref, double bz) {
  Eigensystem es = diagonalize(sys, bz);
  std::vector<LevelLabel> labels;
  if (!carry_labels(ref.eigenvectors, ref.labels, es.vectors, labels))
    throw std::runtime_error("neighbor_spectrum: ambiguous overlap during finite difference");
  return {bz, std::move(es.energies), std::move(labels), std::move(es.vectors)};
}

double level_energy(const LabeledSpectrum& s, LevelLabel l) {
  const int k = s.index_of(l);
  if (k < 0) throw std::invalid_argument("level label not present in spectrum");
  return s.energies(k);
}

constexpr double kFdStep = 1e-6;  // T

// Finite-difference neighbors of a labeled spectrum; one-sided when the
// centered stencil would cross into the degenerate zero-field point.
struct FdPair {
  LabeledSpectrum lo, hi;
};

FdPair fd_neighbors(const SpinSystem& sys, const LabeledSpectrum& at, double h) {
  if (at.bz - h > 1e-9)
    return {neighbor_spectrum(sys, at, at.bz - h), neighbor_spectrum(sys, at, at.bz + h)};
  return {neighbor_spectrum(sys, at, at.bz + h), neighbor_spectrum(sys, at, at.bz + 2.0 * h)};
}

}  // namespace

std::vector<Transition> transitions(const SpinSystem& sys, const LabeledSpectrum& spec, TransitionKind kind) {
  const SpinOperators ops = build_operators(sys.s, sys.i);
  // At exactly zero field the eigenbasis inside each degenerate manifold is
  // arbitrary; dipoles and sensitivities are taken in the small-field limit.
  const bool zero_field = spec.bz == 0.0;
  const LabeledSpectrum eig = zero_field ? labeled_spectrum(sys, kFdStep) : spec;
  const FdPair fd = fd_neighbors(sys, eig, kFdStep);
  const double dstep = fd.hi.bz - fd.lo.bz;

  const int d = sys.dim();
  std::vector<Transition> out;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const LevelLabel la = eig.labels[a];
      const LevelLabel lb = eig.labels[b];
      const bool cross = la.f != lb.f;
      if ((kind == TransitionKind::esr) != cross) continue;
      if (std::abs(la.m - lb.m) != 1) continue;
      const int lower = eig.energies(a) <= eig.energies(b) ? a : b;
      const int upper = lower == a ? b : a;
      Transition t;
      t.lower = eig.labels[lower];
      t.upper = eig.labels[upper];
      t.kind = kind;
      t.frequency = std::abs(level_energy(spec, t.upper) - level_energy(spec, t.lower));
      t.dipole = std::abs((eig.eigenvectors.col(upper).adjoint() * ops.sx * eig.eigenvectors.col(lower))(0, 0));
      const double f_lo = level_energy(fd.lo, t.upper) - level_energy(fd.lo, t.lower);
      const double f_hi = level_energy(fd.hi, t.upper) - level_energy(fd.hi, t.lower);
      t.sensitivity = (f_hi - f_lo) / dstep;
      out.push_back(t);
    }
  std::sort(out.begin(), out.end(), [](const Transition& x, const Transition& y) { return x.frequency < y.frequency; });
  return out;
}

double transition_frequency(const SpinSystem& sys, double bz, LevelLabel lower, LevelLabel upper) {
  const LabeledSpectrum s = labeled_spectrum(sys, bz);
  return level_energy(s, upper) - level_energy(s, lower);
}

double transition_sensitivity(const SpinSystem& sys, double bz, LevelLabel lower, LevelLabel upper,
                              double fd_step) {
  const LabeledSpectrum s = labeled_spectrum(sys, bz);
  const FdPair fd = fd_neighbors(sys, s, fd_step);
  const double f_lo = level_energy(fd.lo, upper) - level_energy(fd.lo, lower);
  const double f_hi = level_energy(fd.hi, upper) - level_energy(fd.hi, lower);
  return (f_hi - f_lo) / (fd.hi.bz - fd.lo.bz);
}

ClockTransition find_clock_transition(const SpinSystem& sys, LevelLabel lower, LevelLabel upper,
                                      double b_lo, double b_hi, double tol) {
  double s_lo = transition_sensitivity(sys, b_lo, lower, upper);
  double s_hi = transition_sensitivity(sys, b_hi, lower, upper);
  if (s_lo == 0.0) return {b_lo, transition_frequency(sys, b_lo, lower, upper)};
  if (s_hi == 0.0) return {b_hi, transition_frequency(sys, b_hi, lower, upper)};
  if (s_lo * s_hi > 0.0)
    throw std::invalid_argument("find_clock_transition: df/dB does not change sign inside the bracket");
  double mid = 0.5 * (b_lo + b_hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (b_lo + b_hi);
    const double s_mid = transition_sensitivity(sys, mid, lower, upper);
    if (std::abs(s_mid) < tol) break;
    if (s_mid * s_lo < 0.0) {
      b_hi = mid;
      s_hi = s_mid;
    } else {
      b_lo = mid;
      s_lo = s_mid;
    }
  }
  return {mid, transition_frequency(sys, mid, lower, upper)};
}

std::vector<ClockTransitionEntry> scan_clock_transitions(const SpinSystem& sys, double b_max) {
  // Single adiabatic walk of the field axis; per-branch coarse slopes from
  // consecutive steps, sign changes refined by bisection.
  const double b0 = 1e-3;
  const double db = 1e-3;
  LabeledSpectrum cur = labeled_spectrum(sys, b0);
  const std::vector<Transition> branches = transitions(sys, cur, TransitionKind::esr);

  auto branch_freqs = [&](const LabeledSpectrum& s) {
    std::vector<double> f(branches.size());
    for (size_t k = 0; k < branches.size(); ++k)
      f[k] = level_energy(s, branches[k].upper) - level_energy(s, branches[k].lower);
    return f;
  };

  std::vector<double> f_prev = branch_freqs(cur);
  std::vector<double> slope_prev(branches.size(), 0.0);
  std::vector<bool> found(branches.size(), false);
  std::vector<ClockTransitionEntry> out;

  double b_prev = b0;
  bool have_slope = false;
  for (double b = b0 + db; b <= b_max + 0.5 * db; b += db) {
    cur = neighbor_spectrum(sys, cur, b);
    const std::vector<double> f = branch_freqs(cur);
    for (size_t k = 0; k < branches.size(); ++k) {
      const double slope = (f[k] - f_prev[k]) / db;
      if (have_slope && !found[k] && slope_prev[k] * slope < 0.0) {
        found[k] = true;
        out.push_back({branches[k].lower, branches[k].upper,
                       find_clock_transition(sys, branches[k].lower, branches[k].upper,
                                             std::max(b_prev - db, b0), b)});
      }
      slope_prev[k] = slope;
    }
    f_prev = f;
    b_prev = b;
    have_slope = true;
  }
  return out;
}

double linewidth_estimate(const Transition& t, double delta_b0) {
  return std::abs(t.sensitivity) * delta_b0;
}

void write_transitions_csv(std::ostream& os, double bz, const std::vector<Transition>& list) {
  os << "Bz_T,F_lower,m_lower,F_upper,m_upper,freq_Hz,dipole,dfdB_Hz_per_T\n";
  os.precision(12);
  for (const Transition& t : list)
    os << bz << ',' << t.lower.f << ',' << t.lower.m << ',' << t.upper.f << ',' << t.upper.m << ','
       << t.frequency << ',' << t.dipole << ',' << t.sensitivity << '\n';
}

}  // namespace kitres
