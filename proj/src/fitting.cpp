#include "kitres/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kitres {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};
}  // namespace

double FitResult::value(const std::string& name) const {
  for (size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return values(static_cast<Eigen::Index>(k));
  throw std::invalid_argument("FitResult: unknown parameter " + name);
}

double FitResult::sigma(const std::string& name) const {
  for (size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return sigmas(static_cast<Eigen::Index>(k));
  throw std::invalid_argument("FitResult: unknown parameter " + name);
}

FitResult levenberg_marquardt(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                              const Eigen::VectorXd& x0, const std::vector<std::string>& names,
                              const LmOptions& opts) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const Eigen::Index p = x0.size();
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw std::invalid_argument("levenberg_marquardt: name/parameter count mismatch");

  VectorXd x = x0;
  VectorXd r = residual(x);
  double cost = r.squaredNorm();
  double lambda = opts.initial_damping;

  auto jacobian = [&](const VectorXd& xc, const VectorXd& rc) {
    MatrixXd j(rc.size(), p);
    for (Eigen::Index k = 0; k < p; ++k) {
      const double h = std::max(std::abs(xc(k)), 1e-30) * 1e-7;
      VectorXd xp = xc;
      xp(k) += h;
      j.col(k) = (residual(xp) - rc) / h;
    }
    return j;
  };

  FitResult out;
  out.names = names;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const MatrixXd j = jacobian(x, r);
    const MatrixXd jtj = j.transpose() * j;
    const VectorXd jtr = j.transpose() * r;
    bool stepped = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < p; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      const VectorXd step = a.ldlt().solve(-jtr);
      const VectorXd x_try = x + step;
      const VectorXd r_try = residual(x_try);
      const double cost_try = r_try.squaredNorm();
      if (std::isfinite(cost_try) && cost_try <= cost) {
        const double rel = (cost - cost_try) / std::max(cost, 1e-300);
        const double step_rel = step.cwiseQuotient(x_try.cwiseAbs().cwiseMax(1e-30)).cwiseAbs().maxCoeff();
        x = x_try;
        r = r_try;
        cost = cost_try;
        lambda = std::max(lambda * 0.3, 1e-14);
        stepped = true;
        if (rel < opts.rel_tolerance || step_rel < opts.rel_tolerance) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (out.converged || !stepped) break;
  }
  if (!out.converged && cost <= 1e-24) out.converged = true;  // already at the floor

  out.values = x;
  out.iterations = it + 1;
  out.residual_norm = std::sqrt(cost);

  // Covariance from the Jacobian at the optimum, scaled by reduced residual.
  const Eigen::MatrixXd j = jacobian(x, r);
  Eigen::MatrixXd jtj = j.transpose() * j;
  const Eigen::Index dof = std::max<Eigen::Index>(r.size() - p, 1);
  const double s2 = cost / static_cast<double>(dof);
  const Eigen::MatrixXd cov = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
  out.sigmas = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  if (!out.converged) out.warnings.push_back("fit did not converge within iteration budget");
  return out;
}

FitResult fit_resonance(const std::vector<double>& freqs, const std::vector<Complex>& s11) {
  if (freqs.size() != s11.size() || freqs.size() < 50)
    throw std::invalid_argument("fit_resonance: need >= 50 matched samples");

  // Initial guesses from the magnitude dip.
  size_t imin = 0;
  double edge = 0.0;
  for (size_t k = 0; k < freqs.size(); ++k) {
    if (std::abs(s11[k]) < std::abs(s11[imin])) imin = k;
  }
  edge = 0.5 * (std::abs(s11.front()) + std::abs(s11.back()));
  const double depth = edge - std::abs(s11[imin]);
  const double half_level = edge - 0.5 * depth;
  double f_left = freqs.front(), f_right = freqs.back();
  for (size_t k = imin; k > 0; --k)
    if (std::abs(s11[k]) > half_level) {
      f_left = freqs[k];
      break;
    }
  for (size_t k = imin; k < freqs.size(); ++k)
    if (std::abs(s11[k]) > half_level) {
      f_right = freqs[k];
      break;
    }
  const double kappa_tot0 = std::max(kTwoPi * (f_right - f_left), 1.0);
  const double dip0 = std::abs(s11[imin]) / std::max(edge, 1e-12);
  const double kappa_c0 = 0.5 * kappa_tot0 * (1.0 - dip0);  // undercoupled branch

  const double f00 = freqs[imin];
  const double span = freqs.back() - freqs.front();

  auto model = [&](const Eigen::VectorXd& x, double f) {
    const double f0 = x(0), kc = x(1), ki = x(2);
    const Complex bg = x(3) * std::exp(kI * (x(4) + x(5) * (f - f00) / span));
    const double delta = kTwoPi * (f - f0);
    return bg * (1.0 - 2.0 * kc / (kc + ki + 2.0 * kI * delta));
  };
  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(2 * static_cast<Eigen::Index>(freqs.size()));
    for (size_t k = 0; k < freqs.size(); ++k) {
      const Complex d = model(x, freqs[k]) - s11[k];
      r(2 * static_cast<Eigen::Index>(k)) = d.real();
      r(2 * static_cast<Eigen::Index>(k) + 1) = d.imag();
    }
    return r;
  };

  Eigen::VectorXd x0(6);
  x0 << f00, std::max(kappa_c0, 1e-3), std::max(kappa_tot0 - kappa_c0, 1e-3), std::max(edge, 1e-6),
      std::arg(s11.front()), 0.0;
  FitResult res = levenberg_marquardt(residual, x0,
                                      {"f0", "kappa_c", "kappa_i", "bg_amp", "bg_phase", "bg_phase_slope"});
  if (!res.converged)
    res.warnings.push_back("fit_resonance: residual norm " + std::to_string(res.residual_norm));
  return res;
}

FitResult fit_resonance_magnitude(const std::vector<double>& freqs, const std::vector<double>& mag) {
  if (freqs.size() != mag.size() || freqs.size() < 50)
    throw std::invalid_argument("fit_resonance_magnitude: need >= 50 matched samples");
  std::vector<Complex> as_complex(mag.begin(), mag.end());
  // Reuse the complex initializer path for guesses but fit |S11| only.
  size_t imin = 0;
  for (size_t k = 0; k < mag.size(); ++k)
    if (mag[k] < mag[imin]) imin = k;
  const double edge = 0.5 * (mag.front() + mag.back());
  const double half_level = edge - 0.5 * (edge - mag[imin]);
  double f_left = freqs.front(), f_right = freqs.back();
  for (size_t k = imin; k > 0; --k)
    if (mag[k] > half_level) {
      f_left = freqs[k];
      break;
    }
  for (size_t k = imin; k < freqs.size(); ++k)
    if (mag[k] > half_level) {
      f_right = freqs[k];
      break;
    }
  const double kappa_tot0 = std::max(kTwoPi * (f_right - f_left), 1.0);
  const double dip0 = mag[imin] / std::max(edge, 1e-12);
  const double kappa_c0 = 0.5 * kappa_tot0 * (1.0 - dip0);

  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(freqs.size()));
    for (size_t k = 0; k < freqs.size(); ++k) {
      const double delta = kTwoPi * (freqs[k] - x(0));
      const Complex s = 1.0 - 2.0 * x(1) / (x(1) + x(2) + 2.0 * kI * delta);
      r(static_cast<Eigen::Index>(k)) = x(3) * std::abs(s) - mag[k];
    }
    return r;
  };
  Eigen::VectorXd x0(4);
  x0 << freqs[imin], std::max(kappa_c0, 1e-3), std::max(kappa_tot0 - kappa_c0, 1e-3), std::max(edge, 1e-6);
  return levenberg_marquardt(residual, x0, {"f0", "kappa_c", "kappa_i", "bg_amp"});
}

FitResult fit_tuning(const std::vector<double>& currents, const std::vector<double>& delta_f, double f0,
                     double eta) {
  if (currents.size() != delta_f.size() || currents.size() < 8)
    throw std::invalid_argument("fit_tuning: need >= 8 matched bias points");
  const double i_max = *std::max_element(currents.begin(), currents.end(),
                                         [](double a, double b) { return std::abs(a) < std::abs(b); });

  auto residual = [&](const Eigen::VectorXd& x) {
    const double istar = x(0), alpha = x(1);
    Eigen::VectorXd r(static_cast<Eigen::Index>(currents.size()));
    for (size_t k = 0; k < currents.size(); ++k) {
      const double u = currents[k] / istar;
      const double u2 = u * u;
      const double model = f0 / std::sqrt(1.0 + eta * (u2 + alpha * u2 * u2)) - f0;
      r(static_cast<Eigen::Index>(k)) = model - delta_f[k];
    }
    return r;
  };

  // Initial I* from the largest shift assuming the quadratic term dominates.
  const double df_max = *std::min_element(delta_f.begin(), delta_f.end());
  const double u2_guess = std::max(-2.0 * df_max / (f0 * eta), 1e-6);
  Eigen::VectorXd x0(2);
  x0 << std::abs(i_max) / std::sqrt(u2_guess), 0.1;
  FitResult res = levenberg_marquardt(residual, x0, {"istar", "alpha"});

  const double span_frac = std::abs(i_max) / res.value("istar");
  if (span_frac < 0.3) res.warnings.push_back("fit_tuning: bias span below 30% of I*, ill-conditioned fit");

  // Echo the fixed Lk0 fraction so callers get the full (I*, alpha, eta) tuple.
  FitResult full;
  full.names = {"istar", "alpha", "eta"};
  full.values.resize(3);
  full.sigmas.resize(3);
  full.values << res.values(0), res.values(1), eta;
  full.sigmas << res.sigmas(0), res.sigmas(1), 0.0;
  full.residual_norm = res.residual_norm;
  full.converged = res.converged;
  full.iterations = res.iterations;
  full.warnings = res.warnings;
  return full;
}

FitResult fit_exponential(const std::vector<double>& t, const std::vector<double>& y, ExponentialModel model) {
  if (t.size() != y.size() || t.size() < 10)
    throw std::invalid_argument("fit_exponential: need >= 10 matched samples");

  // Log-linear guess for T on the envelope's first decade.
  const double y0 = y.front(), y_end = y.back();
  double t_guess = (t.back() - t.front()) / 3.0;
  {
    std::vector<double> lt, lv;
    const double base = model == ExponentialModel::simple ? y_end : y_end;
    for (size_t k = 0; k < t.size(); ++k) {
      const double env = model == ExponentialModel::simple ? y[k] - base : 0.5 * (base - y[k]);
      if (env > 1e-12 * std::abs(y0 - base)) {
        lt.push_back(t[k]);
        lv.push_back(std::log(env));
      }
    }
    if (lt.size() >= 3) {
      // least-squares line
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (size_t k = 0; k < lt.size(); ++k) {
        sx += lt[k];
        sy += lv[k];
        sxx += lt[k] * lt[k];
        sxy += lt[k] * lv[k];
      }
      const double n = static_cast<double>(lt.size());
      const double slope = (n * sxy - sx * sy) / std::max(n * sxx - sx * sx, 1e-300);
      if (slope < -1e-300) t_guess = -1.0 / slope;
    }
  }

  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(t.size()));
    for (size_t k = 0; k < t.size(); ++k) {
      const double e = std::exp(-t[k] / x(0));
      const double m = model == ExponentialModel::simple ? x(1) * e + x(2) : x(1) * (1.0 - 2.0 * e) + x(2);
      r(static_cast<Eigen::Index>(k)) = m - y[k];
    }
    return r;
  };

  Eigen::VectorXd x0(3);
  if (model == ExponentialModel::simple)
    x0 << t_guess, y0 - y_end, y_end;
  else
    x0 << t_guess, 0.5 * (y_end - y0), 0.5 * (y_end + y0);
  FitResult res = levenberg_marquardt(residual, x0, {"T", "amplitude", "offset"});
  if (!(res.value("T") > 0.0)) throw std::runtime_error("fit_exponential: converged to a non-positive time constant");
  return res;
}

FitResult fit_lorentzian_peaks(const std::vector<double>& freqs, const std::vector<double>& y, int n_peaks) {
  if (n_peaks < 1) throw std::invalid_argument("fit_lorentzian_peaks: need at least one peak");
  if (freqs.size() != y.size() || freqs.size() < static_cast<size_t>(3 * n_peaks + 1) + 5)
    throw std::invalid_argument("fit_lorentzian_peaks: insufficient samples for requested peak count");

  const double base0 = *std::min_element(y.begin(), y.end());
  // Seed centers at the n largest local maxima.
  std::vector<std::pair<double, size_t>> candidates;
  for (size_t k = 1; k + 1 < y.size(); ++k)
    if (y[k] >= y[k - 1] && y[k] >= y[k + 1]) candidates.push_back({y[k], k});
  std::sort(candidates.begin(), candidates.end(), [](auto& a, auto& b) { return a.first > b.first; });
  const double span = freqs.back() - freqs.front();

  Eigen::VectorXd x0(1 + 3 * n_peaks);
  x0(0) = base0;
  for (int p = 0; p < n_peaks; ++p) {
    const size_t idx = p < static_cast<int>(candidates.size()) ? candidates[p].second
                                                               : y.size() / (n_peaks + 1) * (p + 1);
    x0(1 + 3 * p) = freqs[idx];
    x0(2 + 3 * p) = span / (8.0 * n_peaks);
    x0(3 + 3 * p) = y[idx] - base0;
  }

  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(freqs.size()));
    for (size_t k = 0; k < freqs.size(); ++k) {
      double m = x(0);
      for (int p = 0; p < n_peaks; ++p) {
        const double hw = 0.5 * x(2 + 3 * p);
        const double df = freqs[k] - x(1 + 3 * p);
        m += x(3 + 3 * p) * hw * hw / (df * df + hw * hw);
      }
      r(static_cast<Eigen::Index>(k)) = m - y[k];
    }
    return r;
  };

  std::vector<std::string> names{"baseline"};
  for (int p = 0; p < n_peaks; ++p) {
    const std::string s = std::to_string(p);
    names.push_back("center" + s);
    names.push_back("width" + s);
    names.push_back("depth" + s);
  }
  FitResult res = levenberg_marquardt(residual, x0, names);
  double y_scale = 0.0;
  for (double v : y) y_scale = std::max(y_scale, std::abs(v - base0));
  for (int p = 0; p < n_peaks; ++p) {
    const double depth = res.values(3 + 3 * p);
    const bool depth_null = std::abs(depth) <= std::max(2.0 * res.sigmas(3 + 3 * p), 1e-9 * y_scale) ||
                            y_scale == 0.0;
    if (res.sigmas(1 + 3 * p) > span || depth_null)
      res.warnings.push_back("fit_lorentzian_peaks: center" + std::to_string(p) +
                             " unresolved (depth consistent with zero or uncertainty exceeds the span)");
  }
  return res;
}

}  // namespace kitres
