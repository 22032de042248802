#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "kitres/dynamics.hpp"

namespace kitres {

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd values;
  Eigen::VectorXd sigmas;  // 1-sigma from the Jacobian covariance
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;

  double value(const std::string& name) const;
  double sigma(const std::string& name) const;
};

struct LmOptions {
  int max_iterations = 200;
  double rel_tolerance = 1e-10;
  double initial_damping = 1e-3;
};

// Damped least squares with forward-difference Jacobians. residual maps
// parameters to the residual vector; deterministic for fixed inputs.
FitResult levenberg_marquardt(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                              const Eigen::VectorXd& x0, const std::vector<std::string>& names,
                              const LmOptions& opts = {});

// Complex reflection fit: parameters f0, kappa_c, kappa_i plus a complex
// background (amplitude, phase offset, phase slope). freqs in Hz.
FitResult fit_resonance(const std::vector<double>& freqs, const std::vector<Complex>& s11);
// Magnitude-only variant.
FitResult fit_resonance_magnitude(const std::vector<double>& freqs, const std::vector<double>& mag);

// Ginzburg-Landau tuning-curve fit. Model:
//   f(I) = f0 / sqrt(1 + eta [(I/I*)^2 + alpha (I/I*)^4]),  delta_f = f(I) - f0
// with eta = Lk0 / Ltot a known design input (not identifiable from
// weak-tuning data). Fits (istar, alpha); result echoes eta.
FitResult fit_tuning(const std::vector<double>& currents, const std::vector<double>& delta_f, double f0,
                     double eta);

enum class ExponentialModel { simple, inversion_recovery };

// A exp(-t/T) + c, or A (1 - 2 exp(-t/T)) + c.
FitResult fit_exponential(const std::vector<double>& t, const std::vector<double>& y, ExponentialModel model);

// Shared-baseline multi-Lorentzian fit; result parameters are baseline then
// (center_k, width_k, depth_k) per peak. width is the FWHM.
FitResult fit_lorentzian_peaks(const std::vector<double>& freqs, const std::vector<double>& y, int n_peaks);

}  // namespace kitres
