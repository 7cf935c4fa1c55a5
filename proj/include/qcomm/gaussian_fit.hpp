#pragma once

#include <optional>
#include <span>

#include "qcomm/photon_stats.hpp"

namespace qcomm::photon {

// f(t) = b + a exp(-4 ln2 (t - t0)^2 / sigma^2), sigma being the FWHM.
struct GaussianFit {
  double a = 0.0;
  double b = 0.0;
  double t0_ps = 0.0;
  double sigma_fwhm_ps = 1.0;
  double err_a = 0.0;
  double err_b = 0.0;
  double err_t0_ps = 0.0;
  double err_sigma_ps = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

double gaussian_peak(double t_ps, double a, double b, double t0_ps, double sigma_fwhm_ps);

struct FitOptions {
  int max_iterations = 200;
  double relative_step = 1e-8;
  // Only bins within this distance of the initial t0 take part.
  std::optional<double> half_window_ps;
  // Histogram fits are reweighted by 1 / max(model, 1) until the parameters
  // settle, starting from the unweighted fit.
  bool poisson_weights = true;
};

// Peak bin for (a, t0), median for b, half-maximum width for sigma.
GaussianFit initial_guess(const CoincidenceHistogram& h);

// Weighted Levenberg-Marquardt on bin centres with an analytic Jacobian.
// a, b and sigma are kept non-negative. On non-convergence the best iterate
// comes back with converged == false.
GaussianFit fit_gaussian(const CoincidenceHistogram& h, const GaussianFit& init,
                         const FitOptions& options = {});

// Same fit on arbitrary samples y(t). `resolution` sets the floor on sigma
// (1e-6 of it). Empty weights mean unit weights.
GaussianFit fit_gaussian(std::span<const double> t, std::span<const double> y,
                         const GaussianFit& init, const FitOptions& options = {},
                         double resolution = 1.0, std::span<const double> weights = {});

// (a/b) sqrt(pi / (16 ln2)) erf(2 sqrt(ln2)); the integrated peak against the
// background under one FWHM-scaled window.
double snr(const GaussianFit& fit);

// The constant multiplying a/b above, ~0.5224.
double snr_constant();

}  // namespace qcomm::photon
