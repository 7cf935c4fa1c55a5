#include "qcomm/gaussian_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcomm/error.hpp"

namespace qcomm::photon {

namespace {

const double kShape = 4.0 * std::numbers::ln2;

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct Sample {
  double t;
  double y;
  double w;  // 1 / variance
};

double cost(const std::vector<Sample>& data, const Vec4& p) {
  double s = 0.0;
  for (const auto& d : data) {
    const double r = d.y - gaussian_peak(d.t, p[0], p[1], p[2], p[3]);
    s += d.w * r * r;
  }
  return s;
}

// Normal equations J^T J and J^T r at p.
void normal_equations(const std::vector<Sample>& data, const Vec4& p, Mat4& jtj, Vec4& jtr) {
  jtj.setZero();
  jtr.setZero();
  const double a = p[0], t0 = p[2], s = p[3];
  for (const auto& d : data) {
    const double u = d.t - t0;
    const double e = std::exp(-kShape * u * u / (s * s));
    Vec4 g;
    g << e, 1.0, a * e * 2.0 * kShape * u / (s * s), a * e * 2.0 * kShape * u * u / (s * s * s);
    const double r = d.y - (p[1] + a * e);
    jtj.noalias() += d.w * g * g.transpose();
    jtr.noalias() += d.w * g * r;
  }
}

void project(Vec4& p, double min_sigma) {
  p[0] = std::max(p[0], 0.0);
  p[1] = std::max(p[1], 0.0);
  p[3] = std::max(p[3], min_sigma);
}

bool small_step(const Vec4& step, const Vec4& p, double tol) {
  for (int k = 0; k < 4; ++k)
    if (std::abs(step[k]) > tol * (std::abs(p[k]) + tol)) return false;
  return true;
}

}  // namespace

double gaussian_peak(double t_ps, double a, double b, double t0_ps, double sigma_fwhm_ps) {
  const double u = t_ps - t0_ps;
  return b + a * std::exp(-kShape * u * u / (sigma_fwhm_ps * sigma_fwhm_ps));
}

GaussianFit initial_guess(const CoincidenceHistogram& h) {
  require(!h.counts.empty(), "histogram has no bins");
  std::vector<std::uint64_t> sorted = h.counts;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = static_cast<double>(sorted[sorted.size() / 2]);
  const auto peak = static_cast<std::size_t>(
      std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin());
  const double height = static_cast<double>(h.counts[peak]) - median;
  const double half = median + 0.5 * height;
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && static_cast<double>(h.counts[lo - 1]) >= half) --lo;
  while (hi + 1 < h.counts.size() && static_cast<double>(h.counts[hi + 1]) >= half) ++hi;

  GaussianFit g;
  g.a = std::max(height, 0.0);
  g.b = median;
  g.t0_ps = h.bin_center(peak);
  g.sigma_fwhm_ps = static_cast<double>(hi - lo + 1) * static_cast<double>(h.bin_width_ps);
  return g;
}

GaussianFit fit_gaussian(const CoincidenceHistogram& h, const GaussianFit& init,
                         const FitOptions& options) {
  require(h.total() > 0, "histogram is empty");
  std::vector<double> t(h.bins()), y(h.bins());
  for (std::size_t k = 0; k < h.bins(); ++k) {
    t[k] = h.bin_center(k);
    y[k] = static_cast<double>(h.counts[k]);
  }
  GaussianFit fit = fit_gaussian(t, y, init, options, static_cast<double>(h.bin_width_ps));
  if (!options.poisson_weights) return fit;
  // Reweighting by the model: the fixed point solves the Poisson score equations.
  std::vector<double> w(h.bins());
  for (int round = 0; round < 20; ++round) {
    for (std::size_t k = 0; k < h.bins(); ++k)
      w[k] = 1.0 / std::max(gaussian_peak(t[k], fit.a, fit.b, fit.t0_ps, fit.sigma_fwhm_ps), 1.0);
    const GaussianFit next = fit_gaussian(t, y, fit, options, static_cast<double>(h.bin_width_ps), w);
    const Vec4 before(fit.a, fit.b, fit.t0_ps, fit.sigma_fwhm_ps);
    const Vec4 after(next.a, next.b, next.t0_ps, next.sigma_fwhm_ps);
    fit = next;
    if (small_step(after - before, after, 1e-9)) break;
  }
  return fit;
}

GaussianFit fit_gaussian(std::span<const double> t, std::span<const double> y,
                         const GaussianFit& init, const FitOptions& options, double resolution,
                         std::span<const double> weights) {
  require(t.size() == y.size(), "sample times and values differ in length");
  require(weights.empty() || weights.size() == t.size(), "weights and samples differ in length");
  require(t.size() >= 4, "need at least 4 samples for a 4-parameter fit");
  require(init.sigma_fwhm_ps > 0.0, "initial width must be positive");
  require(resolution > 0.0, "sample resolution must be positive");

  std::vector<Sample> data;
  data.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (options.half_window_ps && std::abs(t[k] - init.t0_ps) > *options.half_window_ps) continue;
    data.push_back({t[k], y[k], weights.empty() ? 1.0 : weights[k]});
  }
  require(data.size() >= 4, "fit window holds fewer than 4 samples");

  const double min_sigma = 1e-6 * resolution;
  Vec4 p(init.a, init.b, init.t0_ps, init.sigma_fwhm_ps);
  project(p, min_sigma);
  double current = cost(data, p);
  double lambda = 1e-3;
  bool converged = false;
  int it = 0;
  Mat4 jtj;
  Vec4 jtr;

  for (; it < options.max_iterations && !converged; ++it) {
    normal_equations(data, p, jtj, jtr);
    bool accepted = false;
    while (!accepted) {
      Mat4 damped = jtj;
      for (int k = 0; k < 4; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Vec4 step = damped.ldlt().solve(jtr);
      Vec4 trial = p + step;
      project(trial, min_sigma);
      const double c = cost(data, trial);
      if (std::isfinite(c) && c <= current) {
        const Vec4 taken = trial - p;
        p = trial;
        converged = small_step(taken, p, options.relative_step) || c == current;
        current = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          // No downhill step at any damping: we sit at a minimum to machine
          // precision iff the undamped step is already negligible.
          const Vec4 gn = jtj.completeOrthogonalDecomposition().solve(jtr);
          converged = small_step(gn, p, options.relative_step);
          accepted = true;
          if (!converged) it = options.max_iterations;
        }
      }
    }
  }

  GaussianFit fit;
  fit.a = p[0];
  fit.b = p[1];
  fit.t0_ps = p[2];
  fit.sigma_fwhm_ps = p[3];
  fit.iterations = it;
  fit.converged = converged;
  fit.residual_norm = std::sqrt(current);

  normal_equations(data, p, jtj, jtr);
  const double dof = static_cast<double>(data.size()) - 4.0;
  const double s2 = dof > 0 ? current / dof : 0.0;
  const Mat4 cov = jtj.completeOrthogonalDecomposition().pseudoInverse() * s2;
  fit.err_a = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.err_b = std::sqrt(std::max(cov(1, 1), 0.0));
  fit.err_t0_ps = std::sqrt(std::max(cov(2, 2), 0.0));
  fit.err_sigma_ps = std::sqrt(std::max(cov(3, 3), 0.0));
  return fit;
}

double snr_constant() {
  const double ln2 = std::numbers::ln2;
  return std::sqrt(std::numbers::pi / (16.0 * ln2)) * std::erf(2.0 * std::sqrt(ln2));
}

double snr(const GaussianFit& fit) {
  require(fit.b > 0.0, "SNR undefined for zero background");
  require(fit.a >= 0.0, "signal amplitude must be non-negative");
  return fit.a / fit.b * snr_constant();
}

}  // namespace qcomm::photon
