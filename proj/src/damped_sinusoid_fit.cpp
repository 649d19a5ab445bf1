#include "dfsq/damped_sinusoid_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dfsq/physics.hpp"

namespace dfsq {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

void FitConfig::validate() const {
  if (!(grid_resolution > 0.0 && grid_resolution <= 0.25))
    throw std::invalid_argument("FitConfig: grid_resolution must lie in (0, 1/4]");
  if (freq_min < 0.0 || freq_max < 0.0)
    throw std::invalid_argument("FitConfig: frequency bounds must be >= 0");
  if (freq_max > 0.0 && freq_min > freq_max)
    throw std::invalid_argument("FitConfig: freq_min > freq_max");
  if (max_iterations < 1) throw std::invalid_argument("FitConfig: max_iterations must be >= 1");
  if (!(contrast_max > 0.0)) throw std::invalid_argument("FitConfig: contrast_max must be > 0");
  if (!(damping_min > 0.0 && damping_max > damping_min))
    throw std::invalid_argument("FitConfig: need 0 < damping_min < damping_max");
}

Vec5 DampedSinusoidParams::as_vector() const {
  Vec5 v;
  v << contrast, frequency, phase, damping_time, baseline;
  return v;
}

DampedSinusoidParams DampedSinusoidParams::from_vector(const Vec5& v) {
  return {v[kContrast], v[kFrequency], v[kPhase], v[kDampingTime], v[kBaseline]};
}

double damped_sinusoid(const DampedSinusoidParams& p, double tau) {
  return p.contrast * std::exp(-tau / p.damping_time) *
             std::cos(kTwoPi * p.frequency * tau + p.phase) +
         p.baseline;
}

Vec5 damped_sinusoid_gradient(const DampedSinusoidParams& p, double tau) {
  const double env = std::exp(-tau / p.damping_time);
  const double arg = kTwoPi * p.frequency * tau + p.phase;
  const double c = std::cos(arg);
  const double s = std::sin(arg);
  Vec5 g;
  g[kContrast] = env * c;
  g[kFrequency] = -p.contrast * env * s * kTwoPi * tau;
  g[kPhase] = -p.contrast * env * s;
  g[kDampingTime] = p.contrast * env * c * tau / (p.damping_time * p.damping_time);
  g[kBaseline] = 1.0;
  return g;
}

double DampedSinusoidFit::error(DampedSinusoidParam which) const {
  return std::sqrt(std::max(0.0, covariance(which, which)));
}

namespace {

double wrap_phase(double phi) {
  // (-pi, pi]
  phi = std::remainder(phi, kTwoPi);
  if (phi <= -kPi) phi += kTwoPi;
  return phi;
}

struct WeightedData {
  std::vector<double> tau, y, w;
};

WeightedData prepare(std::span<const ParityRecord> data) {
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& r : data)
    if (r.sigma > 0.0) floor = std::min(floor, r.sigma);
  if (!std::isfinite(floor)) floor = 1.0;  // every point saturated: unweighted

  WeightedData out;
  for (const auto& r : data) {
    const double s = r.sigma > 0.0 ? r.sigma : floor;
    out.tau.push_back(r.tau);
    out.y.push_back(r.parity);
    out.w.push_back(1.0 / (s * s));
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

// Weighted chi^2 of y ~ a cos + b sin + c at frequency f.
double sinusoid_scan_chi2(const WeightedData& d, double f) {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  double yy = 0.0;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double arg = kTwoPi * f * d.tau[i];
    const Eigen::Vector3d basis(std::cos(arg), std::sin(arg), 1.0);
    A += d.w[i] * basis * basis.transpose();
    rhs += d.w[i] * d.y[i] * basis;
    yy += d.w[i] * d.y[i] * d.y[i];
  }
  Eigen::LDLT<Eigen::Matrix3d> ldlt(A);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12)
    return std::numeric_limits<double>::infinity();
  const Eigen::Vector3d coef = ldlt.solve(rhs);
  return yy - coef.dot(rhs);
}

DampedSinusoidParams initial_guess(const WeightedData& d, double f, const FitConfig& cfg) {
  DampedSinusoidParams p;
  p.frequency = f;

  const double q1 = quantile(d.y, 0.25);
  const double q3 = quantile(d.y, 0.75);
  p.baseline = 0.5 * (q1 + q3);
  p.contrast = std::clamp((q3 - q1) / std::sqrt(2.0), 0.0, cfg.contrast_max);

  // Phase from a two-parameter linear fit at fixed frequency and baseline.
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double arg = kTwoPi * f * d.tau[i];
    const Eigen::Vector2d basis(std::cos(arg), std::sin(arg));
    A += d.w[i] * basis * basis.transpose();
    rhs += d.w[i] * (d.y[i] - p.baseline) * basis;
  }
  const Eigen::Vector2d ab = A.ldlt().solve(rhs);
  p.phase = (ab.allFinite() && ab.norm() > 0.0) ? std::atan2(-ab[1], ab[0]) : 0.0;

  // Damping from a log-envelope regression over points near carrier extrema.
  double sw = 0, st = 0, sl = 0, stt = 0, stl = 0;
  int used = 0;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double carrier = std::cos(kTwoPi * f * d.tau[i] + p.phase);
    if (std::abs(carrier) < 0.5) continue;
    const double env = (d.y[i] - p.baseline) / carrier;
    if (!(env > 0.0)) continue;
    const double w = carrier * carrier;  // crude: larger carrier, smaller relative error
    const double l = std::log(env);
    sw += w;
    st += w * d.tau[i];
    sl += w * l;
    stt += w * d.tau[i] * d.tau[i];
    stl += w * d.tau[i] * l;
    ++used;
  }
  p.damping_time = 1.0;
  const double det = sw * stt - st * st;
  if (used >= 3 && det > 0.0) {
    const double slope = (sw * stl - st * sl) / det;
    p.damping_time = slope < 0.0 ? -1.0 / slope : cfg.damping_max;
  }
  p.damping_time = std::clamp(p.damping_time, cfg.damping_min, cfg.damping_max);
  return p;
}

Vec5 project(Vec5 v, const FitConfig& cfg) {
  if (v[kContrast] < 0.0) {
    v[kContrast] = -v[kContrast];
    v[kPhase] += kPi;
  }
  v[kContrast] = std::min(v[kContrast], cfg.contrast_max);
  if (v[kFrequency] < 0.0) {
    v[kFrequency] = -v[kFrequency];
    v[kPhase] = -v[kPhase];
  }
  v[kPhase] = wrap_phase(v[kPhase]);
  v[kDampingTime] = std::clamp(v[kDampingTime], cfg.damping_min, cfg.damping_max);
  return v;
}

struct Linearization {
  double chi2 = 0.0;
  Mat5 H = Mat5::Zero();
  Vec5 g = Vec5::Zero();
};

Linearization linearize(const WeightedData& d, const Vec5& v) {
  const auto p = DampedSinusoidParams::from_vector(v);
  Linearization lin;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double r = d.y[i] - damped_sinusoid(p, d.tau[i]);
    const Vec5 j = damped_sinusoid_gradient(p, d.tau[i]);
    lin.chi2 += d.w[i] * r * r;
    lin.H += d.w[i] * j * j.transpose();
    lin.g += d.w[i] * r * j;
  }
  return lin;
}

double chi2_at(const WeightedData& d, const Vec5& v) {
  const auto p = DampedSinusoidParams::from_vector(v);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < d.tau.size(); ++i) {
    const double r = d.y[i] - damped_sinusoid(p, d.tau[i]);
    chi2 += d.w[i] * r * r;
  }
  return chi2;
}

}  // namespace

DampedSinusoidFit fit_damped_sinusoid(std::span<const ParityRecord> data, const FitConfig& cfg) {
  cfg.validate();
  if (data.size() < 6)
    throw InsufficientDataError("fit_damped_sinusoid: need at least 6 points");
  const WeightedData d = prepare(data);

  std::vector<double> sorted = d.tau;
  std::sort(sorted.begin(), sorted.end());
  const double span = sorted.back() - sorted.front();
  if (!(span > 0.0)) throw InsufficientDataError("fit_damped_sinusoid: wait times have no span");
  double densest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] > sorted[i - 1]) densest = std::min(densest, sorted[i] - sorted[i - 1]);

  const double f_lo = cfg.freq_min > 0.0 ? cfg.freq_min : 1.0 / span;
  const double f_hi = cfg.freq_max > 0.0 ? cfg.freq_max : 0.5 / densest;
  if (f_hi < 1.0 / span || f_hi < f_lo)
    throw InsufficientDataError("fit_damped_sinusoid: span covers less than one period");

  const double step = cfg.grid_resolution / span;
  double best_f = f_lo;
  double best_chi2 = std::numeric_limits<double>::infinity();
  for (double f = f_lo; f <= f_hi + 0.5 * step; f += step) {
    const double c2 = sinusoid_scan_chi2(d, f);
    if (c2 < best_chi2) {
      best_chi2 = c2;
      best_f = f;
    }
  }

  Vec5 v = project(initial_guess(d, best_f, cfg).as_vector(), cfg);
  Linearization lin = linearize(d, v);
  double lambda = 1e-3;
  int it = 0;
  FitStatus status = FitStatus::max_iterations;
  for (; it < cfg.max_iterations; ++it) {
    const double max_diag = lin.H.diagonal().maxCoeff();
    Vec5 scale = lin.H.diagonal().cwiseMax(1e-12 * std::max(max_diag, 1e-300));
    bool accepted = false;
    Vec5 delta = Vec5::Zero();
    while (!accepted) {
      Mat5 A = lin.H;
      A.diagonal() += lambda * scale;
      delta = A.ldlt().solve(lin.g);
      const Vec5 trial = project(v + delta, cfg);
      const double trial_chi2 = chi2_at(d, trial);
      if (delta.allFinite() && trial_chi2 < lin.chi2) {
        const double decrease = lin.chi2 - trial_chi2;
        const double old_chi2 = lin.chi2;
        v = trial;
        lin = linearize(d, v);
        lambda = std::max(lambda * 0.1, 1e-15);
        accepted = true;
        if (decrease <= cfg.relative_cost_tolerance * old_chi2) status = FitStatus::converged;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          // No descent direction left: v is a stationary point.
          status = FitStatus::converged;
          break;
        }
      }
    }
    if (status == FitStatus::converged) break;
    if (delta.norm() <= cfg.step_tolerance * (v.norm() + cfg.step_tolerance)) {
      status = FitStatus::converged;
      break;
    }
    if (lin.chi2 <= std::numeric_limits<double>::min()) {
      status = FitStatus::converged;
      break;
    }
  }

  DampedSinusoidFit fit;
  fit.params = DampedSinusoidParams::from_vector(v);
  fit.chi2 = lin.chi2;
  fit.dof = static_cast<int>(data.size()) - 5;
  fit.iterations = it;
  fit.config = cfg;

  Eigen::SelfAdjointEigenSolver<Mat5> eig(lin.H);
  const auto& ev = eig.eigenvalues();
  const bool singular = !(ev.minCoeff() > 1e-13 * ev.maxCoeff());
  if (singular) {
    Vec5 inv = Vec5::Zero();
    for (int k = 0; k < 5; ++k)
      if (ev[k] > 1e-13 * ev.maxCoeff()) inv[k] = 1.0 / ev[k];
    fit.covariance = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    fit.status = FitStatus::degenerate;
  } else {
    fit.covariance = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                     eig.eigenvectors().transpose();
    fit.status = status;
  }
  fit.zero_contrast = singular || fit.params.contrast <= 3.0 * fit.error(kContrast);
  return fit;
}

}  // namespace dfsq
