#include "dfsq/angular_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dfsq/physics.hpp"

namespace dfsq {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

double angular_model(double offset, double amplitude, double beta0, double beta) {
  const double c = std::cos(beta - beta0);
  return offset + amplitude * c * c;
}

double AngularFit::evaluate(double beta) const {
  return angular_model(offset, amplitude, beta0, beta);
}

double AngularFit::beta0_error() const { return std::sqrt(std::max(0.0, covariance(2, 2))); }

namespace {

double normalize_angle(double beta) {
  beta = std::fmod(beta, kPi);
  if (beta < 0.0) beta += kPi;
  if (beta >= kPi) beta -= kPi;
  return beta;
}

double chi2_at(std::span<const ScanPoint> pts, const Vec3& v) {
  double chi2 = 0.0;
  for (const auto& p : pts) {
    const double r = (p.y - angular_model(v[0], v[1], v[2], p.x)) / p.sigma;
    chi2 += r * r;
  }
  return chi2;
}

void linearize(std::span<const ScanPoint> pts, const Vec3& v, Mat3& H, Vec3& g, double& chi2) {
  H.setZero();
  g.setZero();
  chi2 = 0.0;
  for (const auto& p : pts) {
    const double w = 1.0 / (p.sigma * p.sigma);
    const double d = p.x - v[2];
    const double c = std::cos(d);
    const Vec3 j(1.0, c * c, v[1] * std::sin(2.0 * d));
    const double r = p.y - angular_model(v[0], v[1], v[2], p.x);
    H += w * j * j.transpose();
    g += w * r * j;
    chi2 += w * r * r;
  }
}

}  // namespace

AngularFit fit_angular(std::span<const ScanPoint> pts, int max_iterations) {
  if (pts.size() < 4) throw InsufficientDataError("fit_angular: need at least 4 points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : pts) {
    if (!(p.sigma > 0.0)) throw std::invalid_argument("fit_angular: sigma must be > 0");
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  if (hi - lo < 0.5 * kPi - 1e-12)
    throw InsufficientDataError("fit_angular: angles span less than 90 degrees");

  // Grid over beta0 in 1 degree steps; (offset, amplitude) are linear.
  Vec3 v(0.0, 0.0, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (int deg = 0; deg < 180; ++deg) {
    const double b0 = deg * units::degree;
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
    for (const auto& p : pts) {
      const double c = std::cos(p.x - b0);
      const Eigen::Vector2d basis(1.0, c * c);
      const double w = 1.0 / (p.sigma * p.sigma);
      A += w * basis * basis.transpose();
      rhs += w * p.y * basis;
    }
    const Eigen::Vector2d coef = A.ldlt().solve(rhs);
    if (!coef.allFinite()) continue;
    const Vec3 trial(coef[0], coef[1], b0);
    const double c2 = chi2_at(pts, trial);
    if (c2 < best) {
      best = c2;
      v = trial;
    }
  }

  Mat3 H;
  Vec3 g;
  double chi2;
  linearize(pts, v, H, g, chi2);
  double lambda = 1e-3;
  int it = 0;
  FitStatus status = FitStatus::max_iterations;
  for (; it < max_iterations && status != FitStatus::converged; ++it) {
    const Vec3 scale = H.diagonal().cwiseMax(1e-12 * std::max(H.diagonal().maxCoeff(), 1e-300));
    for (;;) {
      Mat3 A = H;
      A.diagonal() += lambda * scale;
      const Vec3 delta = A.ldlt().solve(g);
      const Vec3 trial = v + delta;
      const double trial_chi2 = chi2_at(pts, trial);
      if (delta.allFinite() && trial_chi2 < chi2) {
        const double decrease = chi2 - trial_chi2;
        const double old = chi2;
        v = trial;
        linearize(pts, v, H, g, chi2);
        lambda = std::max(lambda * 0.1, 1e-15);
        if (decrease <= 1e-12 * old || delta.norm() <= 1e-14 * (v.norm() + 1e-14))
          status = FitStatus::converged;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e16) {
        status = FitStatus::converged;
        break;
      }
    }
  }

  AngularFit fit;
  fit.iterations = it;
  fit.chi2 = chi2;
  fit.dof = static_cast<int>(pts.size()) - 3;

  Eigen::SelfAdjointEigenSolver<Mat3> eig(H);
  const auto& ev = eig.eigenvalues();
  const bool singular = !(ev.minCoeff() > 1e-13 * ev.maxCoeff());
  Vec3 inv = Vec3::Zero();
  for (int k = 0; k < 3; ++k)
    if (ev[k] > 1e-13 * ev.maxCoeff()) inv[k] = 1.0 / ev[k];
  Mat3 cov = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();

  // a + b cos^2(x) == (a + b) + (-b) cos^2(x - pi/2): keep the amplitude positive.
  if (v[1] < 0.0) {
    Mat3 T;
    T << 1, 1, 0, 0, -1, 0, 0, 0, 1;
    v = Vec3(v[0] + v[1], -v[1], v[2] + 0.5 * kPi);
    cov = T * cov * T.transpose();
  }
  fit.offset = v[0];
  fit.amplitude = v[1];
  fit.beta0 = normalize_angle(v[2]);
  fit.covariance = cov;
  fit.status = singular ? FitStatus::degenerate : status;
  fit.degenerate_amplitude =
      singular || std::abs(fit.amplitude) <= 3.0 * std::sqrt(std::max(0.0, cov(1, 1)));
  return fit;
}

}  // namespace dfsq
