#include "dfsq/linear_fit.hpp"

#include <cmath>
#include <vector>

namespace dfsq {

double LinearFit::slope_error() const { return std::sqrt(covariance(0, 0)); }
double LinearFit::intercept_error() const { return std::sqrt(covariance(1, 1)); }

LinearFit fit_linear_weighted(std::span<const ScanPoint> points) {
  if (points.size() < 2) throw InsufficientDataError("fit_linear_weighted: need >= 2 points");
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
      throw std::invalid_argument("fit_linear_weighted: sigma must be positive and finite");
    const double w = 1.0 / (p.sigma * p.sigma);
    s += w;
    sx += w * p.x;
    sy += w * p.y;
    sxx += w * p.x * p.x;
    sxy += w * p.x * p.y;
  }
  // Centered second moment avoids cancellation in s*sxx - sx^2.
  const double xbar = sx / s;
  double sxx_c = 0.0;
  for (const auto& p : points) sxx_c += (p.x - xbar) * (p.x - xbar) / (p.sigma * p.sigma);
  bool distinct = false;
  for (const auto& p : points) distinct = distinct || p.x != points.front().x;
  if (!distinct || !(sxx_c > 0.0))
    throw DegenerateDesignError("fit_linear_weighted: need >= 2 distinct abscissae");

  const double delta = s * sxx_c;  // = s*sxx - sx^2
  LinearFit fit;
  fit.slope = (sxy - sx * sy / s) / sxx_c;
  fit.intercept = (sy - fit.slope * sx) / s;
  fit.covariance(0, 0) = s / delta;
  fit.covariance(1, 1) = sxx / delta;
  fit.covariance(0, 1) = fit.covariance(1, 0) = -sx / delta;
  for (const auto& p : points) {
    const double r = (p.y - fit.intercept - fit.slope * p.x) / p.sigma;
    fit.chi2 += r * r;
  }
  fit.dof = static_cast<int>(points.size()) - 2;
  return fit;
}

PowerLawFit fit_power_law(std::span<const ScanPoint> points) {
  std::vector<ScanPoint> logs;
  logs.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.x > 0.0) || !(p.y > 0.0))
      throw std::invalid_argument("fit_power_law: x and y must be positive");
    logs.push_back({std::log(p.x), std::log(p.y), p.sigma / p.y});
  }
  PowerLawFit out;
  out.log_fit = fit_linear_weighted(logs);
  out.exponent = out.log_fit.slope;
  out.exponent_error = out.log_fit.slope_error();
  out.prefactor = std::exp(out.log_fit.intercept);
  return out;
}

}  // namespace dfsq
