#include "qkd/core_math.hpp"

#include <cmath>
#include <string>

#include "qkd/error.hpp"
#include "qkd/optimize.hpp"

namespace qkd {

ErrorRate::ErrorRate(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("error rate " + std::to_string(value) + " outside [0, 1]");
  }
}

double binary_entropy(ErrorRate e) {
  const double x = e.value();
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double binary_entropy(double e) { return binary_entropy(ErrorRate(e)); }

double lutkenhaus_pa_term(ErrorRate e) {
  const double x = e.value();
  if (x > 0.5) {
    throw DomainError("privacy-amplification term undefined for error rate " +
                      std::to_string(x) + " > 1/2");
  }
  return std::log2(1.0 + 4.0 * x - 4.0 * x * x);
}

double lutkenhaus_pa_term(double e) { return lutkenhaus_pa_term(ErrorRate(e)); }

PaDeviation pa_term_max_deviation(double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 1e-4)) {
    throw DomainError("grid step must lie in (0, 1e-4]");
  }
  const auto gap = [](double e) {
    return binary_entropy(e) - lutkenhaus_pa_term(e);
  };
  const auto intervals = static_cast<std::size_t>(std::ceil(0.5 / grid_step));
  const double lo = 0.5 - grid_step * static_cast<double>(intervals);
  const auto best = optimize::grid_then_golden_maximize(
      gap, std::max(lo, 0.0), 0.5, intervals, 1e-12);

  PaDeviation out;
  out.e_at_max = ErrorRate(best.x);
  out.absolute_gap = best.value;
  out.relative_deviation = best.value / binary_entropy(best.x);
  return out;
}

double poisson_weight(double mu, std::size_t i) {
  if (!(mu > 0.0)) {
    throw DomainError("mean photon number must be positive");
  }
  const double k = static_cast<double>(i);
  return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

double multi_photon_probability(double mu) {
  if (!(mu > 0.0)) {
    throw DomainError("mean photon number must be positive");
  }
  // 1 - (1+mu)e^{-mu}, written to avoid cancellation for small mu.
  return -std::expm1(-mu) - mu * std::exp(-mu);
}

PhotonNumberDistribution::PhotonNumberDistribution(double mu) : mu_(mu) {
  if (!(mu > 0.0)) {
    throw DomainError("mean photon number must be positive");
  }
}

double PhotonNumberDistribution::cumulative(std::size_t i) const {
  double sum = 0.0;
  for (std::size_t k = 0; k <= i; ++k) sum += weight(k);
  return sum;
}

}  // namespace qkd
