#pragma once

// Scalar primitives shared by the channel model and the post-processing
// bounds: binary entropy, the individual-attack privacy-amplification cost,
// Poisson photon-number statistics.

#include <cstddef>

namespace qkd {

// Error probability in [0, 1]. Construction checks the range.
class ErrorRate {
public:
  ErrorRate() = default;
  explicit ErrorRate(double value);

  double value() const noexcept { return value_; }
  explicit operator double() const noexcept { return value_; }

  friend bool operator==(ErrorRate, ErrorRate) = default;
  friend auto operator<=>(ErrorRate, ErrorRate) = default;

private:
  double value_ = 0.0;
};

// Error rate of a pure background click (random bit).
inline constexpr double kVacuumErrorRate = 0.5;

// Comparison slack for internal floating-point checks.
inline constexpr double kTolerance = 1e-12;

// H_2(e) = -e log2 e - (1-e) log2(1-e), with H_2(0) = H_2(1) = 0.
double binary_entropy(ErrorRate e);
double binary_entropy(double e);

// Privacy-amplification cost per untagged bit against individual attacks:
// log2(1 + 4e - 4e^2). Defined on [0, 1/2].
double lutkenhaus_pa_term(ErrorRate e);
double lutkenhaus_pa_term(double e);

struct PaDeviation {
  ErrorRate e_at_max;
  double absolute_gap = 0.0;       // H_2(e) - tau(e) at e_at_max
  double relative_deviation = 0.0; // gap / H_2(e) at e_at_max
};

// Locates the error rate where the two privacy-amplification costs differ
// most (largest H_2 - tau over (0, 1/2]) by a uniform scan with step
// `grid_step` followed by golden-section refinement, and reports the gap
// there both absolutely and relative to H_2. grid_step must be in (0, 1e-4].
PaDeviation pa_term_max_deviation(double grid_step);

// mu^i e^{-mu} / i!, evaluated in log space.
double poisson_weight(double mu, std::size_t i);

// Probability that a phase-randomized coherent pulse has two or more photons.
double multi_photon_probability(double mu);

// Poisson photon-number statistics of a weak coherent pulse.
class PhotonNumberDistribution {
public:
  explicit PhotonNumberDistribution(double mu);

  double mu() const noexcept { return mu_; }
  double weight(std::size_t i) const { return poisson_weight(mu_, i); }
  // sum_{k<=i} weight(k)
  double cumulative(std::size_t i) const;

private:
  double mu_;
};

}  // namespace qkd
