#pragma once

// Secure key rates from observed gains and QBERs. Only single-photon
// (untagged) detections earn privacy-amplification credit; the single-photon
// gain and error rate are bounded either pessimistically (every multi-photon
// pulse assumed tagged and lossless) or with vacuum + weak decoy states.

#include <cstdint>
#include <optional>
#include <string_view>

#include "qkd/channel.hpp"

namespace qkd {

enum class Scheme {
  lutkenhaus,  // individual attacks, PA cost log2(1 + 4e - 4e^2)
  gllp,        // unconditional security, PA cost H_2(e)
};

enum class EstimateMethod { pessimistic, decoy_vw, decoy_vw_signal_e1 };

// Which QBER feeds the single-photon error bound in decoy mode.
enum class E1Source { decoy, signal };

std::string_view to_string(Scheme s);
std::string_view to_string(EstimateMethod m);
std::string_view to_string(E1Source s);
Scheme parse_scheme(std::string_view text);
E1Source parse_e1_source(std::string_view text);

// Cascade reconciliation overhead over the Shannon limit.
inline constexpr double kDefaultErrorCorrectionEfficiency = 1.16;

struct SinglePhotonEstimate {
  double Q1_bound = 0.0;  // lower bound on the single-photon gain
  double e1_bound = 0.0;  // upper bound on the single-photon error rate
  EstimateMethod method = EstimateMethod::pessimistic;
  std::optional<double> delta;  // tagged fraction p_M / Q_mu (pessimistic only)
  bool e1_clamped = false;      // e_1 numerator was negative and set to zero
};

struct RateResult {
  Scheme scheme = Scheme::gllp;
  double R = 0.0;        // pa_term - ec_term; may be negative
  double ec_term = 0.0;  // q f Q_mu H_2(E_mu)
  double pa_term = 0.0;  // q Q_1 (1 - penalty(e_1))
  double f_ec = kDefaultErrorCorrectionEfficiency;
  bool e1_out_of_range = false;  // e_1 > 1/2; penalty forced to 1
};

// Q_1 = Q_mu - p_M, e_1 = Q_mu E_mu / Q_1.
// Throws PnsInsecureError when Q_mu <= p_M.
SinglePhotonEstimate estimate_pessimistic(const ChannelObservables& obs);

// Vacuum + weak decoy bounds. Requires obs.decoy with 0 < nu < mu.
// Throws EstimatorCollapseError when the Q_1 bound is not positive.
SinglePhotonEstimate estimate_decoy_vw(const ChannelObservables& obs, E1Source source);

RateResult key_rate(Scheme scheme, const ChannelObservables& obs,
                    const SinglePhotonEstimate& est,
                    double f_ec = kDefaultErrorCorrectionEfficiency);

// floor(N R), zero when R <= 0.
std::uint64_t final_key_length(double R, double total_pulses);

}  // namespace qkd
