#include "qkd/postprocess.hpp"

#include <cmath>
#include <string>

#include "qkd/core_math.hpp"
#include "qkd/error.hpp"

namespace qkd {

std::string_view to_string(Scheme s) {
  return s == Scheme::lutkenhaus ? "lutkenhaus" : "gllp";
}

std::string_view to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::pessimistic: return "pessimistic";
    case EstimateMethod::decoy_vw: return "decoy_vw";
    case EstimateMethod::decoy_vw_signal_e1: return "decoy_vw_signal_e1";
  }
  return "?";
}

std::string_view to_string(E1Source s) {
  return s == E1Source::decoy ? "decoy" : "signal";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "lutkenhaus") return Scheme::lutkenhaus;
  if (text == "gllp") return Scheme::gllp;
  throw ParseError("unknown scheme '" + std::string(text) + "'");
}

E1Source parse_e1_source(std::string_view text) {
  if (text == "decoy") return E1Source::decoy;
  if (text == "signal") return E1Source::signal;
  throw ParseError("unknown e1 source '" + std::string(text) + "'");
}

SinglePhotonEstimate estimate_pessimistic(const ChannelObservables& obs) {
  const double p_multi = multi_photon_probability(obs.mu);
  if (obs.Q_mu <= p_multi) {
    throw PnsInsecureError("gain " + std::to_string(obs.Q_mu) +
                           " does not exceed multi-photon probability " +
                           std::to_string(p_multi) + "; no untagged detections remain");
  }
  SinglePhotonEstimate est;
  est.method = EstimateMethod::pessimistic;
  est.Q1_bound = obs.Q_mu - p_multi;
  est.e1_bound = obs.Q_mu * obs.E_mu / est.Q1_bound;
  est.delta = p_multi / obs.Q_mu;
  return est;
}

SinglePhotonEstimate estimate_decoy_vw(const ChannelObservables& obs, E1Source source) {
  if (!obs.decoy) throw DomainError("decoy estimator needs decoy observables");
  const auto& d = *obs.decoy;
  const double mu = obs.mu;
  const double nu = d.nu;
  if (!(nu > 0.0 && nu < mu)) throw DomainError("decoy intensity must satisfy 0 < nu < mu");

  const double y0 = d.Q_vac;
  const double mu2 = mu * mu;
  const double nu2 = nu * nu;
  const double prefactor = mu2 * std::exp(-mu) / (mu * nu - nu2);
  const double bracket = d.Q_nu * std::exp(nu) - obs.Q_mu * std::exp(mu) * nu2 / mu2 -
                         (mu2 - nu2) / mu2 * y0;

  SinglePhotonEstimate est;
  est.Q1_bound = prefactor * bracket;
  if (!(est.Q1_bound > 0.0)) {
    throw EstimatorCollapseError("single-photon gain bound " + std::to_string(est.Q1_bound) +
                                 " is not positive");
  }

  double numerator = 0.0;
  double denominator = 0.0;
  if (source == E1Source::decoy) {
    est.method = EstimateMethod::decoy_vw;
    numerator = d.E_nu * d.Q_nu * std::exp(nu) - kVacuumErrorRate * y0;
    denominator = est.Q1_bound * std::exp(mu) * nu / mu;
  } else {
    est.method = EstimateMethod::decoy_vw_signal_e1;
    numerator = obs.E_mu * obs.Q_mu * std::exp(mu) - kVacuumErrorRate * y0;
    denominator = est.Q1_bound * std::exp(mu);
  }
  if (numerator < 0.0) {
    numerator = 0.0;
    est.e1_clamped = true;
  }
  est.e1_bound = numerator / denominator;
  return est;
}

RateResult key_rate(Scheme scheme, const ChannelObservables& obs,
                    const SinglePhotonEstimate& est, double f_ec) {
  if (!(f_ec >= 1.0)) throw DomainError("error-correction efficiency must be >= 1");

  RateResult r;
  r.scheme = scheme;
  r.f_ec = f_ec;
  r.ec_term = obs.q * f_ec * obs.Q_mu * binary_entropy(obs.E_mu);

  double penalty = 1.0;
  if (est.e1_bound > 0.5) {
    r.e1_out_of_range = true;
  } else {
    const ErrorRate e1(est.e1_bound);
    penalty = scheme == Scheme::gllp ? binary_entropy(e1) : lutkenhaus_pa_term(e1);
  }
  r.pa_term = obs.q * est.Q1_bound * (1.0 - penalty);
  r.R = r.pa_term - r.ec_term;
  return r;
}

std::uint64_t final_key_length(double R, double total_pulses) {
  if (!(total_pulses > 0.0)) throw DomainError("pulse count must be positive");
  if (!(R > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::floor(total_pulses * R));
}

}  // namespace qkd
