#include "qkd/channel.hpp"

#include <array>
#include <cmath>
#include <set>

#include "qkd/core_math.hpp"
#include "qkd/error.hpp"

namespace qkd {
namespace {

const std::array<SetupParams, 4> kBuiltins = {{
    {"T8", 830.0, 2.5, 0.01, 1e-7, 0.0792},
    {"G13", 1300.0, 0.32, 0.0014, 1.64e-4, 0.0814},
    {"KTH", 1550.0, 0.2, 0.01, 4e-4, 0.143},
    {"GYS", 1550.0, 0.21, 0.033, 1.7e-6, 0.045},
}};

// 1 - (1 - eta)^i
double i_photon_transmittance(double eta, std::size_t i) {
  if (eta >= 1.0) return i == 0 ? 0.0 : 1.0;
  return -std::expm1(static_cast<double>(i) * std::log1p(-eta));
}

PhotonNumberComponent component(const SetupParams& s, double eta, double mu,
                                std::size_t i) {
  const double eta_i = i_photon_transmittance(eta, i);
  PhotonNumberComponent c;
  c.yield = s.y0 + eta_i - s.y0 * eta_i;
  const double error_yield = kVacuumErrorRate * s.y0 + s.e_d * eta_i;
  c.error_rate = c.yield > 0.0 ? error_yield / c.yield : kVacuumErrorRate;
  c.gain = c.yield * poisson_weight(mu, i);
  return c;
}

struct GainQber {
  double gain;
  double qber;
};

GainQber gain_and_qber(const SetupParams& s, double eta, double intensity,
                       const char* label) {
  // Fraction of pulses with at least one photon reaching the detector.
  const double detected = -std::expm1(-eta * intensity);
  const double gain = s.y0 + (1.0 - s.y0) * detected;
  if (!(gain > 0.0)) {
    throw DegenerateChannelError(std::string(label) + " gain underflows to zero");
  }
  const double error_gain = kVacuumErrorRate * s.y0 + s.e_d * detected;
  return {gain, error_gain / gain};
}

}  // namespace

void SetupParams::validate() const {
  const auto fail = [this](const std::string& what) {
    throw DomainError("setup '" + name + "': " + what);
  };
  if (!(alpha_db_per_km > 0.0)) fail("alpha_db_per_km must be > 0");
  if (!(e_d >= 0.0 && e_d < 0.5)) fail("e_d must lie in [0, 0.5)");
  if (!(y0 >= 0.0 && y0 < 1.0)) fail("y0 must lie in [0, 1)");
  if (!(eta_bob > 0.0 && eta_bob <= 1.0)) fail("eta_bob must lie in (0, 1]");
  if (!(wavelength_nm > 0.0)) fail("wavelength_nm must be > 0");
}

std::span<const SetupParams> builtin_setups() { return kBuiltins; }

const SetupParams& builtin_setup(std::string_view name) {
  for (const auto& s : kBuiltins) {
    if (s.name == name) return s;
  }
  throw DomainError("unknown setup '" + std::string(name) +
                    "' (expected T8, G13, KTH or GYS)");
}

SetupParams setup_from_key_values(const KeyValues& kv, std::string_view source) {
  static const std::set<std::string, std::less<>> kKeys = {
      "name", "wavelength_nm", "alpha_db_per_km", "e_d", "y0", "eta_bob"};
  for (const auto& [key, value] : kv) {
    if (!kKeys.contains(key)) {
      throw ParseError(std::string(source) + ": unknown key '" + key + "'");
    }
  }
  const auto get = [&](std::string_view key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw ParseError(std::string(source) + ": missing key '" + std::string(key) + "'");
    }
    return it->second;
  };

  SetupParams s;
  s.name = get("name");
  s.wavelength_nm = parse_double(get("wavelength_nm"), "wavelength_nm");
  s.alpha_db_per_km = parse_double(get("alpha_db_per_km"), "alpha_db_per_km");
  s.e_d = parse_double(get("e_d"), "e_d");
  s.y0 = parse_double(get("y0"), "y0");
  s.eta_bob = parse_double(get("eta_bob"), "eta_bob");
  s.validate();
  return s;
}

SetupParams load_setup_file(const std::string& path) {
  return setup_from_key_values(read_key_values_file(path), path);
}

double transmittance(const SetupParams& setup, double distance_km) {
  if (!(distance_km >= 0.0)) throw DomainError("distance must be non-negative");
  return setup.eta_bob * std::pow(10.0, -setup.alpha_db_per_km * distance_km / 10.0);
}

ChannelObservables simulate_observables(const SetupParams& setup, double distance_km,
                                        double mu, std::optional<double> nu, double q) {
  if (!(mu > 0.0)) throw DomainError("signal intensity must be positive");
  if (nu && !(*nu > 0.0 && *nu < mu)) {
    throw DomainError("decoy intensity must satisfy 0 < nu < mu");
  }
  const double eta = transmittance(setup, distance_km);

  ChannelObservables obs;
  obs.q = q;
  obs.mu = mu;
  const auto signal = gain_and_qber(setup, eta, mu, "signal");
  obs.Q_mu = signal.gain;
  obs.E_mu = signal.qber;
  if (nu) {
    const auto weak = gain_and_qber(setup, eta, *nu, "decoy");
    obs.decoy = DecoyObservables{*nu, weak.gain, weak.qber, setup.y0};
  }
  return obs;
}

PhotonNumberTruth photon_number_truth(const SetupParams& setup, double distance_km,
                                      double mu, std::size_t max_photons) {
  const double eta = transmittance(setup, distance_km);
  PhotonNumberTruth truth;
  truth.reserve(max_photons + 1);
  for (std::size_t i = 0; i <= max_photons; ++i) {
    truth.push_back(component(setup, eta, mu, i));
  }
  return truth;
}

PhotonNumberComponent true_single_photon(const SetupParams& setup, double distance_km,
                                         double mu) {
  return component(setup, transmittance(setup, distance_km), mu, 1);
}

}  // namespace qkd
